#pragma once

#include <map>
#include <string>
#include <vector>

#include "tshsr/numerics/tensor.hpp"

namespace tshsr::num {

/// Named learnable tensors. Iteration is lexicographic by name.
class ParamStore {
 public:
  using Map = std::map<std::string, Tensor>;

  /// Throws ContractError if the name already exists.
  Tensor& add(const std::string& name, Tensor value);

  bool contains(const std::string& name) const { return entries_.contains(name); }
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  /// Total number of scalar coordinates across all entries.
  std::size_t total_count() const;

  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }
  Map::iterator begin() { return entries_.begin(); }
  Map::iterator end() { return entries_.end(); }

  bool operator==(const ParamStore& other) const = default;

 private:
  Map entries_;
};

/// Gradient per parameter name.
using GradMap = std::map<std::string, Tensor>;

}  // namespace tshsr::num
