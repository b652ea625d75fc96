#include "tshsr/numerics/param_store.hpp"

#include "tshsr/errors.hpp"

namespace tshsr::num {

Tensor& ParamStore::add(const std::string& name, Tensor value) {
  auto [it, inserted] = entries_.emplace(name, std::move(value));
  if (!inserted) throw ContractError("duplicate parameter name '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::total_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : entries_) n += t.size();
  return n;
}

}  // namespace tshsr::num
