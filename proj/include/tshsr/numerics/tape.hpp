#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tshsr/numerics/param_store.hpp"
#include "tshsr/numerics/tensor.hpp"

namespace tshsr::num {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  /// Stays valid for the lifetime of the tape.
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradient accumulators handed to backprop closures.
class GradBuffer {
 public:
  /// Accumulator for `v`, zero-initialised on first use. Empty when `v` needs no gradient.
  std::span<double> operator()(const Var& v);

 private:
  friend class Tape;
  GradBuffer(const Tape& tape, std::vector<std::vector<double>>& grads) : tape_(tape), grads_(grads) {}

  const Tape& tape_;
  std::vector<std::vector<double>>& grads_;
};

using Backprop = std::function<void(std::span<const double> grad_out, GradBuffer& grads)>;

/// Dynamic operation tape, rebuilt for every forward pass. With recording off
/// the tape only evaluates values and keeps no backprop closures.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Tensor value);

  /// Binds a parameter by reference; the tensor must outlive the tape.
  /// Binding the same name twice returns the same Var.
  Var bind(const std::string& name, const Tensor& value);
  Var bind(const ParamStore& store, const std::string& name) { return bind(name, store.at(name)); }

  /// Records an operation result. `fn` is dropped when no parent needs a gradient.
  Var push(Tensor value, std::initializer_list<Var> parents, Backprop fn);
  Var push(Tensor value, std::span<const Var> parents, Backprop fn);

  const Tensor& value(std::size_t id) const;
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse-mode gradients of a scalar `loss` for every entry of `params`.
  /// Entries not bound on this tape, or not on the path to `loss`, get zeros.
  GradMap backward(const Var& loss, const ParamStore& params) const;

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Backprop backprop;
    bool needs_grad = false;
  };

  std::deque<Node> nodes_;
  std::unordered_map<std::string, std::size_t> bound_;
  bool record_;
};

}  // namespace tshsr::num
