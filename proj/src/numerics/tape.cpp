#include "tshsr/numerics/tape.hpp"

#include "tshsr/errors.hpp"

namespace tshsr::num {

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("use of an unbound Var");
  return tape_->value(id_);
}

std::span<double> GradBuffer::operator()(const Var& v) {
  if (!tape_.needs_grad(v.id())) return {};
  auto& g = grads_[v.id()];
  if (g.empty()) g.assign(tape_.value(v.id()).size(), 0.0);
  return g;
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::bind(const std::string& name, const Tensor& value) {
  if (auto it = bound_.find(name); it != bound_.end()) return Var(this, it->second);
  nodes_.push_back(Node{Tensor{}, &value, {}, record_});
  bound_.emplace(name, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::push(Tensor value, std::initializer_list<Var> parents, Backprop fn) {
  return push(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(fn));
}

Var Tape::push(Tensor value, std::span<const Var> parents, Backprop fn) {
  bool needs = false;
  if (record_) {
    for (const auto& p : parents) {
      if (p.tape() != this) throw ContractError("operation mixes values from different tapes");
      needs = needs || nodes_[p.id()].needs_grad;
    }
  }
  nodes_.push_back(Node{std::move(value), nullptr, needs ? std::move(fn) : Backprop{}, needs});
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.external ? *n.external : n.owned;
}

GradMap Tape::backward(const Var& loss, const ParamStore& params) const {
  if (loss.tape() != this) throw ContractError("loss was not recorded on this tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " + shape_str(loss.shape()));
  }
  if (!record_) throw ContractError("backward on a tape with recording disabled");

  std::vector<std::vector<double>> grads(nodes_.size());
  GradBuffer buffer(*this, grads);
  if (nodes_[loss.id()].needs_grad) grads[loss.id()].assign(1, 1.0);

  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const auto& node = nodes_[id];
    if (!node.backprop || grads[id].empty()) continue;
    std::vector<double> g = std::move(grads[id]);
    node.backprop(g, buffer);
  }

  GradMap out;
  for (const auto& [name, tensor] : params) {
    Tensor g(tensor.shape());
    if (auto it = bound_.find(name); it != bound_.end() && !grads[it->second].empty()) {
      const auto& src = grads[it->second];
      std::copy(src.begin(), src.end(), g.data().begin());
    }
    out.emplace(name, std::move(g));
  }
  return out;
}

}  // namespace tshsr::num
