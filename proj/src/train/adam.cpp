#include "tshsr/train/adam.hpp"

#include <cmath>

#include "tshsr/errors.hpp"

namespace tshsr::train {

void adam_step(num::ParamStore& params, const num::GradMap& grads, AdamState& state, double lr,
               const AdamHyper& hyper) {
  auto moment = [](num::GradMap& map, const std::string& name, const num::Tensor& like) -> num::Tensor& {
    auto it = map.find(name);
    if (it == map.end()) it = map.emplace(name, num::Tensor(like.shape())).first;
    if (it->second.shape() != like.shape()) throw ContractError("adam_step: moment shape mismatch for '" + name + "'");
    return it->second;
  };

  for (const auto& [name, p] : params) {
    auto g = grads.find(name);
    if (g == grads.end()) throw ContractError("adam_step: no gradient for '" + name + "'");
    if (g->second.shape() != p.shape()) {
      throw ContractError("adam_step: gradient for '" + name + "' has shape " + num::shape_str(g->second.shape()) +
                          ", parameter has " + num::shape_str(p.shape()));
    }
    moment(state.first, name, p);
    moment(state.second, name, p);
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(hyper.beta1, t);
  const double correct2 = 1.0 - std::pow(hyper.beta2, t);

  for (auto& [name, p] : params) {
    const num::Tensor& g = grads.at(name);
    num::Tensor& m = state.first.at(name);
    num::Tensor& v = state.second.at(name);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

}  // namespace tshsr::train
