#include "tshsr/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tshsr/errors.hpp"

namespace tshsr::num {

GradMap finite_diff_grad(const Objective& f, const ParamStore& params, double epsilon) {
  if (!(epsilon > 0.0)) throw ContractError("finite_diff_grad: epsilon must be positive");
  ParamStore work = params;
  GradMap out;
  for (auto& [name, tensor] : work) {
    Tensor g(tensor.shape());
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double orig = tensor[i];
      tensor[i] = orig + epsilon;
      const double up = f(work);
      tensor[i] = orig - epsilon;
      const double down = f(work);
      tensor[i] = orig;
      g[i] = (up - down) / (2.0 * epsilon);
    }
    out.emplace(name, std::move(g));
  }
  return out;
}

double relative_error(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("relative_error shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), kRelativeErrorFloor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

std::vector<GradCheckEntry> compare_gradients(const GradMap& analytic, const GradMap& numeric,
                                              const ParamStore& params) {
  std::vector<GradCheckEntry> out;
  for (const auto& [name, tensor] : params) {
    auto a = analytic.find(name);
    auto n = numeric.find(name);
    if (a == analytic.end() || n == numeric.end()) throw ContractError("missing gradient for '" + name + "'");
    out.push_back({name, tensor.size(), relative_error(a->second, n->second)});
  }
  return out;
}

}  // namespace tshsr::num
