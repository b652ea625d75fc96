#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tshsr/numerics/param_store.hpp"

namespace tshsr::num {

/// Scalar objective evaluated on a full parameter set without recording.
using Objective = std::function<double(const ParamStore&)>;

/// Central-difference gradient estimate (f(p + eps) - f(p - eps)) / 2 eps,
/// one coordinate at a time. Independent of the differentiation tape.
GradMap finite_diff_grad(const Objective& f, const ParamStore& params, double epsilon = 1e-5);

/// Denominator floor used by relative_error; below it the comparison is absolute.
inline constexpr double kRelativeErrorFloor = 1e-6;

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, kRelativeErrorFloor)
double relative_error(const Tensor& a, const Tensor& b);

struct GradCheckEntry {
  std::string name;
  std::size_t count = 0;
  double max_relative_error = 0.0;
};

/// Per-parameter comparison of two gradient maps over the names in `params`.
std::vector<GradCheckEntry> compare_gradients(const GradMap& analytic, const GradMap& numeric,
                                              const ParamStore& params);

}  // namespace tshsr::num
