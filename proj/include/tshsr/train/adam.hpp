#pragma once

#include <cstdint>

#include "tshsr/numerics/param_store.hpp"

namespace tshsr::train {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moment estimates per parameter, plus the step count.
struct AdamState {
  num::GradMap first;
  num::GradMap second;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update of every parameter in `params`. Missing
/// moment entries are created as zeros; throws ContractError if a gradient
/// or existing moment does not match its parameter's shape.
void adam_step(num::ParamStore& params, const num::GradMap& grads, AdamState& state, double lr,
               const AdamHyper& hyper = {});

}  // namespace tshsr::train
