#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tshsr/model/config.hpp"
#include "tshsr/numerics/tensor.hpp"

namespace testing_support {

/// Uniform values in [lo, hi) with a random sign when `signed_values` is set.
inline tshsr::num::Tensor random_tensor(std::mt19937_64& rng, tshsr::num::Shape shape, double lo = 0.1,
                                        double hi = 2.0, bool signed_values = true) {
  tshsr::num::Tensor t(std::move(shape));
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution neg(0.5);
  for (auto& v : t.data()) v = (signed_values && neg(rng)) ? -mag(rng) : mag(rng);
  return t;
}

inline std::vector<std::uint32_t> random_tokens(std::mt19937_64& rng, std::size_t length, std::size_t vocab) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(vocab - 1));
  std::vector<std::uint32_t> out(length);
  for (auto& t : out) t = pick(rng);
  return out;
}

/// The small configuration used by gradient checks and oracle comparisons.
inline tshsr::model::ModelConfig tiny_config(std::uint64_t seed = 1) {
  tshsr::model::ModelConfig cfg;
  cfg.raw_dim = 12;
  cfg.joint_dim = 8;
  cfg.word_dim = 10;
  cfg.vocab_size = 50;
  cfg.max_length = 5;
  cfg.sim_dim = 6;
  cfg.reasoning_steps = 2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace testing_support
