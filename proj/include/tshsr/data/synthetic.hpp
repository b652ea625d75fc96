#pragma once

#include <cstdint>

#include "tshsr/data/dataset.hpp"

namespace tshsr::data {

struct SyntheticSpec {
  std::size_t pairs = 16;
  std::size_t regions = 4;  // K
  std::size_t raw_dim = 8;
  std::size_t length = 5;   // tokens per caption
  std::size_t vocab_size = 50;
  std::uint64_t seed = 0;
  double signal_strength = 1.0;
  std::size_t captions_per_image = 1;
  /// Seeds the token prototype vectors; splits that share it share one "world".
  std::uint64_t world_seed = 0;
};

/// Deterministic synthetic corpus. Every image draws a latent code of `length`
/// concept tokens. Region k mixes the prototype of concept k mod length with
/// Gaussian noise (weights s and 1 - s); caption token j is concept j with
/// probability s, otherwise a uniformly random token. With s == 0 the features
/// carry no information about the captions. Region values are float32-exact.
/// Throws ConfigError on zero counts or s outside [0, 1].
Dataset gen_synthetic(const SyntheticSpec& spec);

}  // namespace tshsr::data
