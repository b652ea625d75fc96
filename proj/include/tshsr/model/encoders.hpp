#pragma once

#include <cstdint>
#include <span>

#include "tshsr/model/config.hpp"
#include "tshsr/numerics/tape.hpp"

namespace tshsr::model {

/// Projected region features, one row per region: [K x d].
struct ImageLocalFeatures {
  num::Var V;
  std::size_t regions() const { return V.shape()[0]; }
  std::size_t dim() const { return V.shape()[1]; }
};

/// Word features from the bidirectional GRU: [L x d].
struct TextLocalFeatures {
  num::Var T;
  std::size_t tokens() const { return T.shape()[0]; }
  std::size_t dim() const { return T.shape()[1]; }
};

/// Gated, mean-pooled summary of a set of local features: [d].
struct GlobalFeature {
  num::Var vec;
};

/// V = raw * W + b. Throws DimensionError when raw's width differs from the projection input.
ImageLocalFeatures project_image(num::Tape& tape, const num::ParamStore& params, const num::Tensor& raw);

/// Embeds tokens and runs forward and backward GRUs of hidden size d; each output row is
/// the average of the two directions' states at that position.
/// Throws InputError for empty, over-long or out-of-vocabulary input.
TextLocalFeatures encode_text(num::Tape& tape, const num::ParamStore& params, std::span<const std::uint32_t> tokens,
                              std::size_t max_length);

/// Each row gated elementwise by the column mean, then rows averaged.
GlobalFeature global_feature(const num::Var& X);

}  // namespace tshsr::model
