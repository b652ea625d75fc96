#pragma once

#include "tshsr/model/config.hpp"
#include "tshsr/numerics/tape.hpp"

namespace tshsr::model {

enum class Direction { i2t, t2i };

/// Cross-attention weights, always laid out [K x L] (regions x words).
/// i2t: each column (word) is a distribution over regions.
/// t2i: each row (region) is a distribution over words.
struct AttentionWeights {
  num::Var weights;
  Direction direction;
};

/// Distances below this are treated as an exact match by sim_vec.
inline constexpr double kZeroDistance = 1e-12;

/// Vector similarity W |x - y|^2 / ||x - y||_2, with W of shape [m x d].
/// Returns the zero vector when ||x - y||_2 < kZeroDistance.
num::Var sim_vec(const num::Var& x, const num::Var& y, const num::Var& W);

/// Row-wise sim_vec over two [n x d] matrices, giving [n x m].
num::Var sim_rows(const num::Var& X, const num::Var& Y, const num::Var& W);

/// Clamped cosine affinities, renormalised per direction and turned into a
/// temperature softmax. Throws ConfigError if lambda <= 0.
AttentionWeights cross_attention(const num::Var& V, const num::Var& T, double lambda, Direction direction);

/// i2t: [L x d] attended region features, one per word.
/// t2i: [K x d] attended word features, one per region.
num::Var attended_features(const AttentionWeights& weights, const num::Var& V, const num::Var& T);

struct LocalSimilarities {
  num::Var global;  // [m]
  num::Var i2t;     // [L x m]; unset when the config has no i2t stream
  num::Var t2i;     // [K x m]; unset when the config has no t2i stream
};

LocalSimilarities local_similarities(num::Tape& tape, const num::ParamStore& params, const ModelConfig& cfg,
                                     const num::Var& V, const num::Var& T);

}  // namespace tshsr::model
