#include "tshsr/model/attention.hpp"

#include <vector>

#include "tshsr/errors.hpp"
#include "tshsr/model/encoders.hpp"
#include "tshsr/numerics/ops.hpp"

namespace tshsr::model {

using num::Var;

Var sim_vec(const Var& x, const Var& y, const Var& W) {
  if (x.shape() != y.shape() || x.shape().size() != 1 || W.shape().size() != 2 || W.shape()[1] != x.shape()[0]) {
    throw DimensionError("sim_vec: incompatible shapes x " + num::shape_str(x.shape()) + ", y " +
                         num::shape_str(y.shape()) + ", W " + num::shape_str(W.shape()));
  }
  const std::size_t d = x.shape()[0];
  const std::size_t m = W.shape()[0];
  const Var diff = num::sub(x, y);
  const Var dist = num::l2norm(diff);
  if (dist.value().item() < kZeroDistance) return x.tape()->constant(num::Tensor({m}));
  const Var projected = num::matmul(W, num::reshape(num::square(diff), {d, 1}));
  return num::div_scalar(num::reshape(projected, {m}), dist);
}

Var sim_rows(const Var& X, const Var& Y, const Var& W) {
  if (X.shape() != Y.shape() || X.shape().size() != 2) {
    throw DimensionError("sim_rows: shapes " + num::shape_str(X.shape()) + " and " + num::shape_str(Y.shape()) +
                         " differ");
  }
  std::vector<Var> rows;
  rows.reserve(X.shape()[0]);
  for (std::size_t i = 0; i < X.shape()[0]; ++i) rows.push_back(sim_vec(num::row(X, i), num::row(Y, i), W));
  return num::stack(rows);
}

AttentionWeights cross_attention(const Var& V, const Var& T, double lambda, Direction direction) {
  if (!(lambda > 0.0)) throw ConfigError("cross_attention: lambda must be positive");
  if (V.shape().size() != 2 || T.shape().size() != 2 || V.shape()[1] != T.shape()[1]) {
    throw DimensionError("cross_attention: incompatible features " + num::shape_str(V.shape()) + " and " +
                         num::shape_str(T.shape()));
  }
  // Cosine of every region/word pair, clamped at zero: [K x L].
  const Var clamped = num::relu(num::matmul(num::normalize_rows(V), num::transpose(num::normalize_rows(T))));
  if (direction == Direction::i2t) {
    // Normalise over words for each region, softmax over regions for each word.
    return {num::softmax(num::scale(num::normalize_rows(clamped), lambda), 0), direction};
  }
  // Normalise over regions for each word, softmax over words for each region.
  const Var normed = num::transpose(num::normalize_rows(num::transpose(clamped)));
  return {num::softmax(num::scale(normed, lambda), 1), direction};
}

Var attended_features(const AttentionWeights& weights, const Var& V, const Var& T) {
  const auto& ws = weights.weights.shape();
  if (ws.size() != 2 || V.shape().size() != 2 || T.shape().size() != 2 || ws[0] != V.shape()[0] ||
      ws[1] != T.shape()[0]) {
    throw DimensionError("attended_features: weights " + num::shape_str(ws) + " do not match V " +
                         num::shape_str(V.shape()) + " and T " + num::shape_str(T.shape()));
  }
  if (weights.direction == Direction::i2t) return num::matmul(num::transpose(weights.weights), V);
  return num::matmul(weights.weights, T);
}

LocalSimilarities local_similarities(num::Tape& tape, const num::ParamStore& params, const ModelConfig& cfg,
                                     const Var& V, const Var& T) {
  LocalSimilarities out;
  const Var v_bar = global_feature(V).vec;
  const Var t_bar = global_feature(T).vec;
  out.global = sim_vec(v_bar, t_bar, tape.bind(params, names::sim_global(cfg)));
  if (cfg.uses_i2t()) {
    const auto alpha = cross_attention(V, T, cfg.lambda, Direction::i2t);
    out.i2t = sim_rows(attended_features(alpha, V, T), T, tape.bind(params, names::sim_i2t(cfg)));
  }
  if (cfg.uses_t2i()) {
    const auto beta = cross_attention(V, T, cfg.lambda, Direction::t2i);
    out.t2i = sim_rows(V, attended_features(beta, V, T), tape.bind(params, names::sim_t2i(cfg)));
  }
  return out;
}

}  // namespace tshsr::model
