#pragma once

#include "tshsr/model/config.hpp"
#include "tshsr/model/hsr.hpp"
#include "tshsr/numerics/tape.hpp"

namespace tshsr::model {

/// Score of one image-text pair together with the fused similarity representation.
struct PairScore {
  num::Var score;   // scalar
  num::Var s_star;  // [m]
};

/// Scores of image p against text q at [p, q]; the diagonal holds matched pairs.
struct LossBatch {
  num::Var scores;  // [B x B]
  double margin = 0.2;
};

/// Mean over all K+1 rows of a t2i node set. Throws ContractError for the i2t stream.
num::Var pool_t2i(const SimilarityNodeSet& nodes);

/// both: elementwise sum; i2t_only / t2i_only: the corresponding argument alone
/// (the other one is never read and may be unset).
num::Var fuse(const num::Var& s_i2t, const num::Var& s_t2i, StreamMode mode);

/// w_head . s_star + b_head.
num::Var score(num::Tape& tape, const num::ParamStore& params, const num::Var& s_star);

/// Sum over matched pairs of the two hardest-negative hinges. Ties between
/// negatives resolve to the lowest index. Throws ConfigError if B < 2 or margin < 0.
num::Var bidirectional_ranking_loss(const LossBatch& batch);

}  // namespace tshsr::model
