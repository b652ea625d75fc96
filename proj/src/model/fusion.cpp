#include "tshsr/model/fusion.hpp"

#include "tshsr/errors.hpp"
#include "tshsr/numerics/ops.hpp"

namespace tshsr::model {

using num::Var;

namespace {
// Added to the diagonal so it never wins a hardest-negative max.
constexpr double kExcludeDiagonal = -1e30;
}  // namespace

Var pool_t2i(const SimilarityNodeSet& nodes) {
  if (nodes.stream != Stream::t2i) throw ContractError("pool_t2i: node set belongs to the i2t stream");
  return num::mean(nodes.S, 0);
}

Var fuse(const Var& s_i2t, const Var& s_t2i, StreamMode mode) {
  switch (mode) {
    case StreamMode::i2t_only: return s_i2t;
    case StreamMode::t2i_only: return s_t2i;
    case StreamMode::both: break;
  }
  if (s_i2t.shape() != s_t2i.shape()) {
    throw DimensionError("fuse: shapes " + num::shape_str(s_i2t.shape()) + " and " + num::shape_str(s_t2i.shape()) +
                         " differ");
  }
  return num::add(s_i2t, s_t2i);
}

Var score(num::Tape& tape, const num::ParamStore& params, const Var& s_star) {
  const Var w = tape.bind(params, names::kHeadW);
  const Var b = tape.bind(params, names::kHeadB);
  return num::add(num::sum(num::mul(s_star, w)), num::reshape(b, {}));
}

Var bidirectional_ranking_loss(const LossBatch& batch) {
  const auto& shape = batch.scores.shape();
  if (shape.size() != 2 || shape[0] != shape[1]) {
    throw DimensionError("ranking loss needs a square score matrix, got " + num::shape_str(shape));
  }
  const std::size_t B = shape[0];
  if (B < 2) throw ConfigError("ranking loss needs a batch of at least 2 pairs");
  if (!(batch.margin >= 0.0)) throw ConfigError("ranking loss margin must be non-negative");

  num::Tape& tape = *batch.scores.tape();
  num::Tensor eye = num::Tensor::identity(B);
  num::Tensor mask({B, B});
  for (std::size_t i = 0; i < B; ++i) mask.at(i, i) = kExcludeDiagonal;

  const Var positives = num::sum(num::mul(batch.scores, tape.constant(std::move(eye))), 1);  // s_kk
  const Var masked = num::add(batch.scores, tape.constant(std::move(mask)));
  const Var hardest_text = num::max(masked, 1);   // row k: best non-matching caption for image k
  const Var hardest_image = num::max(masked, 0);  // column k: best non-matching image for caption k

  const Var text_hinge = num::relu(num::shift(num::sub(hardest_text, positives), batch.margin));
  const Var image_hinge = num::relu(num::shift(num::sub(hardest_image, positives), batch.margin));
  return num::add(num::sum(text_hinge), num::sum(image_hinge));
}

}  // namespace tshsr::model
