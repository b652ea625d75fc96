#pragma once

// Scalar nested-loop re-implementation of the whole scoring path. It shares no
// code with the tape-based production model and is used only as a test oracle.

#include <cstdint>
#include <vector>

#include "tshsr/model/config.hpp"
#include "tshsr/numerics/param_store.hpp"

namespace ref {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

Mat to_mat(const tshsr::num::Tensor& t);
Vec to_vec(const tshsr::num::Tensor& t);

Mat matmul(const Mat& a, const Mat& b);
Mat project_image(const Mat& raw, const Mat& w, const Vec& b);
Mat encode_text(const std::vector<std::uint32_t>& tokens, const tshsr::num::ParamStore& ps);
Vec gru_step(const Vec& x, const Vec& h, const tshsr::num::ParamStore& ps, const char* dir);
Vec global_feature(const Mat& X);
Vec sim_vec(const Vec& x, const Vec& y, const Mat& W);
/// [K x L] weights; i2t normalises columns, t2i normalises rows.
Mat attention(const Mat& V, const Mat& T, double lambda, bool i2t);
Mat relation(const Mat& S, const Mat& Wp, const Mat& Wq);
Mat conv3x3(const Mat& R, const Mat& k, double bias);
Mat gate(const Mat& R, const Mat& k, double bias);
Mat reason_step(const Mat& S, const tshsr::num::ParamStore& ps, std::size_t layer, bool hierarchical,
                bool row_softmax);

struct Local {
  Vec global;
  Mat i2t;  // L x m
  Mat t2i;  // K x m
};
Local local_similarities(const Mat& V, const Mat& T, const tshsr::num::ParamStore& ps,
                         const tshsr::model::ModelConfig& cfg);

/// Fused similarity vector of one pair given encoded features.
Vec fused(const Mat& V, const Mat& T, const tshsr::num::ParamStore& ps, const tshsr::model::ModelConfig& cfg);

/// End-to-end score from raw regions and token ids.
double score(const Mat& raw, const std::vector<std::uint32_t>& tokens, const tshsr::num::ParamStore& ps,
             const tshsr::model::ModelConfig& cfg);

/// Hardest-negative hinge loss summed over the batch, by direct enumeration.
double ranking_loss(const Mat& scores, double margin);

}  // namespace ref
