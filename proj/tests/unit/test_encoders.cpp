#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "reference/reference_model.hpp"
#include "reference/test_support.hpp"
#include "tshsr/errors.hpp"
#include "tshsr/model/encoders.hpp"
#include "tshsr/numerics/gradcheck.hpp"
#include "tshsr/numerics/ops.hpp"

using namespace tshsr;
using namespace tshsr::num;
using namespace tshsr::model;
using testing_support::random_tensor;
using testing_support::random_tokens;
using testing_support::tiny_config;

namespace {

ParamStore projection(Tensor w, std::size_t d) {
  ParamStore ps;
  ps.add(names::kImageW, std::move(w));
  ps.add(names::kImageB, Tensor({d}));
  return ps;
}

double max_diff(const Tensor& t, const ref::Mat& m) {
  double worst = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) worst = std::max(worst, std::abs(t.at(i, j) - m[i][j]));
  return worst;
}

Tensor text(const ParamStore& ps, const std::vector<std::uint32_t>& tokens, std::size_t max_length = 16) {
  Tape t(false);
  return encode_text(t, ps, tokens, max_length).T.value();
}

}  // namespace

TEST(ProjectImage, IdentityProjection) {
  std::mt19937_64 rng(1);
  const Tensor raw = random_tensor(rng, {3, 5});
  const ParamStore ps = projection(Tensor::identity(5), 5);
  Tape t;
  EXPECT_EQ(project_image(t, ps, raw).V.value(), raw);
}

TEST(ProjectImage, ZeroInputZeroOutput) {
  std::mt19937_64 rng(2);
  const ParamStore ps = projection(random_tensor(rng, {8, 6}), 6);
  Tape t;
  EXPECT_EQ(project_image(t, ps, Tensor::zeros({4, 8})).V.value(), Tensor::zeros({4, 6}));
}

TEST(ProjectImage, MatchesLoopOracle) {
  std::mt19937_64 rng(3);
  const Tensor raw = random_tensor(rng, {4, 8});
  ParamStore ps;
  ps.add(names::kImageW, random_tensor(rng, {8, 6}));
  ps.add(names::kImageB, random_tensor(rng, {6}));
  Tape t;
  const Tensor V = project_image(t, ps, raw).V.value();
  const ref::Mat want = ref::project_image(ref::to_mat(raw), ref::to_mat(ps.at(names::kImageW)),
                                           ref::to_vec(ps.at(names::kImageB)));
  EXPECT_LT(max_diff(V, want), 1e-12);
}

TEST(ProjectImage, LinearWithoutBias) {
  std::mt19937_64 rng(4);
  const Tensor raw = random_tensor(rng, {3, 7});
  const ParamStore ps = projection(random_tensor(rng, {7, 4}), 4);
  Tensor scaled = raw;
  for (auto& v : scaled.data()) v *= -2.5;
  Tape t;
  const Tensor a = project_image(t, ps, raw).V.value(), b = project_image(t, ps, scaled).V.value();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], -2.5 * a[i], 1e-12);
}

TEST(ProjectImage, WrongWidthIsDimensionError) {
  const ParamStore ps = projection(Tensor::identity(5), 5);
  Tape t;
  EXPECT_THROW(project_image(t, ps, Tensor::zeros({3, 4})), DimensionError);
}

TEST(EncodeText, SingleToken) {
  const auto cfg = tiny_config();
  const ParamStore ps = init_params(cfg);
  const Tensor T = text(ps, {7});
  EXPECT_EQ(T.shape(), (Shape{1, cfg.joint_dim}));
  const ref::Mat embed = ref::to_mat(ps.at(names::kEmbed));
  const ref::Vec h0(cfg.joint_dim, 0.0);
  const ref::Vec f = ref::gru_step(embed[7], h0, ps, "fwd"), b = ref::gru_step(embed[7], h0, ps, "bwd");
  for (std::size_t j = 0; j < cfg.joint_dim; ++j) EXPECT_NEAR(T.at(0, j), 0.5 * (f[j] + b[j]), 1e-12);
}

TEST(EncodeText, SaturatedUpdateGateGivesCandidate) {
  const auto cfg = tiny_config();
  ParamStore ps = init_params(cfg);
  for (const char* dir : {"fwd", "bwd"}) {
    for (auto& v : ps.at(names::gru(dir, 'b', 'z')).data()) v = 60.0;
  }
  const Tensor T = text(ps, {3});
  // One step from h = 0 with z = 1: h = tanh(x W_n + b_n) per direction.
  const Tensor& x = ps.at(names::kEmbed);
  for (std::size_t j = 0; j < cfg.joint_dim; ++j) {
    double want = 0;
    for (const char* dir : {"fwd", "bwd"}) {
      const Tensor& wn = ps.at(names::gru(dir, 'w', 'n'));
      double a = ps.at(names::gru(dir, 'b', 'n'))[j];
      for (std::size_t i = 0; i < cfg.word_dim; ++i) a += x.at(3, i) * wn.at(i, j);
      want += 0.5 * std::tanh(a);
    }
    EXPECT_NEAR(T.at(0, j), want, 1e-12);
  }
}

TEST(EncodeText, MatchesScalarGru) {
  const auto cfg = tiny_config(5);
  const ParamStore ps = init_params(cfg);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto tokens = random_tokens(rng, 3, cfg.vocab_size);
    EXPECT_LT(max_diff(text(ps, tokens), ref::encode_text(tokens, ps)), 1e-10);
  }
}

TEST(EncodeText, BidirectionalSymmetry) {
  const auto cfg = tiny_config(7);
  const ParamStore ps = init_params(cfg);
  ParamStore swapped = ps;
  for (char kind : {'w', 'u', 'b'}) {
    for (char gate : {'z', 'r', 'n'}) {
      std::swap(swapped.at(names::gru("fwd", kind, gate)), swapped.at(names::gru("bwd", kind, gate)));
    }
  }
  const std::vector<std::uint32_t> tokens{4, 9, 1, 33};
  std::vector<std::uint32_t> reversed(tokens.rbegin(), tokens.rend());
  const Tensor a = text(ps, tokens), b = text(swapped, reversed);
  const std::size_t L = tokens.size();
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < cfg.joint_dim; ++j) EXPECT_NEAR(a.at(i, j), b.at(L - 1 - i, j), 1e-14);
}

TEST(EncodeText, Deterministic) {
  const ParamStore ps = init_params(tiny_config(8));
  EXPECT_EQ(text(ps, {1, 2, 3}), text(ps, {1, 2, 3}));
}

TEST(EncodeText, InvalidInputs) {
  const ParamStore ps = init_params(tiny_config());
  Tape t;
  EXPECT_THROW(encode_text(t, ps, std::vector<std::uint32_t>{}, 5), InputError);
  EXPECT_THROW(encode_text(t, ps, std::vector<std::uint32_t>{1, 50}, 5), InputError);
  EXPECT_THROW(encode_text(t, ps, std::vector<std::uint32_t>(6, 1), 5), InputError);
}

TEST(GlobalFeature, AllOnes) {
  Tape t;
  EXPECT_EQ(global_feature(t.constant(Tensor::ones({3, 4}))).vec.value(), Tensor::ones({4}));
}

TEST(GlobalFeature, SingleRowIsSquare) {
  Tape t;
  EXPECT_EQ(global_feature(t.constant(Tensor::matrix({{2, -3, 0.5}}))).vec.value(), Tensor::vector({4, 9, 0.25}));
}

TEST(GlobalFeature, MatchesLoopOracle) {
  std::mt19937_64 rng(9);
  const Tensor X = random_tensor(rng, {4, 6});
  Tape t;
  const Tensor got = global_feature(t.constant(X)).vec.value();
  const ref::Vec want = ref::global_feature(ref::to_mat(X));
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(got[j], want[j], 1e-12);
}

TEST(EncoderGradients, MatchFiniteDifferences) {
  auto cfg = tiny_config(10);
  cfg.joint_dim = 4;
  cfg.word_dim = 3;
  cfg.vocab_size = 6;
  cfg.raw_dim = 5;
  const ParamStore all = init_params(cfg);
  ParamStore ps;
  for (const auto& [name, value] : all) {
    if (name.rfind("image.", 0) == 0 || name.rfind("text.", 0) == 0) ps.add(name, value);
  }
  std::mt19937_64 rng(11);
  const Tensor raw = random_tensor(rng, {3, cfg.raw_dim});
  const std::vector<std::uint32_t> tokens{1, 4, 4, 0};
  auto loss = [&](Tape& t, const ParamStore& p) {
    const Var v = global_feature(project_image(t, p, raw).V).vec;
    const Var w = global_feature(encode_text(t, p, tokens, 8).T).vec;
    return sum(mul(v, w));
  };
  Tape tape;
  const GradMap analytic = tape.backward(loss(tape, ps), ps);
  const GradMap numeric = finite_diff_grad(
      [&](const ParamStore& p) {
        Tape t(false);
        return loss(t, p).value().item();
      },
      ps);
  for (const auto& e : compare_gradients(analytic, numeric, ps)) EXPECT_LT(e.max_relative_error, 1e-4) << e.name;
}
