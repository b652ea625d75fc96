#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "reference/reference_model.hpp"
#include "reference/test_support.hpp"
#include "tshsr/errors.hpp"
#include "tshsr/model/hsr.hpp"
#include "tshsr/numerics/gradcheck.hpp"
#include "tshsr/numerics/ops.hpp"

using namespace tshsr;
using namespace tshsr::num;
using namespace tshsr::model;
using testing_support::random_tensor;

namespace {

// Reasoning parameters for `layers` layers, magnitudes kept small so products stay O(1).
ParamStore hsr_params(std::size_t m, std::size_t layers, std::uint64_t seed, bool gate = true) {
  std::mt19937_64 rng(seed);
  ParamStore ps;
  for (std::size_t l = 0; l < layers; ++l) {
    for (const char* w : {"w_p", "w_q", "w_g", "w_r"}) ps.add(names::hsr(l, w), random_tensor(rng, {m, m}, 0.05, 0.6));
    if (gate) {
      ps.add(names::hsr(l, "gate_kernel"), random_tensor(rng, {3, 3}, 0.1, 1.0));
      ps.add(names::hsr(l, "gate_bias"), random_tensor(rng, {1}, 0.1, 0.5));
    }
  }
  return ps;
}

SimilarityNodeSet nodes_of(Tape& t, const Tensor& S) { return {t.constant(S), Stream::i2t}; }

double max_diff(const Tensor& t, const ref::Mat& m) {
  double worst = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) worst = std::max(worst, std::abs(t.at(i, j) - m[i][j]));
  return worst;
}

}  // namespace

TEST(RelationMatrix, IdentityEmbeddingsOrthogonalRows) {
  ParamStore ps;
  ps.add(names::hsr(0, "w_p"), Tensor::identity(3));
  ps.add(names::hsr(0, "w_q"), Tensor::identity(3));
  const Tensor S = Tensor::matrix({{2, 0, 0}, {0, -1, 0}, {0, 0, 3}});
  Tape t;
  const auto rel = relation_matrix(t, ps, 0, nodes_of(t, S));
  EXPECT_FALSE(rel.gated);
  EXPECT_EQ(rel.R.value(), Tensor::matrix({{4, 0, 0}, {0, 1, 0}, {0, 0, 9}}));
}

TEST(RelationMatrix, ZeroEmbeddingGivesZero) {
  std::mt19937_64 rng(1);
  ParamStore ps;
  ps.add(names::hsr(0, "w_p"), Tensor::zeros({4, 4}));
  ps.add(names::hsr(0, "w_q"), random_tensor(rng, {4, 4}));
  Tape t;
  EXPECT_EQ(relation_matrix(t, ps, 0, nodes_of(t, random_tensor(rng, {3, 4}))).R.value(), Tensor::zeros({3, 3}));
}

TEST(RelationMatrix, MatchesPairwiseLoop) {
  std::mt19937_64 rng(2);
  const ParamStore ps = hsr_params(5, 1, 3);
  const Tensor S = random_tensor(rng, {4, 5});
  Tape t;
  const Tensor R = relation_matrix(t, ps, 0, nodes_of(t, S)).R.value();
  const ref::Mat want =
      ref::relation(ref::to_mat(S), ref::to_mat(ps.at(names::hsr(0, "w_p"))), ref::to_mat(ps.at(names::hsr(0, "w_q"))));
  EXPECT_LT(max_diff(R, want), 1e-12);
}

TEST(GateRelations, ZeroKernelHalves) {
  std::mt19937_64 rng(4);
  ParamStore ps;
  ps.add(names::hsr(0, "gate_kernel"), Tensor::zeros({3, 3}));
  ps.add(names::hsr(0, "gate_bias"), Tensor({1}));
  const Tensor R = random_tensor(rng, {4, 4});
  Tape t;
  const auto gated = gate_relations(t, ps, 0, {t.constant(R), false});
  EXPECT_TRUE(gated.gated);
  Tensor half = R;
  for (auto& v : half.data()) v *= 0.5;
  EXPECT_EQ(gated.R.value(), half);
}

TEST(GateRelations, SaturatedBiasPassesThrough) {
  std::mt19937_64 rng(5);
  ParamStore ps;
  ps.add(names::hsr(0, "gate_kernel"), Tensor::zeros({3, 3}));
  ps.add(names::hsr(0, "gate_bias"), Tensor::vector({20.0}));
  const Tensor R = random_tensor(rng, {4, 4});
  Tape t;
  EXPECT_LT(max_abs_diff(gate_relations(t, ps, 0, {t.constant(R), false}).R.value(), R), 1e-8);
}

TEST(GateRelations, MatchesComposedOracle) {
  std::mt19937_64 rng(6);
  const ParamStore ps = hsr_params(2, 1, 7);
  const Tensor R = random_tensor(rng, {5, 5});
  Tape t;
  const Tensor got = gate_relations(t, ps, 0, {t.constant(R), false}).R.value();
  const ref::Mat want = ref::gate(ref::to_mat(R), ref::to_mat(ps.at(names::hsr(0, "gate_kernel"))),
                                  ps.at(names::hsr(0, "gate_bias"))[0]);
  EXPECT_LT(max_diff(got, want), 1e-10);
}

TEST(GateRelations, GateIsBounded) {
  std::mt19937_64 rng(8);
  const ParamStore ps = hsr_params(2, 1, 9);
  const Tensor R = random_tensor(rng, {6, 6});
  Tape t;
  const Tensor got = gate_relations(t, ps, 0, {t.constant(R), false}).R.value();
  for (std::size_t i = 0; i < R.size(); ++i) EXPECT_LT(std::abs(got[i]), std::abs(R[i]));
}

TEST(GateRelations, DoubleGatingIsContractError) {
  const ParamStore ps = hsr_params(2, 1, 10);
  Tape t;
  const auto once = gate_relations(t, ps, 0, {t.constant(Tensor::ones({3, 3})), false});
  EXPECT_THROW(gate_relations(t, ps, 0, once), ContractError);
}

TEST(ReasonStep, ZeroUpdateIsResidual) {
  std::mt19937_64 rng(11);
  ParamStore ps = hsr_params(4, 1, 12);
  ps.at(names::hsr(0, "w_r")) = Tensor::zeros({4, 4});
  const Tensor S = random_tensor(rng, {3, 4});
  Tape t;
  EXPECT_EQ(reason_step(t, ps, 0, nodes_of(t, S)).S.value(), S);
}

TEST(ReasonStep, MatchesLoopOracle) {
  std::mt19937_64 rng(13);
  for (bool hier : {true, false}) {
    for (bool soft : {false, true}) {
      const ParamStore ps = hsr_params(4, 1, 14, hier);
      const Tensor S = random_tensor(rng, {3, 4});
      Tape t;
      const Tensor got = reason_step(t, ps, 0, nodes_of(t, S), {hier, soft}).S.value();
      EXPECT_LT(max_diff(got, ref::reason_step(ref::to_mat(S), ps, 0, hier, soft)), 1e-9) << hier << soft;
    }
  }
}

TEST(ReasonStep, PreservesShape) {
  std::mt19937_64 rng(15);
  for (std::size_t N : {2, 3, 7}) {
    for (std::size_t m : {1, 3, 5}) {
      const ParamStore ps = hsr_params(m, 1, 16);
      Tape t;
      EXPECT_EQ(reason_step(t, ps, 0, nodes_of(t, random_tensor(rng, {N, m}))).S.shape(), (Shape{N, m}));
    }
  }
}

TEST(Reason, SingleLayerIsStepThenReadout) {
  std::mt19937_64 rng(17);
  const ParamStore ps = hsr_params(4, 1, 18);
  const Tensor S = random_tensor(rng, {4, 4});
  Tape t;
  const Tensor out = reason(t, ps, nodes_of(t, S), 1).value();
  const Tensor step = reason_step(t, ps, 0, nodes_of(t, S)).S.value();
  for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(out[a], step.at(3, a));
}

TEST(Reason, GateIsTheOnlyDifference) {
  std::mt19937_64 rng(19);
  const ParamStore ps = hsr_params(4, 1, 20);
  const Tensor S = random_tensor(rng, {4, 4});
  Tape t;
  const auto nodes = nodes_of(t, S);
  const Tensor on = reason_step(t, ps, 0, nodes, {true, false}).S.value();
  const Tensor off = reason_step(t, ps, 0, nodes, {false, false}).S.value();
  const auto rel = relation_matrix(t, ps, 0, nodes);
  const Tensor R = rel.R.value(), Rg = gate_relations(t, ps, 0, rel).R.value();
  // on - off = ((R' - R) S) W_g^T W_r^T
  const ref::Mat Wg = ref::to_mat(ps.at(names::hsr(0, "w_g"))), Wr = ref::to_mat(ps.at(names::hsr(0, "w_r")));
  for (std::size_t p = 0; p < 4; ++p) {
    ref::Vec agg(4, 0.0), g(4, 0.0);
    for (std::size_t q = 0; q < 4; ++q)
      for (std::size_t b = 0; b < 4; ++b) agg[b] += (Rg.at(p, q) - R.at(p, q)) * S.at(q, b);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) g[a] += Wg[a][b] * agg[b];
    for (std::size_t a = 0; a < 4; ++a) {
      double d = 0;
      for (std::size_t b = 0; b < 4; ++b) d += Wr[a][b] * g[b];
      EXPECT_NEAR(on.at(p, a) - off.at(p, a), d, 1e-12);
    }
  }
  EXPECT_GT(max_abs_diff(on, off), 1e-6);
}

TEST(Reason, TwoLayersMatchOracle) {
  std::mt19937_64 rng(21);
  const ParamStore ps = hsr_params(4, 2, 22);
  const Tensor S = random_tensor(rng, {3, 4});
  Tape t;
  const Tensor out = reason(t, ps, nodes_of(t, S), 2).value();
  ref::Mat want = ref::to_mat(S);
  for (std::size_t l = 0; l < 2; ++l) want = ref::reason_step(want, ps, l, true, false);
  for (std::size_t a = 0; a < 4; ++a) EXPECT_NEAR(out[a], want.back()[a], 1e-8);
}

TEST(Reason, ZeroUpdatesReturnGlobalNode) {
  std::mt19937_64 rng(23);
  ParamStore ps = hsr_params(5, 3, 24);
  for (std::size_t l = 0; l < 3; ++l) ps.at(names::hsr(l, "w_r")) = Tensor::zeros({5, 5});
  const Tensor local = random_tensor(rng, {4, 5}), global = random_tensor(rng, {5});
  Tape t;
  const auto nodes = make_node_set(t.constant(local), t.constant(global), Stream::i2t);
  EXPECT_EQ(reason(t, ps, nodes, 3).value(), global);
}

TEST(Reason, WordOrderMatters) {
  std::mt19937_64 rng(25);
  const ParamStore gated = hsr_params(4, 2, 26, true), plain = hsr_params(4, 2, 26, false);
  const Tensor local = random_tensor(rng, {4, 4}), global = random_tensor(rng, {4});
  Tensor permuted = local;
  for (std::size_t a = 0; a < 4; ++a) std::swap(permuted.at(0, a), permuted.at(2, a));
  Tape t;
  auto run = [&](const ParamStore& ps, const Tensor& rows, bool hier) {
    return reason(t, ps, make_node_set(t.constant(rows), t.constant(global), Stream::i2t), 2, {hier, false}).value();
  };
  // The convolutional gate sees node order; the ungated update does not.
  EXPECT_GT(max_abs_diff(run(gated, local, true), run(gated, permuted, true)), 1e-6);
  EXPECT_LT(max_abs_diff(run(plain, local, false), run(plain, permuted, false)), 1e-12);
}

TEST(Reason, ZeroStepsIsConfigError) {
  const ParamStore ps = hsr_params(3, 1, 27);
  Tape t;
  EXPECT_THROW(reason(t, ps, nodes_of(t, Tensor::ones({3, 3})), 0), ConfigError);
}

TEST(Reason, GradientsThroughThreeLayers) {
  std::mt19937_64 rng(28);
  ParamStore ps = hsr_params(3, 3, 29);
  ps.add("local", random_tensor(rng, {3, 3}, 0.1, 1.0));
  ps.add("global", random_tensor(rng, {3}, 0.1, 1.0));
  const Tensor probe = random_tensor(rng, {3});
  auto loss = [&](Tape& t, const ParamStore& p) {
    const auto nodes = make_node_set(t.bind(p, "local"), t.bind(p, "global"), Stream::i2t);
    return sum(mul(reason(t, p, nodes, 3), t.constant(probe)));
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
