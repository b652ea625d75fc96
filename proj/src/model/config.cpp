#include "tshsr/model/config.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "tshsr/errors.hpp"

namespace tshsr::model {

std::string_view to_string(StreamMode mode) {
  switch (mode) {
    case StreamMode::both: return "both";
    case StreamMode::i2t_only: return "i2t_only";
    case StreamMode::t2i_only: return "t2i_only";
  }
  return "both";
}

StreamMode parse_stream_mode(std::string_view text) {
  if (text == "both") return StreamMode::both;
  if (text == "i2t_only") return StreamMode::i2t_only;
  if (text == "t2i_only") return StreamMode::t2i_only;
  throw ConfigError("unknown stream mode '" + std::string(text) + "' (expected both, i2t_only or t2i_only)");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ConfigError(std::string(what) + " must be at least 1");
  };
  positive(raw_dim, "raw_dim");
  positive(joint_dim, "joint_dim");
  positive(word_dim, "word_dim");
  positive(vocab_size, "vocab_size");
  positive(max_length, "max_length");
  positive(sim_dim, "sim_dim");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
}

namespace names {

std::string gru(std::string_view direction, char kind, char gate) {
  return "text.gru." + std::string(direction) + "." + kind + "_" + gate;
}

std::string hsr(std::size_t layer, std::string_view what) {
  return "hsr." + std::to_string(layer) + "." + std::string(what);
}

std::string sim_global(const ModelConfig& cfg) { return cfg.share_similarity_weights ? kSimShared : kSimGlobal; }
std::string sim_i2t(const ModelConfig& cfg) { return cfg.share_similarity_weights ? kSimShared : kSimI2t; }
std::string sim_t2i(const ModelConfig& cfg) { return cfg.share_similarity_weights ? kSimShared : kSimT2i; }

}  // namespace names

namespace {

num::Tensor uniform(const ModelConfig& cfg, const std::string& name, num::Shape shape, std::size_t fan_in) {
  std::vector<std::uint32_t> seed_words{static_cast<std::uint32_t>(cfg.seed),
                                        static_cast<std::uint32_t>(cfg.seed >> 32)};
  seed_words.insert(seed_words.end(), name.begin(), name.end());
  std::seed_seq seq(seed_words.begin(), seed_words.end());
  std::mt19937_64 rng(seq);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  num::Tensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

}  // namespace

num::ParamStore init_params(const ModelConfig& cfg) {
  cfg.validate();
  num::ParamStore ps;
  const std::size_t d = cfg.joint_dim, m = cfg.sim_dim, w = cfg.word_dim;

  ps.add(names::kImageW, uniform(cfg, names::kImageW, {cfg.raw_dim, d}, cfg.raw_dim));
  ps.add(names::kImageB, num::Tensor({d}));
  // A lookup feeds exactly one table row into each output, so the fan-in is 1.
  ps.add(names::kEmbed, uniform(cfg, names::kEmbed, {cfg.vocab_size, w}, 1));
  for (const char* dir : {"fwd", "bwd"}) {
    for (char gate : {'z', 'r', 'n'}) {
      const auto wn = names::gru(dir, 'w', gate);
      const auto un = names::gru(dir, 'u', gate);
      ps.add(wn, uniform(cfg, wn, {w, d}, w));
      ps.add(un, uniform(cfg, un, {d, d}, d));
      ps.add(names::gru(dir, 'b', gate), num::Tensor({d}));
    }
  }

  auto add_sim = [&](const std::string& name) {
    if (!ps.contains(name)) ps.add(name, uniform(cfg, name, {m, d}, d));
  };
  add_sim(names::sim_global(cfg));
  if (cfg.uses_i2t()) {
    add_sim(names::sim_i2t(cfg));
    for (std::size_t l = 0; l < cfg.reasoning_steps; ++l) {
      for (const char* what : {"w_p", "w_q", "w_g", "w_r"}) {
        const auto n = names::hsr(l, what);
        ps.add(n, uniform(cfg, n, {m, m}, m));
      }
      if (cfg.hierarchical) {
        const auto k = names::hsr(l, "gate_kernel");
        ps.add(k, uniform(cfg, k, {3, 3}, 9));
        ps.add(names::hsr(l, "gate_bias"), num::Tensor({1}));
      }
    }
  }
  if (cfg.uses_t2i()) add_sim(names::sim_t2i(cfg));

  ps.add(names::kHeadW, uniform(cfg, names::kHeadW, {m}, m));
  ps.add(names::kHeadB, num::Tensor({1}));
  return ps;
}

}  // namespace tshsr::model
