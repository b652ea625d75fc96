#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tshsr/numerics/param_store.hpp"

namespace tshsr::model {

/// Which similarity streams feed the fused representation.
enum class StreamMode { both, i2t_only, t2i_only };

std::string_view to_string(StreamMode mode);
/// Accepts "both", "i2t_only", "t2i_only"; throws ConfigError otherwise.
StreamMode parse_stream_mode(std::string_view text);

struct ModelConfig {
  std::size_t raw_dim = 2048;     // region feature width
  std::size_t joint_dim = 1024;   // d, shared by regions and words
  std::size_t word_dim = 300;     // word embedding width
  std::size_t vocab_size = 10000;
  std::size_t max_length = 64;    // longest accepted caption
  std::size_t sim_dim = 256;      // m
  std::size_t reasoning_steps = 3;  // M; 0 bypasses reasoning entirely
  double lambda = 9.0;            // attention temperature
  bool hierarchical = true;       // convolutional gate on the relation matrix
  bool row_softmax = false;       // softmax-normalise relation rows before the update
  bool share_similarity_weights = false;
  StreamMode stream = StreamMode::both;
  std::uint64_t seed = 0;

  bool uses_i2t() const { return stream != StreamMode::t2i_only; }
  bool uses_t2i() const { return stream != StreamMode::i2t_only; }

  /// Throws ConfigError on zero sizes or non-positive temperature.
  void validate() const;
};

/// Stable parameter names.
namespace names {
inline constexpr const char* kImageW = "image.proj.w";  // [raw_dim x d]
inline constexpr const char* kImageB = "image.proj.b";  // [d]
inline constexpr const char* kEmbed = "text.embed";     // [vocab x word_dim]
inline constexpr const char* kSimShared = "sim.w";      // [m x d], when shared
inline constexpr const char* kSimGlobal = "sim.w_g";
inline constexpr const char* kSimI2t = "sim.w_i2t";
inline constexpr const char* kSimT2i = "sim.w_t2i";
inline constexpr const char* kHeadW = "head.w";  // [m]
inline constexpr const char* kHeadB = "head.b";  // [1]

/// GRU block for direction "fwd" or "bwd"; gate in {z, r, n}, kind in {w, u, b}.
std::string gru(std::string_view direction, char kind, char gate);
/// Per-layer reasoning parameter, e.g. hsr(1, "w_p") == "hsr.1.w_p".
std::string hsr(std::size_t layer, std::string_view what);

std::string sim_global(const ModelConfig& cfg);
std::string sim_i2t(const ModelConfig& cfg);
std::string sim_t2i(const ModelConfig& cfg);
}  // namespace names

/// Fresh parameters for `cfg`: uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for matrices,
/// zeros for biases. Each tensor is seeded from (cfg.seed, name), so values do not
/// depend on which other parameters exist.
num::ParamStore init_params(const ModelConfig& cfg);

}  // namespace tshsr::model
