#pragma once

#include <cstdint>
#include <span>

#include "tshsr/model/attention.hpp"
#include "tshsr/model/config.hpp"
#include "tshsr/model/encoders.hpp"
#include "tshsr/model/fusion.hpp"
#include "tshsr/model/hsr.hpp"
#include "tshsr/numerics/param_store.hpp"
#include "tshsr/numerics/tape.hpp"

namespace tshsr::model {

using TokenSpan = std::span<const std::uint32_t>;

/// Two-stream matching model: configuration plus its parameter set.
///
/// Scoring a pair runs local similarities, the i2t reasoning stack (or the raw
/// global node when reasoning_steps == 0), t2i pooling, fusion, and the linear
/// head. All methods are const and only read parameters, so several tapes may
/// evaluate one model concurrently.
class Model {
 public:
  explicit Model(ModelConfig cfg);
  /// Adopts existing parameters; throws ConfigError if names or shapes differ
  /// from what `cfg` requires.
  Model(ModelConfig cfg, num::ParamStore params);

  const ModelConfig& config() const { return cfg_; }
  const num::ParamStore& params() const { return params_; }
  num::ParamStore& params() { return params_; }

  ImageLocalFeatures encode_image(num::Tape& tape, const num::Tensor& regions) const;
  TextLocalFeatures encode_text(num::Tape& tape, TokenSpan tokens) const;

  PairScore score_pair(num::Tape& tape, const ImageLocalFeatures& image, const TextLocalFeatures& text) const;

  /// [images x texts] grid of pair scores.
  num::Var score_grid(num::Tape& tape, std::span<const ImageLocalFeatures> images,
                      std::span<const TextLocalFeatures> texts) const;

  /// Ranking loss over matched (images[k], captions[k]) pairs.
  num::Var batch_loss(num::Tape& tape, std::span<const num::Tensor* const> images, std::span<const TokenSpan> captions,
                      double margin) const;

  /// Score of one pair without recording gradients.
  double score(const num::Tensor& regions, TokenSpan tokens) const;

 private:
  ModelConfig cfg_;
  num::ParamStore params_;
};

}  // namespace tshsr::model
