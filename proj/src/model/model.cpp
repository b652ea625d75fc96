#include "tshsr/model/model.hpp"

#include <vector>

#include "tshsr/errors.hpp"
#include "tshsr/numerics/ops.hpp"

namespace tshsr::model {

using num::Var;

Model::Model(ModelConfig cfg) : cfg_(cfg), params_(init_params(cfg)) {}

Model::Model(ModelConfig cfg, num::ParamStore params) : cfg_(cfg), params_(std::move(params)) {
  const num::ParamStore expected = init_params(cfg_);
  if (expected.names() != params_.names()) {
    throw ConfigError("parameter names do not match the model configuration");
  }
  for (const auto& [name, tensor] : expected) {
    if (params_.at(name).shape() != tensor.shape()) {
      throw ConfigError("parameter '" + name + "' has shape " + num::shape_str(params_.at(name).shape()) +
                        ", configuration requires " + num::shape_str(tensor.shape()));
    }
  }
}

ImageLocalFeatures Model::encode_image(num::Tape& tape, const num::Tensor& regions) const {
  return project_image(tape, params_, regions);
}

TextLocalFeatures Model::encode_text(num::Tape& tape, TokenSpan tokens) const {
  return model::encode_text(tape, params_, tokens, cfg_.max_length);
}

PairScore Model::score_pair(num::Tape& tape, const ImageLocalFeatures& image, const TextLocalFeatures& text) const {
  const LocalSimilarities local = local_similarities(tape, params_, cfg_, image.V, text.T);

  Var i2t, t2i;
  if (cfg_.uses_i2t()) {
    if (cfg_.reasoning_steps == 0) {
      i2t = local.global;
    } else {
      const auto nodes = make_node_set(local.i2t, local.global, Stream::i2t);
      i2t = reason(tape, params_, nodes, cfg_.reasoning_steps, {cfg_.hierarchical, cfg_.row_softmax});
    }
  }
  if (cfg_.uses_t2i()) t2i = pool_t2i(make_node_set(local.t2i, local.global, Stream::t2i));

  const Var s_star = fuse(i2t, t2i, cfg_.stream);
  return {model::score(tape, params_, s_star), s_star};
}

Var Model::score_grid(num::Tape& tape, std::span<const ImageLocalFeatures> images,
                      std::span<const TextLocalFeatures> texts) const {
  std::vector<Var> rows;
  rows.reserve(images.size());
  for (const auto& image : images) {
    std::vector<Var> row;
    row.reserve(texts.size());
    for (const auto& text : texts) row.push_back(score_pair(tape, image, text).score);
    rows.push_back(num::stack(row));
  }
  return num::stack(rows);
}

Var Model::batch_loss(num::Tape& tape, std::span<const num::Tensor* const> images, std::span<const TokenSpan> captions,
                      double margin) const {
  if (images.size() != captions.size()) throw ContractError("batch_loss: image and caption counts differ");
  std::vector<ImageLocalFeatures> enc_images;
  std::vector<TextLocalFeatures> enc_texts;
  for (const auto* regions : images) enc_images.push_back(encode_image(tape, *regions));
  for (const auto& tokens : captions) enc_texts.push_back(encode_text(tape, tokens));
  return bidirectional_ranking_loss({score_grid(tape, enc_images, enc_texts), margin});
}

double Model::score(const num::Tensor& regions, TokenSpan tokens) const {
  num::Tape tape(false);
  const auto image = encode_image(tape, regions);
  const auto text = encode_text(tape, tokens);
  return score_pair(tape, image, text).score.value().item();
}

}  // namespace tshsr::model
