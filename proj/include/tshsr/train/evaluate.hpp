#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tshsr/data/dataset.hpp"
#include "tshsr/model/model.hpp"
#include "tshsr/numerics/tensor.hpp"

namespace tshsr::train {

enum class RetrievalDirection { sentence_retrieval, image_retrieval };
std::string to_string(RetrievalDirection dir);

inline constexpr std::array<std::size_t, 3> kRecallKs{1, 5, 10};

struct RetrievalResult {
  RetrievalDirection direction;
  std::array<double, 3> recall{};  // percentages at kRecallKs
  double r_at(std::size_t k) const;
  double sum() const { return recall[0] + recall[1] + recall[2]; }
};

/// Sum of every recall in `results` (all six when both directions are present).
double rsum(std::span<const RetrievalResult> results);

/// [images x captions] score matrix; rows are computed independently and may be
/// spread over `threads` workers (0 = hardware concurrency).
num::Tensor score_matrix(const model::Model& model, const data::Dataset& ds, std::size_t threads = 1);

/// Recall@{1,5,10} in both directions from a score matrix whose column c belongs
/// to image caption_image[c]. Sentence retrieval hits when any caption of the
/// query image ranks within k; image retrieval hits when the caption's image does.
/// Ties rank the lower candidate index first. With folds > 1 images are split
/// into equal contiguous folds (with their captions) and recalls are averaged.
/// Throws ConfigError if folds is 0 or does not divide the image count.
std::vector<RetrievalResult> evaluate_scores(const num::Tensor& scores, std::span<const std::size_t> caption_image,
                                             std::size_t folds = 1);

/// Owning image of every caption column, in bundle order.
std::vector<std::size_t> caption_owners(const data::Dataset& ds);

std::vector<RetrievalResult> evaluate(const model::Model& model, const data::Dataset& ds, std::size_t folds = 1,
                                      std::size_t threads = 1);

}  // namespace tshsr::train
