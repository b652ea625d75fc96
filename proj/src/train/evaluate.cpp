#include "tshsr/train/evaluate.hpp"

#include <algorithm>
#include <thread>

#include "tshsr/errors.hpp"

namespace tshsr::train {

std::string to_string(RetrievalDirection dir) {
  return dir == RetrievalDirection::sentence_retrieval ? "sentence_retrieval" : "image_retrieval";
}

double RetrievalResult::r_at(std::size_t k) const {
  for (std::size_t i = 0; i < kRecallKs.size(); ++i) {
    if (kRecallKs[i] == k) return recall[i];
  }
  throw ContractError("recall is only tracked at K = 1, 5, 10");
}

double rsum(std::span<const RetrievalResult> results) {
  double s = 0.0;
  for (const auto& r : results) s += r.sum();
  return s;
}

std::vector<std::size_t> caption_owners(const data::Dataset& ds) {
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < ds.bundles.size(); ++i) owners.insert(owners.end(), ds.bundles[i].captions.size(), i);
  return owners;
}

num::Tensor score_matrix(const model::Model& model, const data::Dataset& ds, std::size_t threads) {
  const std::size_t n_img = ds.bundles.size();
  const std::size_t n_cap = ds.caption_count();
  if (n_img == 0 || n_cap == 0) throw ConfigError("score_matrix: dataset is empty");

  // Encoders depend on one side only, so encode every image and caption once.
  std::vector<num::Tensor> images, texts;
  {
    num::Tape tape(false);
    for (const auto& b : ds.bundles) {
      images.push_back(model.encode_image(tape, b.regions).V.value());
      for (const auto& c : b.captions) texts.push_back(model.encode_text(tape, c).T.value());
    }
  }

  num::Tensor scores({n_img, n_cap});
  auto run_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      num::Tape tape(false);
      const model::ImageLocalFeatures image{tape.constant(images[i])};
      for (std::size_t c = 0; c < n_cap; ++c) {
        const model::TextLocalFeatures text{tape.constant(texts[c])};
        scores.at(i, c) = model.score_pair(tape, image, text).score.value().item();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_img);
  if (threads <= 1) {
    run_rows(0, n_img);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n_img + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n_img; begin += chunk) {
      workers.emplace_back(run_rows, begin, std::min(n_img, begin + chunk));
    }
  }
  return scores;
}

namespace {

// Position of candidate `target` when candidates are sorted by descending score,
// ties broken by lower index.
std::size_t rank_of(std::span<const double> candidate_scores, std::size_t target) {
  const double s = candidate_scores[target];
  std::size_t rank = 0;
  for (std::size_t j = 0; j < candidate_scores.size(); ++j) {
    if (candidate_scores[j] > s || (candidate_scores[j] == s && j < target)) ++rank;
  }
  return rank;
}

std::vector<RetrievalResult> recall_single(const num::Tensor& scores, std::span<const std::size_t> owner) {
  const std::size_t n_img = scores.rows(), n_cap = scores.cols();
  std::array<double, 3> sent{}, img{};

  std::vector<double> row(n_cap);
  for (std::size_t i = 0; i < n_img; ++i) {
    for (std::size_t c = 0; c < n_cap; ++c) row[c] = scores.at(i, c);
    std::size_t best = n_cap;
    for (std::size_t c = 0; c < n_cap; ++c) {
      if (owner[c] == i) best = std::min(best, rank_of(row, c));
    }
    for (std::size_t k = 0; k < kRecallKs.size(); ++k) sent[k] += best < kRecallKs[k] ? 1.0 : 0.0;
  }

  std::vector<double> col(n_img);
  for (std::size_t c = 0; c < n_cap; ++c) {
    for (std::size_t i = 0; i < n_img; ++i) col[i] = scores.at(i, c);
    const std::size_t r = rank_of(col, owner[c]);
    for (std::size_t k = 0; k < kRecallKs.size(); ++k) img[k] += r < kRecallKs[k] ? 1.0 : 0.0;
  }

  RetrievalResult s{RetrievalDirection::sentence_retrieval, {}};
  RetrievalResult m{RetrievalDirection::image_retrieval, {}};
  for (std::size_t k = 0; k < kRecallKs.size(); ++k) {
    s.recall[k] = 100.0 * sent[k] / static_cast<double>(n_img);
    m.recall[k] = 100.0 * img[k] / static_cast<double>(n_cap);
  }
  return {s, m};
}

}  // namespace

std::vector<RetrievalResult> evaluate_scores(const num::Tensor& scores, std::span<const std::size_t> caption_image,
                                             std::size_t folds) {
  if (scores.rank() != 2 || scores.cols() != caption_image.size()) {
    throw DimensionError("evaluate_scores: score matrix " + num::shape_str(scores.shape()) + " does not match " +
                         std::to_string(caption_image.size()) + " captions");
  }
  const std::size_t n_img = scores.rows();
  for (auto owner : caption_image) {
    if (owner >= n_img) throw ContractError("evaluate_scores: caption owner out of range");
  }
  if (folds == 0 || n_img % folds != 0) {
    throw ConfigError("evaluate: " + std::to_string(folds) + " folds do not evenly divide " + std::to_string(n_img) +
                      " images");
  }
  if (folds == 1) return recall_single(scores, caption_image);

  const std::size_t fold_size = n_img / folds;
  std::vector<RetrievalResult> total{{RetrievalDirection::sentence_retrieval, {}},
                                     {RetrievalDirection::image_retrieval, {}}};
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * fold_size, hi = lo + fold_size;
    std::vector<std::size_t> cols, owners;
    for (std::size_t c = 0; c < caption_image.size(); ++c) {
      if (caption_image[c] >= lo && caption_image[c] < hi) {
        cols.push_back(c);
        owners.push_back(caption_image[c] - lo);
      }
    }
    if (cols.empty()) throw ConfigError("evaluate: fold " + std::to_string(f) + " has no captions");
    num::Tensor sub({fold_size, cols.size()});
    for (std::size_t i = 0; i < fold_size; ++i) {
      for (std::size_t c = 0; c < cols.size(); ++c) sub.at(i, c) = scores.at(lo + i, cols[c]);
    }
    const auto part = recall_single(sub, owners);
    for (std::size_t d = 0; d < 2; ++d) {
      for (std::size_t k = 0; k < kRecallKs.size(); ++k) total[d].recall[k] += part[d].recall[k];
    }
  }
  for (auto& r : total) {
    for (auto& v : r.recall) v /= static_cast<double>(folds);
  }
  return total;
}

std::vector<RetrievalResult> evaluate(const model::Model& model, const data::Dataset& ds, std::size_t folds,
                                      std::size_t threads) {
  if (folds == 0 || ds.bundles.empty() || ds.bundles.size() % folds != 0) {
    throw ConfigError("evaluate: " + std::to_string(folds) + " folds do not evenly divide " +
                      std::to_string(ds.bundles.size()) + " images");
  }
  const auto owners = caption_owners(ds);
  return evaluate_scores(score_matrix(model, ds, threads), owners, folds);
}

}  // namespace tshsr::train
