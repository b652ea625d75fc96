#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "tshsr/data/dataset.hpp"
#include "tshsr/model/model.hpp"
#include "tshsr/train/adam.hpp"
#include "tshsr/train/evaluate.hpp"

namespace tshsr::train {

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t epochs = 20;
  double lr = 2e-4;
  /// First epoch (0-based) trained at lr * lr_decay; equal to `epochs` disables decay.
  std::size_t decay_epoch = 10;
  double lr_decay = 0.1;
  double margin = 0.2;
  /// Stop after this many optimizer steps; 0 means no limit.
  std::size_t max_steps = 0;
  std::uint64_t seed = 0;
  AdamHyper adam{};
  std::size_t eval_threads = 1;

  /// Throws ConfigError on batch_size < 2, zero epochs, negative lr or margin,
  /// or decay_epoch > epochs.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  std::optional<double> val_rsum;
};

struct TrainResult {
  std::vector<double> losses;  // one per optimizer step
  std::vector<EpochRecord> epochs;
  std::size_t steps = 0;
  /// Epoch whose parameters were kept (best validation rsum, or the last epoch).
  std::size_t selected_epoch = 0;
  std::optional<double> best_val_rsum;
};

/// Optional per-step observer: (step, epoch, loss).
using StepCallback = std::function<void(std::size_t, std::size_t, double)>;

/// Trains `model` in place with per-epoch seeded shuffling, B x B score grids,
/// the hardest-negative ranking loss and Adam. With a validation set the
/// parameters of the epoch with the highest rsum (earliest on ties) are kept.
TrainResult train(model::Model& model, const data::Dataset& train_set, const TrainConfig& config,
                  const data::Dataset* val_set = nullptr, const StepCallback& on_step = {});

/// Writes "step,loss" rows.
void write_loss_csv(const std::filesystem::path& path, std::span<const double> losses);

}  // namespace tshsr::train
