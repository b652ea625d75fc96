#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tshsr/data/dataset.hpp"
#include "tshsr/model/config.hpp"
#include "tshsr/numerics/gradcheck.hpp"
#include "tshsr/train/evaluate.hpp"
#include "tshsr/train/trainer.hpp"

namespace tshsr::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kVerification = 4 };

/// Parses and runs one command line (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct GradcheckOptions {
  model::ModelConfig model;
  std::size_t regions = 4;
  std::size_t length = 5;
  std::size_t batch = 3;
  std::uint64_t data_seed = 1;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  std::size_t max_params = 20000;
  /// Parameter whose analytic gradient is deliberately perturbed (negative control).
  std::optional<std::string> corrupt;
};

/// model defaults for gradcheck: d=8, m=6, M=2, vocab 50, word_dim 10, raw_dim 12.
GradcheckOptions default_gradcheck_options();

struct GradcheckReport {
  double loss = 0.0;
  std::size_t param_count = 0;
  std::vector<num::GradCheckEntry> entries;
  bool passed = false;
};

/// Throws ConfigError if the model exceeds max_params.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

struct AblationRow {
  std::size_t steps = 0;
  bool hierarchical = true;
  model::StreamMode stream = model::StreamMode::both;
  std::vector<train::RetrievalResult> results;
  double final_loss = 0.0;
  std::size_t selected_epoch = 0;
  std::size_t param_count = 0;
};

struct AblationPlan {
  model::ModelConfig model;  // sizes and shared settings; axes below override it
  train::TrainConfig train;
  std::vector<std::size_t> steps{0, 1, 2, 3};
  std::vector<bool> hierarchical{true, false};
  std::vector<model::StreamMode> streams{model::StreamMode::both};
  std::size_t folds = 1;
  std::optional<std::string> checkpoint_dir;
};

/// Trains and evaluates every configuration of the plan from the same seeds.
/// Rows come out ordered by ascending reasoning steps; M=0 runs once, with the
/// first gating value. With a validation set each run keeps its best-rsum
/// epoch; recalls are measured on `test`.
std::vector<AblationRow> run_ablation(const AblationPlan& plan, const data::Dataset& train_set,
                                      const data::Dataset* val_set, const data::Dataset& test_set,
                                      const std::function<void(const AblationRow&)>& on_row = {});

}  // namespace tshsr::cli
