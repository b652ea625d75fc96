#include "tshsr/train/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "tshsr/data/keyvalue.hpp"
#include "tshsr/errors.hpp"

namespace tshsr::train {

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (!(lr_decay > 0.0)) throw ConfigError("lr_decay must be positive");
  if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
  if (decay_epoch > epochs) throw ConfigError("decay_epoch must not exceed epochs");
}

TrainResult train(model::Model& model, const data::Dataset& train_set, const TrainConfig& config,
                  const data::Dataset* val_set, const StepCallback& on_step) {
  config.validate();
  std::vector<data::PairRef> pairs = data::all_pairs(train_set);
  if (pairs.size() < 2) throw ConfigError("training needs at least two image-caption pairs");

  std::mt19937_64 rng(config.seed);
  AdamState state;
  TrainResult result;
  num::ParamStore best;
  std::optional<double> best_rsum;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.max_steps && result.steps >= config.max_steps) break;
    const double lr = epoch >= config.decay_epoch ? config.lr * config.lr_decay : config.lr;
    std::shuffle(pairs.begin(), pairs.end(), rng);

    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t begin = 0; begin < pairs.size(); begin += config.batch_size) {
      if (config.max_steps && result.steps >= config.max_steps) break;
      const std::size_t end = std::min(pairs.size(), begin + config.batch_size);
      if (end - begin < 2) break;  // a lone pair has no negatives

      std::vector<const num::Tensor*> images;
      std::vector<model::TokenSpan> captions;
      for (std::size_t k = begin; k < end; ++k) {
        const auto& bundle = train_set.bundles[pairs[k].image];
        images.push_back(&bundle.regions);
        captions.emplace_back(bundle.captions[pairs[k].caption]);
      }

      num::GradMap grads;
      double loss = 0.0;
      {
        num::Tape tape;
        const num::Var l = model.batch_loss(tape, images, captions, config.margin);
        loss = l.value().item();
        grads = tape.backward(l, model.params());
      }
      adam_step(model.params(), grads, state, lr, config.adam);

      result.losses.push_back(loss);
      ++result.steps;
      epoch_loss += loss;
      ++epoch_steps;
      if (on_step) on_step(result.steps, epoch, loss);
    }

    EpochRecord rec{epoch, lr, epoch_steps ? epoch_loss / static_cast<double>(epoch_steps) : 0.0, std::nullopt};
    if (val_set) {
      const auto recalls = evaluate(model, *val_set, 1, config.eval_threads);
      rec.val_rsum = rsum(recalls);
      if (!best_rsum || *rec.val_rsum > *best_rsum) {
        best_rsum = rec.val_rsum;
        best = model.params();
        result.selected_epoch = epoch;
      }
    } else {
      result.selected_epoch = epoch;
    }
    result.epochs.push_back(rec);
  }

  if (best_rsum) {
    model.params() = std::move(best);
    result.best_val_rsum = best_rsum;
  }
  return result;
}

void write_loss_csv(const std::filesystem::path& path, std::span<const double> losses) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) out << i << ',' << data::format_double(losses[i]) << '\n';
  if (!out) throw LoadError("failed writing " + path.string());
}

}  // namespace tshsr::train
