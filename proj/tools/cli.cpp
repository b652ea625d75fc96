#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "tshsr/data/keyvalue.hpp"
#include "tshsr/data/synthetic.hpp"
#include "tshsr/errors.hpp"
#include "tshsr/model/model.hpp"
#include "tshsr/numerics/tape.hpp"
#include "tshsr/train/checkpoint.hpp"

namespace tshsr::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Settings: every command owns an ordered list of key/value settings with
// defaults. A --config file is applied first, then explicit flags.

struct Setting {
  std::string key;
  std::string value;
  std::string help;
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& description, std::vector<Setting> settings,
          std::vector<std::string> hidden = {})
      : settings_(std::move(settings)) {
    sub_ = app.add_subcommand(name, description);
    sub_->add_option("--config", config_path_, "key: value file applied before flags");
    for (const auto& s : settings_) {
      auto* opt = sub_->add_option("--" + s.key, flags_[s.key], s.help + " (default: " + shown(s.value) + ")");
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      if (std::find(hidden.begin(), hidden.end(), s.key) != hidden.end()) opt->group("");
      options_[s.key] = opt;
    }
  }

  CLI::App* app() const { return sub_; }

  /// Effective settings; throws ConfigError for unknown keys in the config file.
  std::map<std::string, std::string> resolve() const {
    std::map<std::string, std::string> values;
    for (const auto& s : settings_) values[s.key] = s.value;
    if (!config_path_.empty()) {
      const auto doc = data::KeyValueDoc::load(config_path_);
      for (auto [key, value] : doc.entries()) {
        std::replace(key.begin(), key.end(), '_', '-');
        if (!values.contains(key)) throw ConfigError("unknown config key '" + key + "' in " + config_path_);
        values[key] = value;
      }
    }
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) values[key] = flags_.at(key);
    }
    return values;
  }

  void echo(std::ostream& out, const std::map<std::string, std::string>& values) const {
    out << "# " << sub_->get_name() << " effective config\n";
    for (const auto& s : settings_) out << s.key << ": " << values.at(s.key) << "\n";
  }

 private:
  static std::string shown(const std::string& v) { return v.empty() ? "none" : v; }

  CLI::App* sub_ = nullptr;
  std::vector<Setting> settings_;
  std::string config_path_;
  std::map<std::string, std::string> flags_;
  std::map<std::string, CLI::Option*> options_;
};

class Values {
 public:
  explicit Values(std::map<std::string, std::string> v) : v_(std::move(v)) {}

  const std::string& str(const std::string& key) const { return v_.at(key); }
  std::string required(const std::string& key) const {
    if (v_.at(key).empty()) throw ConfigError("missing required setting '" + key + "'");
    return v_.at(key);
  }
  std::optional<std::string> optional(const std::string& key) const {
    if (v_.at(key).empty()) return std::nullopt;
    return v_.at(key);
  }
  std::uint64_t uint(const std::string& key) const { return data::parse_uint(v_.at(key), key); }
  std::size_t positive(const std::string& key) const {
    const auto v = uint(key);
    if (v == 0) throw ConfigError("field '" + key + "': must be at least 1");
    return v;
  }
  double real(const std::string& key) const { return data::parse_double(v_.at(key), key); }
  bool flag(const std::string& key) const { return data::parse_bool(v_.at(key), key); }

  template <class T, class Parse>
  std::vector<T> list(const std::string& key, Parse parse) const {
    std::vector<T> out;
    std::stringstream ss(v_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      if (!item.empty()) out.push_back(parse(item));
    }
    if (out.empty()) throw ConfigError("field '" + key + "': empty list");
    return out;
  }

 private:
  std::map<std::string, std::string> v_;
};

// ---------------------------------------------------------------------------
// Shared setting groups.

std::vector<Setting> model_settings() {
  return {
      {"joint-dim", "1024", "joint embedding size d"},
      {"word-dim", "300", "word embedding size"},
      {"sim-dim", "256", "similarity vector size m"},
      {"steps", "3", "reasoning layers M (0 disables reasoning)"},
      {"lambda", "9", "attention temperature"},
      {"hierarchical", "true", "convolutional gate on relations"},
      {"row-softmax", "false", "softmax-normalise relation rows"},
      {"share-sim", "false", "one similarity matrix for all uses"},
      {"stream", "both", "both, i2t_only or t2i_only"},
      {"model-seed", "0", "parameter initialisation seed"},
  };
}

std::vector<Setting> train_settings() {
  return {
      {"batch-size", "128", "pairs per batch"},
      {"epochs", "20", "training epochs"},
      {"lr", "0.0002", "Adam learning rate"},
      {"decay-epoch", "10", "first epoch at the decayed rate"},
      {"lr-decay", "0.1", "learning-rate decay factor"},
      {"margin", "0.2", "ranking margin"},
      {"max-steps", "0", "stop after this many steps (0 = no limit)"},
      {"seed", "0", "shuffling seed"},
      {"threads", "1", "evaluation threads (0 = all cores)"},
  };
}

template <class... Groups>
std::vector<Setting> join(std::vector<Setting> first, Groups... rest) {
  (first.insert(first.end(), rest.begin(), rest.end()), ...);
  return first;
}

model::ModelConfig model_config(const Values& v) {
  model::ModelConfig cfg;
  cfg.joint_dim = v.positive("joint-dim");
  cfg.word_dim = v.positive("word-dim");
  cfg.sim_dim = v.positive("sim-dim");
  cfg.reasoning_steps = v.uint("steps");
  cfg.lambda = v.real("lambda");
  cfg.hierarchical = v.flag("hierarchical");
  cfg.row_softmax = v.flag("row-softmax");
  cfg.share_similarity_weights = v.flag("share-sim");
  cfg.stream = model::parse_stream_mode(v.str("stream"));
  cfg.seed = v.uint("model-seed");
  return cfg;
}

void fit_to_data(model::ModelConfig& cfg, const data::Dataset& ds) {
  cfg.raw_dim = ds.raw_dim;
  cfg.vocab_size = ds.vocab_size;
  cfg.max_length = ds.max_length;
}

train::TrainConfig train_config(const Values& v) {
  train::TrainConfig tc;
  tc.batch_size = v.uint("batch-size");
  tc.epochs = v.uint("epochs");
  tc.lr = v.real("lr");
  tc.decay_epoch = v.uint("decay-epoch");
  tc.lr_decay = v.real("lr-decay");
  tc.margin = v.real("margin");
  tc.max_steps = v.uint("max-steps");
  tc.seed = v.uint("seed");
  tc.eval_threads = v.uint("threads");
  tc.validate();
  return tc;
}

void check_compatible(const model::ModelConfig& cfg, const data::Dataset& ds, const std::string& what) {
  if (ds.bundles.empty()) return;
  if (ds.raw_dim != cfg.raw_dim) {
    throw InputError(what + ": region width " + std::to_string(ds.raw_dim) + " but the model expects " +
                     std::to_string(cfg.raw_dim));
  }
  if (ds.vocab_size > cfg.vocab_size || ds.max_length > cfg.max_length) {
    throw InputError(what + ": vocabulary or caption length exceeds the model's");
  }
}

std::string fixed(double v, int digits = 1) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  return out;
}

const char* on_off(bool v) { return v ? "on" : "off"; }

// ---------------------------------------------------------------------------
// Commands.

int cmd_gen_data(const Values& v, std::ostream& out) {
  data::SyntheticSpec spec;
  spec.pairs = v.uint("pairs");
  spec.regions = v.uint("k");
  spec.raw_dim = v.uint("draw");
  spec.length = v.uint("length");
  spec.vocab_size = v.uint("vocab");
  spec.seed = v.uint("seed");
  spec.signal_strength = v.real("signal");
  spec.captions_per_image = v.uint("captions");
  spec.world_seed = v.uint("world-seed");
  const std::string dir = v.required("out");
  data::Dataset ds = data::gen_synthetic(spec);
  ds.name = v.str("name");
  ds.split = data::parse_split(v.str("split"));
  const auto m = data::write_dataset(ds, dir);
  out << "wrote " << dir << "\n"
      << "  " << m.name << " (" << data::to_string(m.split) << "): " << m.images << " images, " << m.captions
      << " captions, " << m.tokens << " tokens\n"
      << "  regions " << m.regions << " x " << m.raw_dim << ", vocab " << m.vocab_size << ", max length "
      << m.max_length << "\n"
      << "  regions.bin " << m.regions_blob.sha256 << "\n"
      << "  tokens.bin  " << m.tokens_blob.sha256 << "\n"
      << "  offsets.bin " << m.offsets_blob.sha256 << "\n";
  return kOk;
}

int cmd_train(const Values& v, std::ostream& out) {
  const train::TrainConfig tc = train_config(v);
  model::ModelConfig cfg = model_config(v);
  const std::string out_dir = v.required("out");
  const data::Dataset ds = data::read_dataset(v.required("data"));
  std::optional<data::Dataset> val;
  if (auto p = v.optional("val")) val = data::read_dataset(*p);
  fit_to_data(cfg, ds);
  if (val) check_compatible(cfg, *val, "validation set");

  model::Model model(cfg);
  out << "training " << model.params().total_count() << " parameters on " << ds.caption_count() << " pairs\n";
  const auto result = train::train(model, ds, tc, val ? &*val : nullptr);
  for (const auto& e : result.epochs) {
    out << "epoch " << e.epoch << "  lr " << e.lr << "  loss " << fixed(e.mean_loss, 6);
    if (e.val_rsum) out << "  val rsum " << fixed(*e.val_rsum);
    out << "\n";
  }
  out << "steps " << result.steps << ", kept epoch " << result.selected_epoch << "\n";

  train::save_checkpoint(model, out_dir);
  const std::string csv = v.optional("loss-csv").value_or((fs::path(out_dir) / "loss.csv").string());
  train::write_loss_csv(csv, result.losses);
  out << "checkpoint " << out_dir << ", losses " << csv << "\n";
  return kOk;
}

void print_recall_header(std::ostream& out, const std::string& label, std::size_t width) {
  out << std::left << std::setw(static_cast<int>(width)) << label << std::right
      << "   Sentence Retrieval      Image Retrieval\n"
      << std::setw(static_cast<int>(width)) << "" << "   R@1    R@5    R@10     R@1    R@5    R@10     rsum\n";
}

void print_recall_cells(std::ostream& out, const std::vector<train::RetrievalResult>& r) {
  for (std::size_t d = 0; d < 2; ++d) {
    for (double x : r[d].recall) out << std::setw(7) << fixed(x);
    out << "  ";
  }
  out << std::setw(7) << fixed(train::rsum(r)) << "\n";
}

int cmd_eval(const Values& v, std::ostream& out) {
  const std::size_t folds = v.positive("folds");
  const model::Model model = train::load_checkpoint(v.required("checkpoint"));
  const data::Dataset ds = data::read_dataset(v.required("data"));
  check_compatible(model.config(), ds, "dataset");
  const auto r = train::evaluate(model, ds, folds, v.uint("threads"));
  const std::string label = ds.name + (folds > 1 ? " (" + std::to_string(folds) + " folds)" : "");
  const std::size_t width = std::max<std::size_t>(label.size(), 8);
  print_recall_header(out, "", width);
  out << std::left << std::setw(static_cast<int>(width)) << label << std::right;
  print_recall_cells(out, r);
  if (auto p = v.optional("out-csv")) {
    auto csv = open_csv(*p);
    csv << "sentence_r1,sentence_r5,sentence_r10,image_r1,image_r5,image_r10,rsum\n";
    for (std::size_t d = 0; d < 2; ++d)
      for (double x : r[d].recall) csv << x << ",";
    csv << train::rsum(r) << "\n";
  }
  return kOk;
}

int cmd_gradcheck(const Values& v, std::ostream& out) {
  GradcheckOptions o = default_gradcheck_options();
  o.model.joint_dim = v.positive("d");
  o.model.sim_dim = v.positive("m");
  o.model.word_dim = v.positive("word-dim");
  o.model.raw_dim = v.positive("raw-dim");
  o.model.vocab_size = v.positive("vocab");
  o.model.reasoning_steps = v.uint("steps");
  o.model.lambda = v.real("lambda");
  o.model.hierarchical = v.flag("hierarchical");
  o.model.row_softmax = v.flag("row-softmax");
  o.model.stream = model::parse_stream_mode(v.str("stream"));
  o.model.seed = v.uint("model-seed");
  o.regions = v.positive("k");
  o.length = v.positive("length");
  o.batch = v.uint("batch");
  o.data_seed = v.uint("seed");
  o.epsilon = v.real("epsilon");
  o.tolerance = v.real("tolerance");
  o.corrupt = v.optional("corrupt-grad");
  if (o.batch < 2) throw ConfigError("field 'batch': must be at least 2");
  if (!(o.epsilon > 0)) throw ConfigError("field 'epsilon': must be positive");

  const GradcheckReport report = run_gradcheck(o);
  out << "loss " << report.loss << " over " << o.batch << " pairs, " << report.param_count << " parameters\n";
  std::size_t width = 4;
  for (const auto& e : report.entries) width = std::max(width, e.name.size());
  for (const auto& e : report.entries) {
    out << std::left << std::setw(static_cast<int>(width)) << e.name << std::right << std::setw(7) << e.count << "  "
        << std::scientific << std::setprecision(3) << e.max_relative_error << std::defaultfloat << "  "
        << (e.max_relative_error < o.tolerance ? "PASS" : "FAIL") << "\n";
  }
  out << (report.passed ? "all parameters pass" : "gradient check FAILED") << " (tolerance " << o.tolerance << ")\n";
  if (auto p = v.optional("out-csv")) {
    auto csv = open_csv(*p);
    csv << "name,count,max_relative_error,pass\n";
    for (const auto& e : report.entries)
      csv << e.name << "," << e.count << "," << e.max_relative_error << "," << (e.max_relative_error < o.tolerance)
          << "\n";
  }
  return report.passed ? kOk : kVerification;
}

int cmd_ablate(const Values& v, std::ostream& out) {
  AblationPlan plan;
  plan.model = model_config(v);
  plan.train = train_config(v);
  plan.steps = v.list<std::size_t>("steps-list", [](const std::string& s) { return data::parse_uint(s, "steps-list"); });
  plan.hierarchical = v.list<bool>("hierarchical-list", [](const std::string& s) {
    return data::parse_bool(s, "hierarchical-list");
  });
  plan.streams = v.list<model::StreamMode>("streams", [](const std::string& s) { return model::parse_stream_mode(s); });
  plan.folds = v.positive("folds");
  plan.checkpoint_dir = v.optional("checkpoints");

  const data::Dataset ds = data::read_dataset(v.required("data"));
  std::optional<data::Dataset> val, test;
  if (auto p = v.optional("val")) val = data::read_dataset(*p);
  if (auto p = v.optional("test")) test = data::read_dataset(*p);
  fit_to_data(plan.model, ds);
  if (val) check_compatible(plan.model, *val, "validation set");
  if (test) check_compatible(plan.model, *test, "test set");
  const data::Dataset& eval_set = test ? *test : (val ? *val : ds);
  out << "evaluating on " << eval_set.name << " (" << eval_set.bundles.size() << " images)\n";

  std::ostringstream header;
  header << " M  hier  stream   ";
  print_recall_header(out, header.str(), header.str().size());
  std::optional<std::ofstream> csv;
  if (auto p = v.optional("out-csv")) {
    csv = open_csv(*p);
    *csv << "steps,hierarchical,stream,sentence_r1,sentence_r5,sentence_r10,image_r1,image_r5,image_r10,rsum,"
            "final_loss,params\n";
  }
  run_ablation(plan, ds, val ? &*val : nullptr, eval_set, [&](const AblationRow& row) {
    out << std::setw(2) << row.steps << "  " << std::setw(4) << on_off(row.hierarchical) << "  " << std::left
        << std::setw(9) << model::to_string(row.stream) << std::right;
    print_recall_cells(out, row.results);
    if (csv) {
      *csv << row.steps << "," << on_off(row.hierarchical) << "," << model::to_string(row.stream);
      for (std::size_t d = 0; d < 2; ++d)
        for (double x : row.results[d].recall) *csv << "," << x;
      *csv << "," << train::rsum(row.results) << "," << row.final_loss << "," << row.param_count << "\n";
    }
  });
  return kOk;
}

}  // namespace

GradcheckOptions default_gradcheck_options() {
  GradcheckOptions o;
  o.model.raw_dim = 12;
  o.model.joint_dim = 8;
  o.model.word_dim = 10;
  o.model.vocab_size = 50;
  o.model.sim_dim = 6;
  o.model.reasoning_steps = 2;
  o.model.seed = 1;
  return o;
}

GradcheckReport run_gradcheck(const GradcheckOptions& o) {
  model::ModelConfig cfg = o.model;
  cfg.max_length = o.length;
  model::Model model(cfg);
  GradcheckReport report;
  report.param_count = model.params().total_count();
  if (report.param_count > o.max_params) {
    throw ConfigError("gradcheck is limited to " + std::to_string(o.max_params) + " parameters; this configuration has " +
                      std::to_string(report.param_count));
  }

  data::SyntheticSpec spec;
  spec.pairs = o.batch;
  spec.regions = o.regions;
  spec.raw_dim = cfg.raw_dim;
  spec.length = o.length;
  spec.vocab_size = cfg.vocab_size;
  spec.seed = o.data_seed;
  spec.signal_strength = 0.5;
  const data::Dataset ds = data::gen_synthetic(spec);
  std::vector<const num::Tensor*> images;
  std::vector<model::TokenSpan> captions;
  for (const auto& b : ds.bundles) {
    images.push_back(&b.regions);
    captions.push_back(b.captions.front());
  }

  num::Tape tape;
  const num::Var loss = model.batch_loss(tape, images, captions, 0.2);
  report.loss = loss.value().item();
  num::GradMap analytic = tape.backward(loss, model.params());
  if (o.corrupt) {
    auto it = analytic.find(*o.corrupt);
    if (it == analytic.end()) throw ConfigError("field 'corrupt-grad': no parameter named '" + *o.corrupt + "'");
    auto& g = it->second[0];
    g += 1e-2 * (1.0 + std::abs(g));
  }
  const num::GradMap numeric = num::finite_diff_grad(
      [&](const num::ParamStore& p) {
        const model::Model probe(cfg, p);
        num::Tape t(false);
        return probe.batch_loss(t, images, captions, 0.2).value().item();
      },
      model.params(), o.epsilon);
  report.entries = num::compare_gradients(analytic, numeric, model.params());
  report.passed = std::all_of(report.entries.begin(), report.entries.end(),
                              [&](const auto& e) { return e.max_relative_error < o.tolerance; });
  return report;
}

std::vector<AblationRow> run_ablation(const AblationPlan& plan, const data::Dataset& train_set,
                                      const data::Dataset* val_set, const data::Dataset& test_set,
                                      const std::function<void(const AblationRow&)>& on_row) {
  std::vector<std::size_t> steps = plan.steps;
  std::stable_sort(steps.begin(), steps.end());
  std::vector<AblationRow> rows;
  for (std::size_t m : steps) {
    for (std::size_t h = 0; h < plan.hierarchical.size(); ++h) {
      // the gate only exists inside reasoning layers
      if (m == 0 && h > 0) break;
      const bool hier = plan.hierarchical[h];
      for (auto stream : plan.streams) {
        model::ModelConfig cfg = plan.model;
        cfg.reasoning_steps = m;
        cfg.hierarchical = hier;
        cfg.stream = stream;
        model::Model model(cfg);
        const auto result = train::train(model, train_set, plan.train, val_set);
        AblationRow row;
        row.steps = m;
        row.hierarchical = hier;
        row.stream = stream;
        row.results = train::evaluate(model, test_set, plan.folds, plan.train.eval_threads);
        row.final_loss = result.epochs.empty() ? 0.0 : result.epochs.back().mean_loss;
        row.selected_epoch = result.selected_epoch;
        row.param_count = model.params().total_count();
        if (plan.checkpoint_dir) {
          train::save_checkpoint(model, fs::path(*plan.checkpoint_dir) / ("m" + std::to_string(m) + "-" +
                                                                           on_off(hier) + "-" +
                                                                           std::string(model::to_string(stream))));
        }
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stream hierarchical similarity reasoning for image-text matching"};
  app.require_subcommand(1);

  Command gen(app, "gen-data", "write a synthetic dataset",
              {{"out", "", "output directory"},
               {"pairs", "16", "image-caption pairs"},
               {"k", "4", "regions per image"},
               {"draw", "8", "raw region feature width"},
               {"length", "5", "tokens per caption"},
               {"vocab", "50", "vocabulary size"},
               {"seed", "0", "pair seed"},
               {"signal", "1", "signal strength in [0, 1]"},
               {"captions", "1", "captions per image"},
               {"world-seed", "0", "token prototype seed shared across splits"},
               {"name", "synthetic", "dataset name"},
               {"split", "train", "train, val or test"}});
  Command trn(app, "train", "train a model and write a checkpoint",
              join({{"data", "", "training dataset directory"},
                    {"val", "", "validation dataset for snapshot selection"},
                    {"out", "", "checkpoint directory"},
                    {"loss-csv", "", "loss curve path (default <out>/loss.csv)"}},
                   model_settings(), train_settings()));
  Command evl(app, "eval", "recall@K of a checkpoint on a dataset",
              {{"checkpoint", "", "checkpoint directory"},
               {"data", "", "dataset directory"},
               {"folds", "1", "equal image folds to average over"},
               {"threads", "1", "scoring threads (0 = all cores)"},
               {"out-csv", "", "also write the row as CSV"}});
  Command grad(app, "gradcheck", "compare analytic and finite-difference gradients of the full loss",
               {{"d", "8", "joint embedding size"},
                {"m", "6", "similarity vector size"},
                {"k", "4", "regions per image"},
                {"length", "5", "tokens per caption"},
                {"steps", "2", "reasoning layers"},
                {"vocab", "50", "vocabulary size"},
                {"word-dim", "10", "word embedding size"},
                {"raw-dim", "12", "raw region feature width"},
                {"batch", "3", "pairs in the loss"},
                {"lambda", "9", "attention temperature"},
                {"hierarchical", "true", "convolutional gate on relations"},
                {"row-softmax", "false", "softmax-normalise relation rows"},
                {"stream", "both", "both, i2t_only or t2i_only"},
                {"model-seed", "1", "parameter initialisation seed"},
                {"seed", "1", "data seed"},
                {"epsilon", "1e-05", "finite-difference step"},
                {"tolerance", "0.0001", "maximum relative error"},
                {"out-csv", "", "also write the report as CSV"},
                {"corrupt-grad", "", "perturb this parameter's analytic gradient"}},
               {"corrupt-grad"});
  Command abl(app, "ablate", "train and evaluate over reasoning depth, gating and stream mode",
              join({{"data", "", "training dataset directory"},
                    {"val", "", "validation dataset for snapshot selection"},
                    {"test", "", "evaluation dataset (default: val, else training data)"},
                    {"steps-list", "0,1,2,3", "reasoning depths"},
                    {"hierarchical-list", "on,off", "gating settings"},
                    {"streams", "both", "stream modes"},
                    {"folds", "1", "equal image folds to average over"},
                    {"checkpoints", "", "save every configuration under this directory"},
                    {"out-csv", "", "also write the table as CSV"}},
                   model_settings(), train_settings()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (auto* cmd : {&gen, &trn, &evl, &grad, &abl}) {
      if (!cmd->app()->parsed()) continue;
      const auto values = cmd->resolve();
      cmd->echo(out, values);
      const Values v(values);
      if (cmd == &gen) return cmd_gen_data(v, out);
      if (cmd == &trn) return cmd_train(v, out);
      if (cmd == &evl) return cmd_eval(v, out);
      if (cmd == &grad) return cmd_gradcheck(v, out);
      return cmd_ablate(v, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace tshsr::cli
