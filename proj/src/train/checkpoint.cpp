#include "tshsr/train/checkpoint.hpp"

#include <sstream>

#include "tshsr/data/blob.hpp"
#include "tshsr/data/dataset.hpp"
#include "tshsr/errors.hpp"

namespace tshsr::train {

namespace fs = std::filesystem;

namespace {
constexpr const char* kFormat = "tshsr-checkpoint";
constexpr std::uint64_t kVersion = 1;
}  // namespace

void write_model_config(data::KeyValueDoc& doc, const model::ModelConfig& cfg) {
  doc.add("raw_dim", cfg.raw_dim);
  doc.add("joint_dim", cfg.joint_dim);
  doc.add("word_dim", cfg.word_dim);
  doc.add("vocab_size", cfg.vocab_size);
  doc.add("max_length", cfg.max_length);
  doc.add("sim_dim", cfg.sim_dim);
  doc.add("reasoning_steps", cfg.reasoning_steps);
  doc.add("lambda", cfg.lambda);
  doc.add("hierarchical", cfg.hierarchical);
  doc.add("row_softmax", cfg.row_softmax);
  doc.add("share_similarity_weights", cfg.share_similarity_weights);
  doc.add("stream", std::string(model::to_string(cfg.stream)));
  doc.add("seed", cfg.seed);
}

model::ModelConfig read_model_config(const data::KeyValueDoc& doc) {
  model::ModelConfig cfg;
  try {
    cfg.raw_dim = doc.require_uint("raw_dim");
    cfg.joint_dim = doc.require_uint("joint_dim");
    cfg.word_dim = doc.require_uint("word_dim");
    cfg.vocab_size = doc.require_uint("vocab_size");
    cfg.max_length = doc.require_uint("max_length");
    cfg.sim_dim = doc.require_uint("sim_dim");
    cfg.reasoning_steps = doc.require_uint("reasoning_steps");
    cfg.lambda = data::parse_double(doc.require("lambda"), "lambda");
    cfg.hierarchical = data::parse_bool(doc.require("hierarchical"), "hierarchical");
    cfg.row_softmax = data::parse_bool(doc.require("row_softmax"), "row_softmax");
    cfg.share_similarity_weights =
        data::parse_bool(doc.require("share_similarity_weights"), "share_similarity_weights");
    cfg.stream = model::parse_stream_mode(doc.require("stream"));
    cfg.seed = doc.require_uint("seed");
    cfg.validate();
  } catch (const ConfigError& e) {
    throw LoadError(e.what());
  }
  return cfg;
}

void save_checkpoint(const model::Model& model, const fs::path& dir) {
  data::KeyValueDoc doc;
  doc.add("format", kFormat);
  doc.add("version", kVersion);
  write_model_config(doc, model.config());

  data::Bytes blob;
  for (const auto& [name, tensor] : model.params()) {
    std::string dims;
    for (std::size_t i = 0; i < tensor.shape().size(); ++i) dims += (i ? "x" : "") + std::to_string(tensor.shape()[i]);
    doc.add("param", name + " " + dims + " " + std::to_string(blob.size()));
    for (double v : tensor.data()) data::put_f64(blob, v);
  }
  doc.add("params.bin.bytes", static_cast<std::uint64_t>(blob.size()));
  doc.add("params.bin.sha256", data::sha256_hex(blob));

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create directory " + dir.string());
  data::write_file(dir / kParamsFile, blob);
  doc.save(dir / data::kManifestFile);
}

model::Model load_checkpoint(const fs::path& dir) {
  const auto doc = data::KeyValueDoc::load(dir / data::kManifestFile);
  if (doc.require("format") != kFormat) throw LoadError("field 'format': not a checkpoint manifest");
  if (doc.require_uint("version") != kVersion) throw LoadError("field 'version': unsupported version");
  const model::ModelConfig cfg = read_model_config(doc);
  const num::ParamStore expected = model::init_params(cfg);

  const std::uint64_t bytes = doc.require_uint("params.bin.bytes");
  if (bytes != 8 * expected.total_count()) throw LoadError("field 'params.bin.bytes': disagrees with the configuration");
  const auto blob = data::read_checked(dir / kParamsFile, bytes, doc.require("params.bin.sha256"), kParamsFile);

  num::ParamStore params;
  for (const auto& line : doc.all("param")) {
    std::istringstream in(line);
    std::string name, dims;
    std::uint64_t offset = 0;
    if (!(in >> name >> dims >> offset)) throw LoadError("field 'param': malformed entry '" + line + "'");
    if (!expected.contains(name)) throw LoadError("field 'param': unexpected parameter '" + name + "'");
    const num::Tensor& like = expected.at(name);
    std::string want;
    for (std::size_t i = 0; i < like.shape().size(); ++i) want += (i ? "x" : "") + std::to_string(like.shape()[i]);
    if (dims != want) throw LoadError("field 'param': '" + name + "' has shape " + dims + ", expected " + want);
    if (offset % 8 != 0 || offset + 8 * like.size() > blob.size()) {
      throw LoadError("field 'param': offset of '" + name + "' out of range");
    }
    num::Tensor t(like.shape());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = data::get_f64(blob.data() + offset + 8 * i);
    try {
      params.add(name, std::move(t));
    } catch (const ContractError&) {
      throw LoadError("field 'param': duplicate parameter '" + name + "'");
    }
  }
  if (params.names() != expected.names()) throw LoadError("field 'param': parameter set is incomplete");
  return model::Model(cfg, std::move(params));
}

}  // namespace tshsr::train
