#pragma once

#include <filesystem>

#include "tshsr/data/keyvalue.hpp"
#include "tshsr/model/model.hpp"

// Checkpoint directory: a "manifest" in the dataset key: value dialect holding
// the model configuration and one "param" line per tensor
// ("<name> <dim>x<dim>... <byte offset>"), plus "params.bin" with every
// tensor as little-endian float64 in manifest order.

namespace tshsr::train {

inline constexpr const char* kParamsFile = "params.bin";

void write_model_config(data::KeyValueDoc& doc, const model::ModelConfig& cfg);
/// Reads the keys written by write_model_config; throws LoadError on missing or bad values.
model::ModelConfig read_model_config(const data::KeyValueDoc& doc);

void save_checkpoint(const model::Model& model, const std::filesystem::path& dir);
/// Throws LoadError on checksum, size, name or shape problems.
model::Model load_checkpoint(const std::filesystem::path& dir);

}  // namespace tshsr::train
