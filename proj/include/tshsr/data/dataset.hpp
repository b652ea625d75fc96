#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tshsr/numerics/tensor.hpp"

namespace tshsr::data {

using TokenSeq = std::vector<std::uint32_t>;

/// Precomputed region features of one image and its captions.
struct FeatureBundle {
  std::string image_id;
  num::Tensor regions;  // [K x raw_dim]
  std::vector<TokenSeq> captions;

  bool operator==(const FeatureBundle&) const = default;
};

enum class Split { train, val, test };
std::string to_string(Split split);
Split parse_split(const std::string& text);

/// A split of image/caption data with uniform region geometry.
struct Dataset {
  std::string name = "dataset";
  Split split = Split::train;
  std::size_t regions = 0;  // K
  std::size_t raw_dim = 0;
  std::size_t vocab_size = 0;
  std::size_t max_length = 0;
  std::vector<FeatureBundle> bundles;

  std::size_t caption_count() const;
  std::size_t token_count() const;

  /// Throws ConfigError if any bundle breaks the uniform-geometry or vocabulary rules.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

/// An (image, caption) pair addressed by bundle and caption index.
struct PairRef {
  std::size_t image;
  std::size_t caption;
};

/// Every caption paired with its image, in bundle order.
std::vector<PairRef> all_pairs(const Dataset& ds);

struct BlobInfo {
  std::uint64_t bytes = 0;
  std::string sha256;
};

struct DatasetManifest {
  std::string name;
  Split split = Split::train;
  std::size_t images = 0;
  std::size_t captions = 0;
  std::size_t tokens = 0;
  std::size_t regions = 0;
  std::size_t raw_dim = 0;
  std::size_t vocab_size = 0;
  std::size_t max_length = 0;
  BlobInfo regions_blob;
  BlobInfo tokens_blob;
  BlobInfo offsets_blob;
};

inline constexpr const char* kManifestFile = "manifest";
inline constexpr const char* kRegionsFile = "regions.bin";
inline constexpr const char* kTokensFile = "tokens.bin";
inline constexpr const char* kOffsetsFile = "offsets.bin";

/// Writes the dataset directory (created if needed). Region values are stored as
/// float32, so only float32-representable features round-trip bitwise.
DatasetManifest write_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Throws LoadError naming the offending field on any inconsistency.
Dataset read_dataset(const std::filesystem::path& dir);
DatasetManifest read_manifest(const std::filesystem::path& dir);

}  // namespace tshsr::data
