#include "tshsr/data/dataset.hpp"

#include "tshsr/data/blob.hpp"
#include "tshsr/data/keyvalue.hpp"
#include "tshsr/errors.hpp"

namespace tshsr::data {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "tshsr-dataset";
constexpr std::uint64_t kVersion = 1;

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  throw ConfigError("unknown split '" + text + "'");
}

std::size_t Dataset::caption_count() const {
  std::size_t n = 0;
  for (const auto& b : bundles) n += b.captions.size();
  return n;
}

std::size_t Dataset::token_count() const {
  std::size_t n = 0;
  for (const auto& b : bundles) {
    for (const auto& c : b.captions) n += c.size();
  }
  return n;
}

void Dataset::validate() const {
  for (const auto& b : bundles) {
    const std::string where = "image '" + b.image_id + "'";
    if (b.image_id.empty() || b.image_id.find_first_of("\r\n") != std::string::npos ||
        b.image_id.front() == ' ' || b.image_id.back() == ' ') {
      throw ConfigError("invalid image id '" + b.image_id + "'");
    }
    if (b.regions.shape() != num::Shape{regions, raw_dim}) {
      throw ConfigError(where + ": regions " + num::shape_str(b.regions.shape()) + " but dataset declares [" +
                        std::to_string(regions) + "x" + std::to_string(raw_dim) + "]");
    }
    if (b.captions.empty()) throw ConfigError(where + ": no captions");
    for (const auto& c : b.captions) {
      if (c.empty() || c.size() > max_length) {
        throw ConfigError(where + ": caption length " + std::to_string(c.size()) + " outside [1, " +
                          std::to_string(max_length) + "]");
      }
      for (auto id : c) {
        if (id >= vocab_size) throw ConfigError(where + ": token id " + std::to_string(id) + " outside vocabulary");
      }
    }
  }
}

std::vector<PairRef> all_pairs(const Dataset& ds) {
  std::vector<PairRef> out;
  for (std::size_t i = 0; i < ds.bundles.size(); ++i) {
    for (std::size_t c = 0; c < ds.bundles[i].captions.size(); ++c) out.push_back({i, c});
  }
  return out;
}

DatasetManifest write_dataset(const Dataset& ds, const fs::path& dir) {
  ds.validate();
  Bytes regions, tokens, offsets;
  regions.reserve(ds.bundles.size() * ds.regions * ds.raw_dim * 4);
  for (const auto& b : ds.bundles) {
    for (double v : b.regions.data()) put_f32(regions, v);
  }
  // Caption ranges per image, then token ranges per caption.
  std::uint64_t caption_pos = 0;
  for (const auto& b : ds.bundles) {
    put_u64(offsets, caption_pos);
    caption_pos += b.captions.size();
  }
  put_u64(offsets, caption_pos);
  std::uint64_t token_pos = 0;
  for (const auto& b : ds.bundles) {
    for (const auto& c : b.captions) {
      put_u64(offsets, token_pos);
      token_pos += c.size();
      for (auto id : c) put_u32(tokens, id);
    }
  }
  put_u64(offsets, token_pos);

  DatasetManifest m;
  m.name = ds.name;
  m.split = ds.split;
  m.images = ds.bundles.size();
  m.captions = ds.caption_count();
  m.tokens = ds.token_count();
  m.regions = ds.regions;
  m.raw_dim = ds.raw_dim;
  m.vocab_size = ds.vocab_size;
  m.max_length = ds.max_length;
  m.regions_blob = {regions.size(), sha256_hex(regions)};
  m.tokens_blob = {tokens.size(), sha256_hex(tokens)};
  m.offsets_blob = {offsets.size(), sha256_hex(offsets)};

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create directory " + dir.string());
  write_file(dir / kRegionsFile, regions);
  write_file(dir / kTokensFile, tokens);
  write_file(dir / kOffsetsFile, offsets);

  KeyValueDoc doc;
  doc.add("format", kFormat);
  doc.add("version", kVersion);
  doc.add("name", m.name);
  doc.add("split", to_string(m.split));
  doc.add("images", m.images);
  doc.add("captions", m.captions);
  doc.add("tokens", m.tokens);
  doc.add("regions", m.regions);
  doc.add("raw_dim", m.raw_dim);
  doc.add("vocab_size", m.vocab_size);
  doc.add("max_length", m.max_length);
  doc.add("regions.bin.bytes", m.regions_blob.bytes);
  doc.add("regions.bin.sha256", m.regions_blob.sha256);
  doc.add("tokens.bin.bytes", m.tokens_blob.bytes);
  doc.add("tokens.bin.sha256", m.tokens_blob.sha256);
  doc.add("offsets.bin.bytes", m.offsets_blob.bytes);
  doc.add("offsets.bin.sha256", m.offsets_blob.sha256);
  for (const auto& b : ds.bundles) doc.add("image_id", b.image_id);
  doc.save(dir / kManifestFile);
  return m;
}

DatasetManifest read_manifest(const fs::path& dir) {
  const KeyValueDoc doc = KeyValueDoc::load(dir / kManifestFile);
  if (doc.require("format") != kFormat) throw LoadError("field 'format': not a " + std::string(kFormat) + " manifest");
  if (doc.require_uint("version") != kVersion) throw LoadError("field 'version': unsupported version");
  DatasetManifest m;
  m.name = doc.require("name");
  try {
    m.split = parse_split(doc.require("split"));
  } catch (const ConfigError& e) {
    throw LoadError(std::string("field 'split': ") + e.what());
  }
  m.images = doc.require_uint("images");
  m.captions = doc.require_uint("captions");
  m.tokens = doc.require_uint("tokens");
  m.regions = doc.require_uint("regions");
  m.raw_dim = doc.require_uint("raw_dim");
  m.vocab_size = doc.require_uint("vocab_size");
  m.max_length = doc.require_uint("max_length");
  auto blob = [&](const std::string& file) {
    return BlobInfo{doc.require_uint(file + ".bytes"), doc.require(file + ".sha256")};
  };
  m.regions_blob = blob(kRegionsFile);
  m.tokens_blob = blob(kTokensFile);
  m.offsets_blob = blob(kOffsetsFile);

  // Blob sizes are fully determined by the counts; reject anything else before reading.
  auto expect = [](const BlobInfo& b, long double want, const char* field) {
    if (static_cast<long double>(b.bytes) != want) {
      throw LoadError(std::string("field '") + field + "': size disagrees with manifest counts");
    }
  };
  expect(m.regions_blob, 4.0L * m.images * m.regions * m.raw_dim, "regions.bin.bytes");
  expect(m.tokens_blob, 4.0L * m.tokens, "tokens.bin.bytes");
  expect(m.offsets_blob, 8.0L * (m.images + 1 + m.captions + 1), "offsets.bin.bytes");
  if (m.images > 0 && (m.regions == 0 || m.raw_dim == 0)) throw LoadError("field 'regions': zero region geometry");
  return m;
}

Dataset read_dataset(const fs::path& dir) {
  const DatasetManifest m = read_manifest(dir);
  const KeyValueDoc doc = KeyValueDoc::load(dir / kManifestFile);
  const auto ids = doc.all("image_id");
  if (ids.size() != m.images) throw LoadError("field 'image_id': count disagrees with 'images'");

  const Bytes regions = read_checked(dir / kRegionsFile, m.regions_blob.bytes, m.regions_blob.sha256, kRegionsFile);
  const Bytes tokens = read_checked(dir / kTokensFile, m.tokens_blob.bytes, m.tokens_blob.sha256, kTokensFile);
  const Bytes offsets = read_checked(dir / kOffsetsFile, m.offsets_blob.bytes, m.offsets_blob.sha256, kOffsetsFile);

  auto offset = [&](std::size_t i) { return get_u64(offsets.data() + 8 * i); };
  const std::size_t token_base = m.images + 1;

  Dataset ds;
  ds.name = m.name;
  ds.split = m.split;
  ds.regions = m.regions;
  ds.raw_dim = m.raw_dim;
  ds.vocab_size = m.vocab_size;
  ds.max_length = m.max_length;
  ds.bundles.reserve(m.images);

  if (offset(0) != 0 || offset(m.images) != m.captions) throw LoadError("offsets.bin: caption ranges do not cover 'captions'");
  if (offset(token_base) != 0 || offset(token_base + m.captions) != m.tokens) {
    throw LoadError("offsets.bin: token ranges do not cover 'tokens'");
  }

  const std::size_t per_image = m.regions * m.raw_dim;
  for (std::size_t i = 0; i < m.images; ++i) {
    FeatureBundle b;
    b.image_id = ids[i];
    std::vector<double> values(per_image);
    for (std::size_t j = 0; j < per_image; ++j) values[j] = get_f32(regions.data() + 4 * (i * per_image + j));
    b.regions = num::Tensor({m.regions, m.raw_dim}, std::move(values));

    const auto c0 = offset(i), c1 = offset(i + 1);
    if (c1 < c0 || c1 > m.captions) throw LoadError("offsets.bin: bad caption range for image " + std::to_string(i));
    for (auto c = c0; c < c1; ++c) {
      const auto t0 = offset(token_base + c), t1 = offset(token_base + c + 1);
      if (t1 < t0 || t1 > m.tokens) throw LoadError("offsets.bin: bad token range for caption " + std::to_string(c));
      TokenSeq seq;
      seq.reserve(t1 - t0);
      for (auto t = t0; t < t1; ++t) seq.push_back(get_u32(tokens.data() + 4 * t));
      b.captions.push_back(std::move(seq));
    }
    ds.bundles.push_back(std::move(b));
  }
  try {
    ds.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("dataset contents: ") + e.what());
  }
  return ds;
}

}  // namespace tshsr::data
