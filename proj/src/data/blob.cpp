#include "tshsr/data/blob.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdio>
#include <fstream>

#include "tshsr/errors.hpp"

namespace tshsr::data {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

void put_f64(Bytes& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f32(const std::uint8_t* p) { return static_cast<double>(std::bit_cast<float>(get_u32(p))); }

double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("failed writing " + path.string());
}

Bytes read_checked(const std::filesystem::path& path, std::uint64_t expected_size, const std::string& expected_sha256,
                   const std::string& field) {
  std::error_code ec;
  const auto actual = std::filesystem::file_size(path, ec);
  if (ec) throw LoadError(field + ": cannot stat " + path.string());
  if (actual != expected_size) {
    throw LoadError(field + ": " + (actual < expected_size ? "truncated blob" : "oversized blob") + ", expected " +
                    std::to_string(expected_size) + " bytes, found " + std::to_string(actual));
  }
  Bytes bytes(actual);
  std::ifstream in(path, std::ios::binary);
  if (!in || !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(actual))) {
    throw LoadError(field + ": failed reading " + path.string());
  }
  if (sha256_hex(bytes) != expected_sha256) throw LoadError(field + ": checksum mismatch");
  return bytes;
}

}  // namespace tshsr::data
