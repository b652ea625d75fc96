#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

// Little-endian binary blobs and their checksums.

namespace tshsr::data {

using Bytes = std::vector<std::uint8_t>;

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
/// Narrows to IEEE binary32 before writing.
void put_f32(Bytes& out, double v);
void put_f64(Bytes& out, double v);

std::uint32_t get_u32(const std::uint8_t* p);
std::uint64_t get_u64(const std::uint8_t* p);
double get_f32(const std::uint8_t* p);
double get_f64(const std::uint8_t* p);

/// Throws LoadError on I/O failure.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Reads a blob whose size and digest were recorded in a manifest. The on-disk
/// size is compared with `expected_size` before anything is allocated.
/// Throws LoadError naming `field` on a missing file, size mismatch, or bad checksum.
Bytes read_checked(const std::filesystem::path& path, std::uint64_t expected_size, const std::string& expected_sha256,
                   const std::string& field);

}  // namespace tshsr::data
