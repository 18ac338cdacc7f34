#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coopmds/codespec.hpp"

namespace coopmds {

inline constexpr std::uint8_t kShardVersion = 1;

/// Little-endian layout: "CMDS", version u8, field kind u8, modulus u16,
/// spec length u16, spec bytes, node u16, stripes u64, original length u64, crc32 u32.
struct ShardHeader {
  FieldSpec field;
  std::vector<std::uint8_t> spec_bytes;
  NodeId node = 0;
  std::uint64_t stripes = 0;
  std::uint64_t length = 0;
  std::uint32_t crc = 0;

  friend bool operator==(const ShardHeader&, const ShardHeader&) = default;
};

struct Shard {
  ShardHeader header;
  std::vector<std::uint8_t> payload;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_header(const ShardHeader& header);
/// Throws ErrorKind::verification on a malformed header.
ShardHeader decode_header(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);

std::vector<std::uint8_t> shard_bytes(const Shard& shard);
/// Parses a shard; the checksum is not checked here.
Shard parse_shard(std::span<const std::uint8_t> bytes);

Shard read_shard(const std::filesystem::path& path);
void write_shard(const std::filesystem::path& path, const Shard& shard);
std::filesystem::path shard_path(const std::filesystem::path& dir, NodeId node);

/// Bytes per stored symbol: 1 when the field has at most 256 elements, else 2.
std::size_t symbol_width(const FieldSpec& field);
/// Bytes of file data carried by one data symbol: 2 for GF(2^16), otherwise 1.
/// Fields with fewer than 256 elements cannot carry bytes and are rejected.
std::size_t data_width(const FieldSpec& field);

}  // namespace coopmds
