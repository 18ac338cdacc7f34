#include "coopmds/shard.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "coopmds/error.hpp"

namespace coopmds {
namespace {

constexpr char kMagic[4] = {'C', 'M', 'D', 'S'};

void put(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xFF));
}

std::uint64_t get(std::span<const std::uint8_t> in, std::size_t& at, int bytes) {
  if (at + static_cast<std::size_t>(bytes) > in.size()) fail(ErrorKind::verification, "truncated shard header");
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(b)]) << (8 * b);
  at += static_cast<std::size_t>(bytes);
  return v;
}

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const std::size_t chunk = 1u << 30;
  for (std::size_t at = 0; at < bytes.size(); at += chunk) {
    const std::size_t len = std::min(chunk, bytes.size() - at);
    crc = crc32(crc, bytes.data() + at, static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_header(const ShardHeader& h) {
  if (h.spec_bytes.size() > 0xFFFF) fail(ErrorKind::invalid_argument, "code descriptor too long for a shard header");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kShardVersion);
  out.push_back(static_cast<std::uint8_t>(h.field.kind));
  put(out, h.field.modulus, 2);
  put(out, h.spec_bytes.size(), 2);
  out.insert(out.end(), h.spec_bytes.begin(), h.spec_bytes.end());
  put(out, static_cast<std::uint64_t>(h.node), 2);
  put(out, h.stripes, 8);
  put(out, h.length, 8);
  put(out, h.crc, 4);
  return out;
}

ShardHeader decode_header(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < 5 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    fail(ErrorKind::verification, "not a shard file (bad magic)");
  }
  if (bytes[4] != kShardVersion) fail(ErrorKind::verification, "unsupported shard version " + std::to_string(bytes[4]));
  std::size_t at = 5;
  ShardHeader h;
  const auto kind = get(bytes, at, 1);
  if (kind > 1) fail(ErrorKind::verification, "unknown field kind in shard header");
  h.field.kind = static_cast<FieldKind>(kind);
  h.field.modulus = static_cast<std::uint32_t>(get(bytes, at, 2));
  const auto spec_len = static_cast<std::size_t>(get(bytes, at, 2));
  if (at + spec_len > bytes.size()) fail(ErrorKind::verification, "truncated shard header");
  h.spec_bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                      bytes.begin() + static_cast<std::ptrdiff_t>(at + spec_len));
  at += spec_len;
  h.node = static_cast<NodeId>(get(bytes, at, 2));
  h.stripes = get(bytes, at, 8);
  h.length = get(bytes, at, 8);
  h.crc = static_cast<std::uint32_t>(get(bytes, at, 4));
  if (consumed != nullptr) *consumed = at;
  return h;
}

std::vector<std::uint8_t> shard_bytes(const Shard& shard) {
  auto out = encode_header(shard.header);
  out.insert(out.end(), shard.payload.begin(), shard.payload.end());
  return out;
}

Shard parse_shard(std::span<const std::uint8_t> bytes) {
  std::size_t at = 0;
  Shard shard;
  shard.header = decode_header(bytes, &at);
  shard.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at), bytes.end());
  return shard;
}

Shard read_shard(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "cannot read " + path.string());
  return parse_shard(bytes);
}

void write_shard(const std::filesystem::path& path, const Shard& shard) {
  const auto bytes = shard_bytes(shard);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
}

std::filesystem::path shard_path(const std::filesystem::path& dir, NodeId node) {
  return dir / ("shard_" + std::to_string(node) + ".cmds");
}

std::size_t symbol_width(const FieldSpec& field) { return field.order() <= 256 ? 1 : 2; }

std::size_t data_width(const FieldSpec& field) {
  if (field.order() < 256) {
    fail(ErrorKind::inadmissible, "field " + field.to_string() + " is too small to carry file bytes (need >= 256 elements)");
  }
  return field.order() == 65536 ? 2 : 1;
}

}  // namespace coopmds
