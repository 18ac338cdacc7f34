#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopmds/codespec.hpp"
#include "coopmds/repair.hpp"

namespace coopmds {

struct EncodeOptions {
  std::string input;
  std::string outdir;
  std::string family = "fixed";  // fixed | any | universal
  int n = 0;
  int k = 0;
  int h = 0;
  int d = 0;
  std::string field = "gf256";
  std::uint64_t cap = kDefaultSubpacketizationCap;
};

struct RepairOptions {
  std::string dir;
  std::vector<NodeId> failed;
  std::vector<NodeId> helpers;
  RepairMode mode = RepairMode::cooperative;
  std::uint64_t cap = kDefaultSubpacketizationCap;
};

struct BoundOptions {
  int n = 0;
  int k = 0;
  int h = 0;
  int d = 0;
  std::uint64_t l = 0;  // 0: use the fixed-subset sub-packetization
};

struct BenchOptions {
  std::string family = "fixed";  // fixed | any
  int n_min = 4;
  int n_max = 6;
  int k = 0;  // 0 = every admissible value; likewise h and d
  int h = 0;
  int d = 0;
  std::string field;  // empty: smallest field the family needs
  std::uint64_t cap = kDefaultSubpacketizationCap;
  std::uint64_t seed = 1;
};

/// Splits a file into n shard files; returns a summary.
nlohmann::json cmd_encode(const EncodeOptions& opt);
/// Regenerates the failed shards from the helper shards; returns the report.
nlohmann::json cmd_repair(const RepairOptions& opt);
/// Plain-text table of cut-set values and the per-link quota.
std::string cmd_bound(const BoundOptions& opt);
/// Checks checksums and parity of every shard in a directory; "ok" holds the verdict.
nlohmann::json cmd_verify(const std::string& dir, std::uint64_t cap = kDefaultSubpacketizationCap);
/// CSV: n,k,h,d,l,coop_measured,coop_bound,central_measured,central_bound,optimal.
std::string cmd_bench(const BenchOptions& opt);
nlohmann::json cmd_simulate(const std::string& scenario_path, unsigned threads,
                            std::uint64_t cap = kDefaultSubpacketizationCap);
/// Rebuilds the original file from any k intact shards.
nlohmann::json cmd_decode(const std::string& dir, const std::string& output,
                          std::uint64_t cap = kDefaultSubpacketizationCap);

/// Parses "1,2,5" (empty string gives an empty list).
std::vector<NodeId> parse_node_list(const std::string& text);
/// Parses "5" or "5..8".
std::pair<int, int> parse_range(const std::string& text);

}  // namespace coopmds
