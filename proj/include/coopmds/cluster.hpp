#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "coopmds/codespec.hpp"
#include "coopmds/repair.hpp"

namespace coopmds {

enum class EventType { fail, repair, verify };

struct ScenarioEvent {
  EventType type = EventType::verify;
  std::vector<NodeId> nodes;    // fail
  std::vector<NodeId> helpers;  // repair
  RepairMode mode = RepairMode::cooperative;
};

struct ClusterConfig {
  CodeSpec spec;
  std::uint64_t seed = 0;
  std::vector<ScenarioEvent> events;
};

/// Per-link symbol counts observed on the simulated bus, with a logical-time log.
class TrafficMeter {
 public:
  struct Entry {
    std::uint64_t time = 0;
    int round = 0;
    NodeId from = 0;
    NodeId to = 0;
    std::uint64_t symbols = 0;
  };

  void count(std::uint64_t time, int round, NodeId from, NodeId to, std::uint64_t symbols);
  std::uint64_t total() const { return total_; }
  std::uint64_t link(NodeId from, NodeId to) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::uint64_t total_ = 0;
};

/// Code descriptor used by scenario files and reports:
/// {"family": "fixed"|"any"|"universal"|"concatenated", "n", "k", "h", "d", "field", "components"}.
CodeSpec spec_from_json(const nlohmann::json& j, std::uint64_t cap = kDefaultSubpacketizationCap);
nlohmann::json spec_to_json(const CodeSpec& spec);

ClusterConfig parse_scenario(const nlohmann::json& j, std::uint64_t cap = kDefaultSubpacketizationCap);

/// Runs the events in order. `threads` only parallelizes node computations
/// within a round; the report is identical for every value.
nlohmann::json run_scenario(const ClusterConfig& config, unsigned threads = 1);

struct SweepRow {
  std::vector<NodeId> failed;
  std::vector<NodeId> helpers;
  int h = 0;
  int d = 0;
  std::uint64_t l = 0;
  bool has_coop = false;
  bool has_central = false;
  std::uint64_t coop_measured = 0;
  Rational coop_bound;
  bool coop_restored = false;
  bool coop_uniform = false;
  std::uint64_t central_measured = 0;
  Rational central_bound;
  bool central_restored = false;

  bool optimal() const;
};

/// Every admissible (F, R) of the spec: all d-subsets R of the survivors, F = {1..h}
/// for fixed-subset components and every h-subset otherwise. Centralized repair is fed
/// the cooperative run's round-1 messages when both modes are requested.
std::vector<SweepRow> inject_and_sweep(const CodeSpec& spec, const std::vector<RepairMode>& modes,
                                       std::uint64_t seed = 1);

/// Random codeword from a seeded generator (symbols are rng() % order).
CodewordArray random_codeword(const CodeSpec& spec, std::uint64_t seed);

/// All size-`size` subsets of `pool`, lexicographic.
std::vector<std::vector<NodeId>> subsets_of(const std::vector<NodeId>& pool, int size);

}  // namespace coopmds
