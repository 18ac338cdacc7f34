#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "coopmds/codec.hpp"
#include "coopmds/codespec.hpp"

namespace coopmds {

struct RepairContext {
  std::vector<NodeId> failed;
  std::vector<NodeId> helpers;
};

enum class RepairMode { cooperative, centralized, naive };

const char* to_string(RepairMode mode);
/// Accepts "coop", "cooperative", "central", "centralized" and "naive".
RepairMode parse_repair_mode(std::string_view text);

/// Identifies one transferred symbol: `subcode` is the base row of its row
/// class, `offset` the rank in A of the index vector b the sum runs over.
struct SymbolTag {
  std::uint64_t subcode = 0;
  std::uint32_t offset = 0;
  friend bool operator==(const SymbolTag&, const SymbolTag&) = default;
};

struct RepairMessage {
  int round = 1;
  NodeId from = 0;
  NodeId to = 0;
  std::vector<SymbolTag> tags;
  std::vector<FieldElement> payload;

  std::size_t size() const { return payload.size(); }
  friend bool operator==(const RepairMessage&, const RepairMessage&) = default;
};

/// Destination id used for the virtual data center in centralized repair.
inline constexpr NodeId kDataCenter = 0;

/// Symbol counts per (round, from, to).
class BandwidthLedger {
 public:
  void record(int round, NodeId from, NodeId to, std::uint64_t symbols);

  std::uint64_t total() const;
  std::uint64_t round_total(int round) const;
  /// Summed over rounds.
  std::uint64_t link(NodeId from, NodeId to) const;
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> links() const;
  const std::map<std::tuple<int, NodeId, NodeId>, std::uint64_t>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::tuple<int, NodeId, NodeId>, std::uint64_t> entries_;
};

/// Non-negative reduced fraction.
class Rational {
 public:
  Rational(std::uint64_t num = 0, std::uint64_t den = 1);

  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  std::string to_string() const;
  nlohmann::json to_json() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator==(const Rational& a, std::uint64_t b) { return a.den_ == 1 && a.num_ == b; }

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

/// h*(h+d-1)*l / (h+d-k). When n > 0 the full constraint h + d <= n is also checked.
Rational cutset_cooperative(int h, int d, int k, std::uint64_t l, int n = 0);
/// h*d*l / (h+d-k).
Rational cutset_centralized(int h, int d, int k, std::uint64_t l, int n = 0);

/// Everything the participants agree on before any symbol moves: the code,
/// (F, R), which component repairs them and the row-class bookkeeping.
struct RepairPlan {
  CodeSpec spec;
  std::vector<NodeId> failed;   // ascending
  std::vector<NodeId> helpers;  // ascending
  std::size_t component = 0;    // index into spec.components() for concatenated specs
  int h = 0;
  int d = 0;
  int k = 0;
  int s = 0;
  std::uint64_t subset = 1;       // g(F) within the repairing component
  std::uint64_t stride = 1;       // row distance between consecutive ranks of block g(F)
  std::uint64_t block_size = 0;   // |A|
  std::uint64_t class_count = 0;  // l / |A|
  std::vector<Digits> A;
  // Per failed position u (0-based): ranks of b in L_u, then ladder[u][x][v] = rank of b(u, v)
  // and slot_of[u][rank] = x or -1.
  std::vector<std::vector<std::uint32_t>> L;
  std::vector<std::vector<std::vector<std::uint32_t>>> ladder;
  std::vector<std::vector<std::int32_t>> slot_of;

  std::uint64_t class_base(std::uint64_t c) const;
  /// Inverse of class_base; throws if `base` is not the base row of a class.
  std::uint64_t class_of(std::uint64_t base) const;
  std::uint64_t row(std::uint64_t base, std::uint32_t rank) const { return base + stride * rank; }
  /// 1-based position of a failed node within F.
  int position(NodeId failed_node) const;
  /// l / (h + d - k): symbols per link and per round.
  std::uint64_t per_link() const { return spec.rows() / static_cast<std::uint64_t>(h + d - k); }
};

RepairPlan plan_repair(const CodeSpec& spec, const RepairContext& ctx);

/// Round 1, at helper j: one sum per row class and per b in L_u, read from j's own column.
RepairMessage round1_helper_payload(const RepairPlan& plan, NodeId helper, NodeId failed,
                                    std::span<const FieldElement> column);

/// A failed node's private state between the rounds.
struct FailedNodeState {
  NodeId node = 0;
  int position = 0;
  std::vector<FieldElement> column;
  std::vector<std::uint8_t> known;
  std::vector<RepairMessage> outgoing;  // round-2 cross-sums, one per other failed node
};

/// Round 1, at a failed node: recovers its entries on B_u and the cross-sums
/// owed to the other failed nodes, from exactly one message per helper.
FailedNodeState round1_solve(const RepairPlan& plan, NodeId failed, std::span<const RepairMessage> received);

/// Round 2: isolates the remaining entries from the other failed nodes' cross-sums.
std::vector<FieldElement> round2_exchange_and_finish(const RepairPlan& plan, FailedNodeState& state,
                                                     std::span<const RepairMessage> received);

struct RepairTranscript {
  RepairMode mode = RepairMode::cooperative;
  int n = 0;
  int k = 0;
  int h = 0;
  int d = 0;
  std::uint64_t l = 0;
  std::vector<NodeId> failed;
  std::vector<NodeId> helpers;
  std::vector<RepairMessage> messages;
  BandwidthLedger ledger;
  Rational bound;     // cut-set value for the mode
  Rational quota;     // expected symbols per link

  bool optimal() const;
  /// Every link carries exactly `quota` symbols.
  bool uniform() const;
};

nlohmann::json transcript_json(const RepairTranscript& transcript);

struct RepairOutcome {
  CodewordArray restored;
  RepairTranscript transcript;
};

/// Columns in F must be erased and helper columns present; other columns are never read.
RepairOutcome cooperative_repair(const CodewordArray& damaged, const RepairContext& ctx);
RepairOutcome cooperative_repair(const RepairPlan& plan, const CodewordArray& damaged);

RepairOutcome centralized_repair_from_round1(const CodewordArray& damaged, const RepairContext& ctx);
RepairOutcome centralized_repair_from_round1(const RepairPlan& plan, const CodewordArray& damaged);
/// Centralized repair from an externally supplied round-1 message multiset.
RepairOutcome centralized_repair_from_messages(const RepairPlan& plan, const CodewordArray& damaged,
                                               std::span<const RepairMessage> round1);

/// Baseline: every failed node downloads k whole helper columns and decodes.
RepairOutcome naive_repair(const CodewordArray& damaged, const RepairContext& ctx);

/// Dispatches on mode; an empty F is a no-op with an empty ledger.
RepairOutcome run_repair(RepairMode mode, const CodewordArray& damaged, const RepairContext& ctx);

}  // namespace coopmds
