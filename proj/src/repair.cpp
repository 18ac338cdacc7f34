#include "coopmds/repair.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "coopmds/error.hpp"
#include "coopmds/grs.hpp"

namespace coopmds {

const char* to_string(RepairMode mode) {
  switch (mode) {
    case RepairMode::cooperative: return "cooperative";
    case RepairMode::centralized: return "centralized";
    case RepairMode::naive: return "naive";
  }
  return "unknown";
}

RepairMode parse_repair_mode(std::string_view text) {
  if (text == "coop" || text == "cooperative") return RepairMode::cooperative;
  if (text == "central" || text == "centralized") return RepairMode::centralized;
  if (text == "naive") return RepairMode::naive;
  fail(ErrorKind::invalid_argument, "unknown repair mode '" + std::string(text) + "'");
}

// --- ledger and bounds --------------------------------------------------

void BandwidthLedger::record(int round, NodeId from, NodeId to, std::uint64_t symbols) {
  entries_[{round, from, to}] += symbols;
}

std::uint64_t BandwidthLedger::total() const {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : entries_) sum += count;
  return sum;
}

std::uint64_t BandwidthLedger::round_total(int round) const {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : entries_) {
    if (std::get<0>(key) == round) sum += count;
  }
  return sum;
}

std::uint64_t BandwidthLedger::link(NodeId from, NodeId to) const {
  std::uint64_t sum = 0;
  for (const auto& [key, count] : entries_) {
    if (std::get<1>(key) == from && std::get<2>(key) == to) sum += count;
  }
  return sum;
}

std::map<std::pair<NodeId, NodeId>, std::uint64_t> BandwidthLedger::links() const {
  std::map<std::pair<NodeId, NodeId>, std::uint64_t> out;
  for (const auto& [key, count] : entries_) out[{std::get<1>(key), std::get<2>(key)}] += count;
  return out;
}

Rational::Rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) fail(ErrorKind::invalid_argument, "zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::to_string() const {
  return is_integer() ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

nlohmann::json Rational::to_json() const {
  if (is_integer()) return num_;
  return to_string();
}

namespace {

void check_bound_args(int h, int d, int k, std::uint64_t l, int n) {
  if (k < 1 || h < 1 || d < k || l < 1) {
    fail(ErrorKind::inadmissible, "cut-set bound needs h >= 1, d >= k >= 1 and l >= 1");
  }
  if (n > 0 && h + d > n) {
    fail(ErrorKind::inadmissible, "cut-set bound needs h + d <= n (h = " + std::to_string(h) + ", d = " +
                                      std::to_string(d) + ", n = " + std::to_string(n) + ")");
  }
}

}  // namespace

Rational cutset_cooperative(int h, int d, int k, std::uint64_t l, int n) {
  check_bound_args(h, d, k, l, n);
  const auto uh = static_cast<std::uint64_t>(h);
  return Rational(uh * static_cast<std::uint64_t>(h + d - 1) * l, static_cast<std::uint64_t>(h + d - k));
}

Rational cutset_centralized(int h, int d, int k, std::uint64_t l, int n) {
  check_bound_args(h, d, k, l, n);
  return Rational(static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(d) * l,
                  static_cast<std::uint64_t>(h + d - k));
}

// --- planning -----------------------------------------------------------

namespace {

std::vector<NodeId> normalized(std::vector<NodeId> nodes, int n, const char* what) {
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    fail(ErrorKind::invalid_argument, std::string("duplicate node in ") + what);
  }
  for (NodeId i : nodes) {
    if (i < 1 || i > n) fail(ErrorKind::invalid_argument, std::string(what) + " node " + std::to_string(i) + " out of range");
  }
  return nodes;
}

void validate_context(const CodeSpec& spec, RepairContext& ctx) {
  ctx.failed = normalized(ctx.failed, spec.n(), "failed set");
  ctx.helpers = normalized(ctx.helpers, spec.n(), "helper set");
  for (NodeId i : ctx.failed) {
    if (std::binary_search(ctx.helpers.begin(), ctx.helpers.end(), i)) {
      fail(ErrorKind::invalid_argument, "node " + std::to_string(i) + " is both failed and a helper");
    }
  }
  const int r = spec.n() - spec.k();
  if (static_cast<int>(ctx.failed.size()) > r) {
    fail(ErrorKind::inadmissible, std::to_string(ctx.failed.size()) + " failures exceed the erasure tolerance r = " +
                                      std::to_string(r));
  }
  if (static_cast<int>(ctx.helpers.size()) < spec.k()) {
    fail(ErrorKind::inadmissible, "need at least k = " + std::to_string(spec.k()) + " helpers");
  }
}

void check_damaged(const RepairPlan& plan, const CodewordArray& damaged) {
  if (damaged.n() != plan.spec.n() || damaged.rows() != plan.spec.rows() ||
      serialize(damaged.spec()) != serialize(plan.spec)) {
    fail(ErrorKind::invalid_argument, "codeword does not belong to the planned code");
  }
  for (NodeId i : plan.failed) {
    if (!damaged.is_erased(i)) fail(ErrorKind::invalid_argument, "failed node " + std::to_string(i) + " is not erased");
  }
  for (NodeId j : plan.helpers) {
    if (damaged.is_erased(j)) fail(ErrorKind::invalid_argument, "helper " + std::to_string(j) + " is erased");
  }
}

}  // namespace

RepairPlan plan_repair(const CodeSpec& spec, const RepairContext& ctx_in) {
  RepairContext ctx = ctx_in;
  validate_context(spec, ctx);
  const int h = static_cast<int>(ctx.failed.size());
  const int d = static_cast<int>(ctx.helpers.size());
  if (h == 0) fail(ErrorKind::invalid_argument, "nothing to repair");

  RepairPlan plan;
  plan.spec = spec;
  plan.failed = ctx.failed;
  plan.helpers = ctx.helpers;
  plan.h = h;
  plan.d = d;
  plan.k = spec.k();

  const CodeSpec* sub = &spec;
  std::uint64_t outer_stride = 1;
  if (spec.family() == Family::concatenated) {
    const auto& comps = spec.components();
    std::size_t j = 0;
    while (j < comps.size() && !(comps[j].params().h == h && comps[j].params().d == d)) ++j;
    if (j == comps.size()) {
      fail(ErrorKind::inadmissible, "no component of the concatenated code repairs (h, d) = (" + std::to_string(h) +
                                        ", " + std::to_string(d) + ")");
    }
    plan.component = j;
    sub = &comps[j];
    outer_stride = spec.component_stride(j);
  }
  const CodeParams& p = sub->params();
  if (p.h != h || p.d != d) {
    fail(ErrorKind::inadmissible, "code is built for (h, d) = (" + std::to_string(p.h) + ", " + std::to_string(p.d) +
                                      "), not (" + std::to_string(h) + ", " + std::to_string(d) + ")");
  }
  if (sub->family() == Family::fixed_subset) {
    for (int u = 0; u < h; ++u) {
      if (ctx.failed[static_cast<std::size_t>(u)] != u + 1) {
        fail(ErrorKind::inadmissible, "family/F mismatch: a fixed-subset code only repairs nodes 1.." + std::to_string(h));
      }
    }
    plan.subset = 1;
  } else {
    plan.subset = subset_rank(ctx.failed);
  }
  plan.s = p.s;
  plan.A = sub->index_set();
  plan.block_size = plan.A.size();
  std::uint64_t inner = 1;
  for (std::uint64_t b = 1; b < plan.subset; ++b) inner *= plan.block_size;
  plan.stride = outer_stride * inner;
  plan.class_count = spec.rows() / plan.block_size;

  const int s = plan.s;
  plan.L.resize(static_cast<std::size_t>(h));
  plan.ladder.resize(static_cast<std::size_t>(h));
  plan.slot_of.assign(static_cast<std::size_t>(h), std::vector<std::int32_t>(plan.block_size, -1));
  for (int u = 0; u < h; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    for (std::uint32_t rank = 0; rank < plan.block_size; ++rank) {
      const Digits& b = plan.A[rank];
      bool in_L = b[uu] == 0;
      for (int j = 0; j < h && in_L; ++j) {
        if (j != u && b[static_cast<std::size_t>(j)] > s - 2) in_L = false;
      }
      if (!in_L) continue;
      plan.slot_of[uu][rank] = static_cast<std::int32_t>(plan.L[uu].size());
      plan.L[uu].push_back(rank);
      std::vector<std::uint32_t> rungs;
      Digits bv = b;
      for (int v = 0; v < s; ++v) {
        bv[uu] = static_cast<std::uint8_t>(v);
        rungs.push_back(static_cast<std::uint32_t>(sub->rank_in_index_set(bv)));
      }
      plan.ladder[uu].push_back(std::move(rungs));
    }
  }
  return plan;
}

std::uint64_t RepairPlan::class_base(std::uint64_t c) const {
  if (c >= class_count) fail(ErrorKind::invalid_argument, "row class out of range");
  return c % stride + (c / stride) * stride * block_size;
}

std::uint64_t RepairPlan::class_of(std::uint64_t base) const {
  const std::uint64_t q = base / stride;
  if (base >= spec.rows() || q % block_size != 0) {
    fail(ErrorKind::invalid_argument, "tag subcode " + std::to_string(base) + " is not a row-class base");
  }
  return base % stride + (q / block_size) * stride;
}

int RepairPlan::position(NodeId failed_node) const {
  auto it = std::lower_bound(failed.begin(), failed.end(), failed_node);
  if (it == failed.end() || *it != failed_node) {
    fail(ErrorKind::invalid_argument, "node " + std::to_string(failed_node) + " is not in the failed set");
  }
  return static_cast<int>(it - failed.begin()) + 1;
}

// --- round 1 ------------------------------------------------------------

RepairMessage round1_helper_payload(const RepairPlan& plan, NodeId helper, NodeId failed,
                                    std::span<const FieldElement> column) {
  if (!std::binary_search(plan.helpers.begin(), plan.helpers.end(), helper)) {
    fail(ErrorKind::invalid_argument, "node " + std::to_string(helper) + " is not a helper");
  }
  const auto u = static_cast<std::size_t>(plan.position(failed) - 1);
  if (column.size() != plan.spec.rows()) fail(ErrorKind::invalid_argument, "helper column has the wrong length");
  const Field& f = plan.spec.field();
  RepairMessage msg;
  msg.round = 1;
  msg.from = helper;
  msg.to = failed;
  const std::size_t count = plan.class_count * plan.L[u].size();
  msg.tags.reserve(count);
  msg.payload.reserve(count);
  for (std::uint64_t c = 0; c < plan.class_count; ++c) {
    const std::uint64_t base = plan.class_base(c);
    for (std::size_t x = 0; x < plan.L[u].size(); ++x) {
      FieldElement sum = f.zero();
      for (std::uint32_t rank : plan.ladder[u][x]) sum = f.add(sum, column[plan.row(base, rank)]);
      msg.tags.push_back({base, plan.L[u][x]});
      msg.payload.push_back(sum);
    }
  }
  return msg;
}

namespace {

// Maps a message tag to its slot c * |L_u| + x.
std::size_t slot_for(const RepairPlan& plan, std::size_t u, const SymbolTag& tag) {
  const std::uint64_t c = plan.class_of(tag.subcode);
  if (tag.offset >= plan.block_size || plan.slot_of[u][tag.offset] < 0) {
    fail(ErrorKind::invalid_argument, "tag offset " + std::to_string(tag.offset) + " is not in L_u");
  }
  return static_cast<std::size_t>(c * plan.L[u].size()) + static_cast<std::size_t>(plan.slot_of[u][tag.offset]);
}

}  // namespace

FailedNodeState round1_solve(const RepairPlan& plan, NodeId failed, std::span<const RepairMessage> received) {
  const int pos = plan.position(failed);
  const auto u = static_cast<std::size_t>(pos - 1);
  const std::size_t per_class = plan.L[u].size();
  const std::size_t slots = static_cast<std::size_t>(plan.class_count) * per_class;
  const auto d = plan.helpers.size();

  // mu[h * slots + slot]: helper h's sum for that slot
  std::vector<FieldElement> mu(d * slots);
  std::vector<std::uint8_t> filled(d * slots, 0);
  std::vector<bool> seen(d, false);
  for (const RepairMessage& msg : received) {
    if (msg.round != 1 || msg.to != failed) fail(ErrorKind::invalid_argument, "round-1 message addressed elsewhere");
    auto it = std::lower_bound(plan.helpers.begin(), plan.helpers.end(), msg.from);
    if (it == plan.helpers.end() || *it != msg.from) {
      fail(ErrorKind::invalid_argument, "round-1 message from non-helper " + std::to_string(msg.from));
    }
    const auto hj = static_cast<std::size_t>(it - plan.helpers.begin());
    if (seen[hj]) fail(ErrorKind::invalid_argument, "duplicate payload from helper " + std::to_string(msg.from));
    seen[hj] = true;
    if (msg.tags.size() != msg.payload.size()) fail(ErrorKind::invalid_argument, "tag/payload length mismatch");
    for (std::size_t t = 0; t < msg.tags.size(); ++t) {
      const std::size_t cell = hj * slots + slot_for(plan, u, msg.tags[t]);
      if (filled[cell]) fail(ErrorKind::invalid_argument, "duplicate tag in helper payload");
      filled[cell] = 1;
      mu[cell] = msg.payload[t];
    }
  }
  for (std::size_t hj = 0; hj < d; ++hj) {
    if (!seen[hj]) fail(ErrorKind::invalid_argument, "missing payload from helper " + std::to_string(plan.helpers[hj]));
  }
  if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
    fail(ErrorKind::invalid_argument, "incomplete helper payload");
  }

  // Kernel layout: positions 0..s-1 hold node `failed` at v = 0..s-1, then
  // every other node in ascending order.
  const int n = plan.spec.n();
  const auto s = static_cast<std::size_t>(plan.s);
  std::vector<NodeId> others;
  for (NodeId j = 1; j <= n; ++j) {
    if (j != failed) others.push_back(j);
  }
  std::vector<std::size_t> unknown;
  for (std::size_t v = 0; v < s; ++v) unknown.push_back(v);
  std::vector<std::ptrdiff_t> helper_of(others.size(), -1);
  std::vector<std::pair<NodeId, std::size_t>> peers;  // other failed nodes and their kernel positions
  for (std::size_t o = 0; o < others.size(); ++o) {
    auto it = std::lower_bound(plan.helpers.begin(), plan.helpers.end(), others[o]);
    if (it != plan.helpers.end() && *it == others[o]) {
      helper_of[o] = it - plan.helpers.begin();
    } else {
      unknown.push_back(s + o);
    }
    if (std::binary_search(plan.failed.begin(), plan.failed.end(), others[o])) peers.emplace_back(others[o], s + o);
  }

  FailedNodeState state;
  state.node = failed;
  state.position = pos;
  state.column.assign(static_cast<std::size_t>(plan.spec.rows()), FieldElement());
  state.known.assign(state.column.size(), 0);
  for (const auto& [peer, kp] : peers) {
    RepairMessage out;
    out.round = 2;
    out.from = failed;
    out.to = peer;
    out.tags.reserve(slots);
    out.payload.reserve(slots);
    state.outgoing.push_back(std::move(out));
  }

  const Field& f = plan.spec.field();
  std::vector<FieldElement> points(s + others.size());
  std::vector<FieldElement> word(points.size());
  for (std::uint64_t c = 0; c < plan.class_count; ++c) {
    const std::uint64_t base = plan.class_base(c);
    for (std::size_t x = 0; x < per_class; ++x) {
      const auto& rungs = plan.ladder[u][x];
      const std::uint64_t row0 = plan.row(base, rungs[0]);
      for (std::size_t v = 0; v < s; ++v) points[v] = plan.spec.coeff(plan.row(base, rungs[v]), failed);
      const auto coeffs = plan.spec.row_coeffs(row0);
      const std::size_t slot = static_cast<std::size_t>(c) * per_class + x;
      for (std::size_t o = 0; o < others.size(); ++o) {
        points[s + o] = coeffs[static_cast<std::size_t>(others[o] - 1)];
        word[s + o] = helper_of[o] >= 0 ? mu[static_cast<std::size_t>(helper_of[o]) * slots + slot] : f.zero();
      }
      for (std::size_t v = 0; v < s; ++v) word[v] = f.zero();
      grs_fill_unknowns(f, points, word, unknown);
      for (std::size_t v = 0; v < s; ++v) {
        const std::uint64_t row = plan.row(base, rungs[v]);
        state.column[row] = word[v];
        state.known[row] = 1;
      }
      for (std::size_t p = 0; p < peers.size(); ++p) {
        state.outgoing[p].tags.push_back({base, plan.L[u][x]});
        state.outgoing[p].payload.push_back(word[peers[p].second]);
      }
    }
  }
  return state;
}

// --- round 2 ------------------------------------------------------------

std::vector<FieldElement> round2_exchange_and_finish(const RepairPlan& plan, FailedNodeState& state,
                                                     std::span<const RepairMessage> received) {
  const Field& f = plan.spec.field();
  const auto s = static_cast<std::size_t>(plan.s);
  std::vector<bool> seen(plan.failed.size(), false);
  for (const RepairMessage& msg : received) {
    if (msg.round != 2 || msg.to != state.node || msg.from == state.node) {
      fail(ErrorKind::invalid_argument, "round-2 message addressed elsewhere");
    }
    const auto u2 = static_cast<std::size_t>(plan.position(msg.from) - 1);
    if (seen[u2]) fail(ErrorKind::invalid_argument, "duplicate cross-sums from node " + std::to_string(msg.from));
    seen[u2] = true;
    if (msg.tags.size() != msg.payload.size()) fail(ErrorKind::invalid_argument, "tag/payload length mismatch");
    for (std::size_t t = 0; t < msg.tags.size(); ++t) {
      const SymbolTag& tag = msg.tags[t];
      const std::size_t slot = slot_for(plan, u2, tag);
      const auto& rungs = plan.ladder[u2][slot % plan.L[u2].size()];
      // Every rung but the top lies in A_0, which round 1 already recovered.
      FieldElement value = msg.payload[t];
      for (std::size_t v = 0; v + 1 < s; ++v) {
        const std::uint64_t row = plan.row(tag.subcode, rungs[v]);
        if (!state.known[row]) fail(ErrorKind::invalid_argument, "round-2 sum references an unrecovered entry");
        value = f.sub(value, state.column[row]);
      }
      const std::uint64_t top = plan.row(tag.subcode, rungs[s - 1]);
      state.column[top] = value;
      state.known[top] = 1;
    }
  }
  for (std::size_t p = 0; p < plan.failed.size(); ++p) {
    if (!seen[p] && plan.failed[p] != state.node) {
      fail(ErrorKind::invalid_argument, "missing cross-sums from node " + std::to_string(plan.failed[p]));
    }
  }
  if (std::find(state.known.begin(), state.known.end(), 0) != state.known.end()) {
    fail(ErrorKind::invalid_argument, "column incomplete after round 2");
  }
  return state.column;
}

// --- drivers ------------------------------------------------------------

bool RepairTranscript::optimal() const { return ledger.total() == bound.numerator() && bound.is_integer(); }

bool RepairTranscript::uniform() const {
  if (!quota.is_integer()) return false;
  for (const auto& [link, count] : ledger.links()) {
    if (count != quota.numerator()) return false;
  }
  return true;
}

nlohmann::json transcript_json(const RepairTranscript& tr) {
  nlohmann::json out;
  out["mode"] = to_string(tr.mode);
  out["n"] = tr.n;
  out["k"] = tr.k;
  out["h"] = tr.h;
  out["d"] = tr.d;
  out["l"] = tr.l;
  out["failed"] = tr.failed;
  out["helpers"] = tr.helpers;
  nlohmann::json links = nlohmann::json::array();
  for (const auto& [key, count] : tr.ledger.entries()) {
    links.push_back({{"round", std::get<0>(key)}, {"from", std::get<1>(key)}, {"to", std::get<2>(key)}, {"symbols", count}});
  }
  out["links"] = links;
  out["rounds"] = {{"1", tr.ledger.round_total(1)}, {"2", tr.ledger.round_total(2)}};
  out["total"] = tr.ledger.total();
  out["bound"] = tr.bound.to_json();
  out["per_link_quota"] = tr.quota.to_json();
  out["uniform"] = tr.uniform();
  out["optimal"] = tr.optimal();
  return out;
}

namespace {

RepairTranscript start_transcript(RepairMode mode, const CodeSpec& spec, const std::vector<NodeId>& failed,
                                  const std::vector<NodeId>& helpers) {
  RepairTranscript tr;
  tr.mode = mode;
  tr.n = spec.n();
  tr.k = spec.k();
  tr.h = static_cast<int>(failed.size());
  tr.d = static_cast<int>(helpers.size());
  tr.l = spec.rows();
  tr.failed = failed;
  tr.helpers = helpers;
  if (tr.h == 0) return tr;
  const auto denom = static_cast<std::uint64_t>(tr.h + tr.d - tr.k);
  switch (mode) {
    case RepairMode::cooperative:
      tr.bound = cutset_cooperative(tr.h, tr.d, tr.k, tr.l, tr.n);
      tr.quota = Rational(tr.l, denom);
      break;
    case RepairMode::centralized:
      tr.bound = cutset_centralized(tr.h, tr.d, tr.k, tr.l, tr.n);
      tr.quota = Rational(static_cast<std::uint64_t>(tr.h) * tr.l, denom);
      break;
    case RepairMode::naive:
      tr.bound = cutset_centralized(tr.h, std::max(tr.d, tr.k), tr.k, tr.l, tr.n);
      tr.quota = Rational(tr.l);
      break;
  }
  return tr;
}

std::vector<const RepairMessage*> addressed_to(std::span<const RepairMessage> messages, NodeId node) {
  std::vector<const RepairMessage*> out;
  for (const auto& m : messages) {
    if (m.to == node) out.push_back(&m);
  }
  return out;
}

std::vector<RepairMessage> copies(const std::vector<const RepairMessage*>& ptrs) {
  std::vector<RepairMessage> out;
  out.reserve(ptrs.size());
  for (const auto* p : ptrs) out.push_back(*p);
  return out;
}

std::vector<RepairMessage> helper_round(const RepairPlan& plan, const CodewordArray& damaged) {
  std::vector<RepairMessage> out;
  for (NodeId j : plan.helpers) {
    const auto column = damaged.column(j);
    for (NodeId i : plan.failed) out.push_back(round1_helper_payload(plan, j, i, column));
  }
  return out;
}

}  // namespace

RepairOutcome cooperative_repair(const RepairPlan& plan, const CodewordArray& damaged) {
  check_damaged(plan, damaged);
  RepairOutcome out{damaged, start_transcript(RepairMode::cooperative, plan.spec, plan.failed, plan.helpers)};
  std::vector<RepairMessage> round1 = helper_round(plan, damaged);
  for (const auto& m : round1) out.transcript.ledger.record(1, m.from, m.to, m.size());

  std::vector<FailedNodeState> states;
  for (NodeId i : plan.failed) {
    // Each failed node sees only the messages addressed to it.
    const auto inbox = copies(addressed_to(round1, i));
    states.push_back(round1_solve(plan, i, inbox));
  }
  std::vector<RepairMessage> round2;
  for (auto& st : states) {
    for (auto& m : st.outgoing) {
      out.transcript.ledger.record(2, m.from, m.to, m.size());
      round2.push_back(std::move(m));
    }
    st.outgoing.clear();
  }
  for (auto& st : states) {
    const auto inbox = copies(addressed_to(round2, st.node));
    out.restored.set_column(st.node, round2_exchange_and_finish(plan, st, inbox));
  }
  out.transcript.messages = std::move(round1);
  out.transcript.messages.insert(out.transcript.messages.end(), std::make_move_iterator(round2.begin()),
                                 std::make_move_iterator(round2.end()));
  return out;
}

RepairOutcome cooperative_repair(const CodewordArray& damaged, const RepairContext& ctx) {
  return cooperative_repair(plan_repair(damaged.spec(), ctx), damaged);
}

RepairOutcome centralized_repair_from_messages(const RepairPlan& plan, const CodewordArray& damaged,
                                               std::span<const RepairMessage> round1) {
  check_damaged(plan, damaged);
  RepairOutcome out{damaged, start_transcript(RepairMode::centralized, plan.spec, plan.failed, plan.helpers)};
  for (const auto& m : round1) {
    if (m.round != 1) fail(ErrorKind::invalid_argument, "centralized repair consumes round-1 messages only");
    out.transcript.ledger.record(1, m.from, kDataCenter, m.size());
  }
  // The data center replays both rounds locally; nothing beyond the pool is downloaded.
  std::vector<FailedNodeState> states;
  for (NodeId i : plan.failed) states.push_back(round1_solve(plan, i, copies(addressed_to(round1, i))));
  std::vector<RepairMessage> local;
  for (auto& st : states) {
    for (auto& m : st.outgoing) local.push_back(std::move(m));
    st.outgoing.clear();
  }
  for (auto& st : states) {
    out.restored.set_column(st.node, round2_exchange_and_finish(plan, st, copies(addressed_to(local, st.node))));
  }
  out.transcript.messages.assign(round1.begin(), round1.end());
  return out;
}

RepairOutcome centralized_repair_from_round1(const RepairPlan& plan, const CodewordArray& damaged) {
  check_damaged(plan, damaged);
  return centralized_repair_from_messages(plan, damaged, helper_round(plan, damaged));
}

RepairOutcome centralized_repair_from_round1(const CodewordArray& damaged, const RepairContext& ctx) {
  return centralized_repair_from_round1(plan_repair(damaged.spec(), ctx), damaged);
}

RepairOutcome naive_repair(const CodewordArray& damaged, const RepairContext& ctx_in) {
  RepairContext ctx = ctx_in;
  validate_context(damaged.spec(), ctx);
  RepairOutcome out{damaged, start_transcript(RepairMode::naive, damaged.spec(), ctx.failed, ctx.helpers)};
  if (ctx.failed.empty()) return out;
  for (NodeId i : ctx.failed) {
    if (!damaged.is_erased(i)) fail(ErrorKind::invalid_argument, "failed node " + std::to_string(i) + " is not erased");
  }
  std::map<NodeId, std::vector<FieldElement>> columns;
  for (std::size_t j = 0; j < static_cast<std::size_t>(damaged.spec().k()); ++j) {
    const NodeId helper = ctx.helpers[j];
    if (damaged.is_erased(helper)) fail(ErrorKind::invalid_argument, "helper " + std::to_string(helper) + " is erased");
    columns[helper] = damaged.column(helper);
  }
  const CodewordArray full = decode_from_columns(damaged.spec(), columns);
  for (NodeId i : ctx.failed) {
    for (const auto& [helper, col] : columns) {
      RepairMessage m;
      m.round = 1;
      m.from = helper;
      m.to = i;
      m.payload = col;
      for (std::uint64_t r = 0; r < col.size(); ++r) m.tags.push_back({r, 0});
      out.transcript.ledger.record(1, helper, i, m.size());
      out.transcript.messages.push_back(std::move(m));
    }
    out.restored.set_column(i, full.column(i));
  }
  return out;
}

RepairOutcome run_repair(RepairMode mode, const CodewordArray& damaged, const RepairContext& ctx) {
  if (ctx.failed.empty()) {
    RepairContext c = ctx;
    c.helpers = normalized(c.helpers, damaged.n(), "helper set");
    return {damaged, start_transcript(mode, damaged.spec(), {}, c.helpers)};
  }
  switch (mode) {
    case RepairMode::cooperative: return cooperative_repair(damaged, ctx);
    case RepairMode::centralized: return centralized_repair_from_round1(damaged, ctx);
    case RepairMode::naive: return naive_repair(damaged, ctx);
  }
  fail(ErrorKind::invalid_argument, "unknown repair mode");
}

}  // namespace coopmds
