#include "coopmds/cluster.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <tuple>

#include "coopmds/codec.hpp"
#include "coopmds/error.hpp"

namespace coopmds {

void TrafficMeter::count(std::uint64_t time, int round, NodeId from, NodeId to, std::uint64_t symbols) {
  entries_.push_back({time, round, from, to, symbols});
  total_ += symbols;
}

std::uint64_t TrafficMeter::link(NodeId from, NodeId to) const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) {
    if (e.from == from && e.to == to) sum += e.symbols;
  }
  return sum;
}

// --- descriptors --------------------------------------------------------

namespace {

FieldSpec field_or_default(const nlohmann::json& j, std::uint32_t required) {
  if (j.contains("field")) return FieldSpec::parse(j.at("field").get<std::string>());
  if (required <= 256) return FieldSpec::binary(8);
  return minimal_field(required);
}

std::uint32_t universal_field_demand(int n, int k) {
  std::uint32_t per_node = 1;
  for (auto [h, d] : universal_pairs(n, k)) per_node *= static_cast<std::uint32_t>(d + 1 - k);
  return per_node * static_cast<std::uint32_t>(n);
}

}  // namespace

CodeSpec spec_from_json(const nlohmann::json& j, std::uint64_t cap) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "universal") {
    const int n = j.at("n").get<int>();
    const int k = j.at("k").get<int>();
    return make_universal(n, k, field_or_default(j, universal_field_demand(n, k)), cap);
  }
  const Family fam = parse_family(family);
  if (fam == Family::concatenated) {
    // Components inherit n, k and the field from the enclosing descriptor.
    std::vector<nlohmann::json> descs;
    std::uint64_t demand = 0;
    for (const auto& c : j.at("components")) {
      nlohmann::json part = c;
      for (const char* key : {"n", "k", "field"}) {
        if (!part.contains(key) && j.contains(key)) part[key] = j[key];
      }
      if (part.at("family").get<std::string>() != "universal" &&
          parse_family(part.at("family").get<std::string>()) != Family::concatenated) {
        const auto p = code_params(parse_family(part.at("family").get<std::string>()), part.at("n").get<int>(),
                                   part.at("k").get<int>(), part.at("h").get<int>(), part.at("d").get<int>());
        demand = demand == 0 ? static_cast<std::uint64_t>(p.n) * static_cast<std::uint64_t>(p.s)
                             : demand * static_cast<std::uint64_t>(p.s);
      }
      descs.push_back(std::move(part));
    }
    if (!j.contains("field") && demand > 0) {
      const std::string field =
          field_or_default(nlohmann::json::object(), static_cast<std::uint32_t>(std::min<std::uint64_t>(demand, 1u << 16)))
              .to_string();
      for (auto& part : descs) {
        if (!part.contains("field")) part["field"] = field;
      }
    }
    std::vector<CodeSpec> parts;
    for (const auto& part : descs) parts.push_back(spec_from_json(part, cap));
    return concat(std::move(parts), cap);
  }
  const int n = j.at("n").get<int>();
  const int k = j.at("k").get<int>();
  const int h = j.at("h").get<int>();
  const int d = j.at("d").get<int>();
  return make_code(fam, n, k, h, d, field_or_default(j, required_field_order(fam, n, k, h, d)), cap);
}

nlohmann::json spec_to_json(const CodeSpec& spec) {
  nlohmann::json out;
  out["family"] = to_string(spec.family());
  out["n"] = spec.n();
  out["k"] = spec.k();
  if (spec.family() == Family::concatenated) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : spec.components()) comps.push_back(spec_to_json(c));
    out["components"] = comps;
  } else {
    out["h"] = spec.params().h;
    out["d"] = spec.params().d;
  }
  out["field"] = spec.field_spec().to_string();
  out["l"] = spec.rows();
  return out;
}

ClusterConfig parse_scenario(const nlohmann::json& j, std::uint64_t cap) {
  try {
    ClusterConfig config{spec_from_json(j.at("code"), cap), j.value("seed", std::uint64_t{0}), {}};
    for (const auto& e : j.value("events", nlohmann::json::array())) {
      ScenarioEvent ev;
      const std::string type = e.at("type").get<std::string>();
      if (type == "fail") {
        ev.type = EventType::fail;
        ev.nodes = e.at("nodes").get<std::vector<NodeId>>();
      } else if (type == "repair") {
        ev.type = EventType::repair;
        ev.helpers = e.at("helpers").get<std::vector<NodeId>>();
        ev.mode = parse_repair_mode(e.value("mode", std::string("cooperative")));
      } else if (type == "verify") {
        ev.type = EventType::verify;
      } else {
        fail(ErrorKind::invalid_argument, "unknown event type '" + type + "'");
      }
      config.events.push_back(std::move(ev));
    }
    return config;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::invalid_argument, std::string("malformed scenario: ") + ex.what());
  }
}

// --- helpers ------------------------------------------------------------

CodewordArray random_codeword(const CodeSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::uint64_t order = spec.field().order();
  std::vector<FieldElement> data(static_cast<std::size_t>(spec.rows()) * static_cast<std::size_t>(spec.k()));
  for (auto& x : data) x = FieldElement(static_cast<std::uint32_t>(rng() % order));
  return encode_systematic(spec, data);
}

std::vector<std::vector<NodeId>> subsets_of(const std::vector<NodeId>& pool, int size) {
  std::vector<std::vector<NodeId>> out;
  const int m = static_cast<int>(pool.size());
  if (size < 0 || size > m) return out;
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int j = 0; j < size; ++j) idx[static_cast<std::size_t>(j)] = j;
  while (true) {
    std::vector<NodeId> pick;
    for (int x : idx) pick.push_back(pool[static_cast<std::size_t>(x)]);
    out.push_back(std::move(pick));
    int pos = size - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - size + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

namespace {

// Runs fn(0..count-1) on up to `threads` workers; each call writes only its own slot.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// A storage node: its own column and whatever the bus delivered to it.
class StorageNode {
 public:
  explicit StorageNode(NodeId id) : id_(id) {}

  NodeId id() const { return id_; }
  bool alive() const { return alive_; }
  const std::vector<FieldElement>& column() const { return column_; }
  const std::vector<RepairMessage>& inbox() const { return inbox_; }

  void install(std::vector<FieldElement> column) {
    column_ = std::move(column);
    alive_ = true;
  }
  void crash() {
    column_.clear();
    inbox_.clear();
    alive_ = false;
  }
  void deliver(RepairMessage m) { inbox_.push_back(std::move(m)); }
  void clear_inbox() { inbox_.clear(); }

 private:
  NodeId id_;
  bool alive_ = false;
  std::vector<FieldElement> column_;
  std::vector<RepairMessage> inbox_;
};

// Logical-time message bus. Deliveries are ordered by (round, sender, receiver).
class Bus {
 public:
  explicit Bus(TrafficMeter& meter) : meter_(meter) {}

  void send(RepairMessage m, NodeId dest) { pending_.push_back({dest, std::move(m)}); }

  // Delivers everything queued; node 0 is the data center's mailbox.
  void flush(std::vector<StorageNode>& nodes, std::vector<RepairMessage>& center, std::uint64_t& clock,
             TrafficMeter& event_meter) {
    std::stable_sort(pending_.begin(), pending_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.second.round, a.second.from, a.first) < std::tie(b.second.round, b.second.from, b.first);
    });
    ++clock;
    for (auto& [dest, m] : pending_) {
      meter_.count(clock, m.round, m.from, dest, m.size());
      event_meter.count(clock, m.round, m.from, dest, m.size());
      if (dest == kDataCenter) {
        center.push_back(std::move(m));
      } else {
        nodes[static_cast<std::size_t>(dest - 1)].deliver(std::move(m));
      }
    }
    pending_.clear();
  }

 private:
  TrafficMeter& meter_;
  std::vector<std::pair<NodeId, RepairMessage>> pending_;
};

nlohmann::json meter_json(const TrafficMeter& meter) {
  nlohmann::json log = nlohmann::json::array();
  std::map<std::tuple<int, NodeId, NodeId>, std::uint64_t> links;
  for (const auto& e : meter.entries()) {
    log.push_back({e.time, e.round, e.from, e.to, e.symbols});
    links[{e.round, e.from, e.to}] += e.symbols;
  }
  nlohmann::json link_list = nlohmann::json::array();
  for (const auto& [key, count] : links) {
    link_list.push_back({{"round", std::get<0>(key)}, {"from", std::get<1>(key)}, {"to", std::get<2>(key)}, {"symbols", count}});
  }
  return {{"total", meter.total()}, {"links", link_list}, {"log", log}};
}

bool meter_matches(const TrafficMeter& meter, const BandwidthLedger& ledger) {
  std::map<std::tuple<int, NodeId, NodeId>, std::uint64_t> seen;
  for (const auto& e : meter.entries()) seen[{e.round, e.from, e.to}] += e.symbols;
  return seen == ledger.entries();
}

}  // namespace

nlohmann::json run_scenario(const ClusterConfig& config, unsigned threads) {
  const CodeSpec& spec = config.spec;
  const int n = spec.n();
  nlohmann::json report;
  report["code"] = spec_to_json(spec);
  report["seed"] = config.seed;
  report["events"] = nlohmann::json::array();
  TrafficMeter meter;
  if (config.events.empty()) {
    report["meter"] = meter_json(meter);
    return report;
  }

  const CodewordArray truth = random_codeword(spec, config.seed);
  std::vector<StorageNode> nodes;
  for (NodeId i = 1; i <= n; ++i) {
    nodes.emplace_back(i);
    nodes.back().install(truth.column(i));
  }
  Bus bus(meter);
  std::uint64_t clock = 0;

  for (std::size_t e = 0; e < config.events.size(); ++e) {
    const ScenarioEvent& ev = config.events[e];
    nlohmann::json out;
    out["index"] = e;
    if (ev.type == EventType::fail) {
      out["type"] = "fail";
      for (NodeId i : ev.nodes) {
        if (i < 1 || i > n) fail(ErrorKind::invalid_argument, "event " + std::to_string(e) + ": node out of range");
        nodes[static_cast<std::size_t>(i - 1)].crash();
      }
      std::vector<NodeId> sorted = ev.nodes;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      out["nodes"] = sorted;
    } else if (ev.type == EventType::verify) {
      out["type"] = "verify";
      std::vector<NodeId> down;
      std::vector<NodeId> mismatched;
      CodewordArray assembled(spec);
      for (const auto& node : nodes) {
        if (!node.alive()) {
          down.push_back(node.id());
          assembled.erase(node.id());
          continue;
        }
        if (node.column() != truth.column(node.id())) mismatched.push_back(node.id());
        assembled.set_column(node.id(), node.column());
      }
      const bool parity = down.empty() && verify_parity(assembled).ok;
      out["down"] = down;
      out["mismatched"] = mismatched;
      out["parity_ok"] = parity;
      out["ok"] = mismatched.empty() && down.empty() && parity;
    } else {
      out["type"] = "repair";
      out["mode"] = to_string(ev.mode);
      if (ev.mode == RepairMode::naive) fail(ErrorKind::invalid_argument, "the simulator runs cooperative or centralized repair");
      RepairContext ctx;
      for (const auto& node : nodes) {
        if (!node.alive()) ctx.failed.push_back(node.id());
      }
      ctx.helpers = ev.helpers;
      std::sort(ctx.helpers.begin(), ctx.helpers.end());
      if (static_cast<int>(ctx.failed.size()) > n - spec.k()) {
        fail(ErrorKind::inadmissible, "event " + std::to_string(e) + ": " + std::to_string(ctx.failed.size()) +
                                          " failed nodes exceed the erasure tolerance r = " + std::to_string(n - spec.k()));
      }
      for (NodeId j : ctx.helpers) {
        if (j < 1 || j > n || !nodes[static_cast<std::size_t>(j - 1)].alive()) {
          fail(ErrorKind::inadmissible, "event " + std::to_string(e) + ": helper " + std::to_string(j) + " is not live");
        }
      }
      out["failed"] = ctx.failed;
      out["helpers"] = ctx.helpers;
      TrafficMeter event_meter;
      if (ctx.failed.empty()) {
        out["meter"] = meter_json(event_meter);
        out["restored"] = true;
        report["events"].push_back(out);
        continue;
      }
      const RepairPlan plan = plan_repair(spec, ctx);
      const bool central = ev.mode == RepairMode::centralized;

      // Round 1: helpers compute from their own columns.
      std::vector<std::pair<NodeId, NodeId>> jobs;
      for (NodeId j : plan.helpers) {
        for (NodeId i : plan.failed) jobs.emplace_back(j, i);
      }
      std::vector<RepairMessage> round1(jobs.size());
      parallel_for(jobs.size(), threads, [&](std::size_t x) {
        const auto [j, i] = jobs[x];
        round1[x] = round1_helper_payload(plan, j, i, nodes[static_cast<std::size_t>(j - 1)].column());
      });
      std::vector<RepairMessage> center;
      for (auto& m : round1) {
        const NodeId dest = central ? kDataCenter : m.to;
        bus.send(std::move(m), dest);
      }
      bus.flush(nodes, center, clock, event_meter);

      std::vector<FailedNodeState> states(plan.failed.size());
      parallel_for(plan.failed.size(), threads, [&](std::size_t x) {
        const NodeId i = plan.failed[x];
        if (central) {
          std::vector<RepairMessage> mine;
          for (const auto& m : center) {
            if (m.to == i) mine.push_back(m);
          }
          states[x] = round1_solve(plan, i, mine);
        } else {
          states[x] = round1_solve(plan, i, nodes[static_cast<std::size_t>(i - 1)].inbox());
        }
      });
      for (NodeId i : plan.failed) nodes[static_cast<std::size_t>(i - 1)].clear_inbox();

      // Round 2: cooperative exchange over the bus, or local at the data center.
      std::vector<std::vector<RepairMessage>> local(plan.failed.size());
      for (auto& st : states) {
        for (auto& m : st.outgoing) {
          if (central) {
            local[static_cast<std::size_t>(plan.position(m.to) - 1)].push_back(std::move(m));
          } else {
            const NodeId dest = m.to;
            bus.send(std::move(m), dest);
          }
        }
        st.outgoing.clear();
      }
      if (!central) bus.flush(nodes, center, clock, event_meter);
      std::vector<std::vector<FieldElement>> columns(plan.failed.size());
      parallel_for(plan.failed.size(), threads, [&](std::size_t x) {
        const NodeId i = plan.failed[x];
        const auto& inbox = central ? local[x] : nodes[static_cast<std::size_t>(i - 1)].inbox();
        columns[x] = round2_exchange_and_finish(plan, states[x], inbox);
      });
      bool restored = true;
      for (std::size_t x = 0; x < plan.failed.size(); ++x) {
        const NodeId i = plan.failed[x];
        auto& node = nodes[static_cast<std::size_t>(i - 1)];
        node.clear_inbox();
        restored = restored && columns[x] == truth.column(i);
        node.install(std::move(columns[x]));
      }

      // Independent accounting by the repair module on the same inputs.
      CodewordArray damaged = truth;
      for (NodeId i = 1; i <= n; ++i) {
        if (std::find(plan.failed.begin(), plan.failed.end(), i) != plan.failed.end()) damaged.erase(i);
      }
      const RepairOutcome reference =
          central ? centralized_repair_from_round1(plan, damaged) : cooperative_repair(plan, damaged);
      out["meter"] = meter_json(event_meter);
      out["ledger"] = transcript_json(reference.transcript);
      out["meter_matches_ledger"] = meter_matches(event_meter, reference.transcript.ledger);
      out["bound"] = reference.transcript.bound.to_json();
      out["optimal"] = event_meter.total() == reference.transcript.bound.numerator() &&
                       reference.transcript.bound.is_integer();
      out["restored"] = restored;
    }
    report["events"].push_back(out);
  }
  report["meter"] = meter_json(meter);
  return report;
}

// --- sweep --------------------------------------------------------------

bool SweepRow::optimal() const {
  bool ok = true;
  if (has_coop) ok = ok && coop_restored && coop_uniform && coop_bound == coop_measured;
  if (has_central) ok = ok && central_restored && central_bound == central_measured;
  return ok;
}

std::vector<SweepRow> inject_and_sweep(const CodeSpec& spec, const std::vector<RepairMode>& modes, std::uint64_t seed) {
  const bool coop = std::find(modes.begin(), modes.end(), RepairMode::cooperative) != modes.end();
  const bool central = std::find(modes.begin(), modes.end(), RepairMode::centralized) != modes.end();
  const CodewordArray truth = random_codeword(spec, seed);
  const int n = spec.n();

  std::vector<CodeSpec> parts;
  if (spec.family() == Family::concatenated) {
    parts = spec.components();
  } else {
    parts.push_back(spec);
  }
  std::vector<NodeId> all;
  for (NodeId i = 1; i <= n; ++i) all.push_back(i);

  std::vector<SweepRow> rows;
  for (const auto& part : parts) {
    const int h = part.params().h;
    const int d = part.params().d;
    std::vector<std::vector<NodeId>> failed_sets;
    if (part.family() == Family::fixed_subset) {
      failed_sets.push_back(subsets_of(all, h).front());
    } else {
      failed_sets = subsets_of(all, h);
    }
    for (const auto& F : failed_sets) {
      std::vector<NodeId> rest;
      for (NodeId i : all) {
        if (std::find(F.begin(), F.end(), i) == F.end()) rest.push_back(i);
      }
      for (const auto& R : subsets_of(rest, d)) {
        SweepRow row;
        row.failed = F;
        row.helpers = R;
        row.h = h;
        row.d = d;
        row.l = spec.rows();
        CodewordArray damaged = truth;
        for (NodeId i : F) damaged.erase(i);
        const RepairPlan plan = plan_repair(spec, {F, R});
        std::vector<RepairMessage> round1;
        if (coop) {
          RepairOutcome out = cooperative_repair(plan, damaged);
          row.has_coop = true;
          row.coop_measured = out.transcript.ledger.total();
          row.coop_bound = out.transcript.bound;
          row.coop_restored = out.restored == truth;
          row.coop_uniform = out.transcript.uniform();
          for (auto& m : out.transcript.messages) {
            if (m.round == 1) round1.push_back(std::move(m));
          }
        }
        if (central) {
          RepairOutcome out = coop ? centralized_repair_from_messages(plan, damaged, round1)
                                   : centralized_repair_from_round1(plan, damaged);
          row.has_central = true;
          row.central_measured = out.transcript.ledger.total();
          row.central_bound = out.transcript.bound;
          row.central_restored = out.restored == truth;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace coopmds
