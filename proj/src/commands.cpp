#include "coopmds/commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "coopmds/cluster.hpp"
#include "coopmds/codec.hpp"
#include "coopmds/error.hpp"
#include "coopmds/shard.hpp"

namespace fs = std::filesystem;

namespace coopmds {
namespace {

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorKind::invalid_argument, "malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "cannot read " + path.string());
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
}

// Reads the symbol at (stripe, row) of a shard payload.
FieldElement load_symbol(const std::vector<std::uint8_t>& payload, std::uint64_t index, std::size_t width) {
  const std::size_t at = static_cast<std::size_t>(index) * width;
  std::uint32_t v = payload[at];
  if (width == 2) v |= static_cast<std::uint32_t>(payload[at + 1]) << 8;
  return FieldElement(v);
}

void store_symbol(std::vector<std::uint8_t>& payload, FieldElement x, std::size_t width) {
  payload.push_back(static_cast<std::uint8_t>(x.value() & 0xFF));
  if (width == 2) payload.push_back(static_cast<std::uint8_t>(x.value() >> 8));
}

// Header fields every shard of one encoding shares, plus the decoded spec.
struct Layout {
  ShardHeader reference;
  CodeSpec spec;
  std::size_t width = 1;

  std::uint64_t payload_size() const { return reference.stripes * spec.rows() * width; }
  bool compatible(const ShardHeader& h) const {
    return h.field == reference.field && h.spec_bytes == reference.spec_bytes && h.stripes == reference.stripes &&
           h.length == reference.length;
  }
};

Layout layout_from(const ShardHeader& header, std::uint64_t cap) {
  std::size_t used = 0;
  CodeSpec spec;
  try {
    spec = deserialize(header.spec_bytes, &used, cap);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::inadmissible) throw;
    fail(ErrorKind::verification, std::string("corrupt code descriptor: ") + e.what());
  }
  if (used != header.spec_bytes.size() || spec.field_spec() != header.field) {
    fail(ErrorKind::verification, "code descriptor disagrees with the shard header");
  }
  return {header, spec, symbol_width(header.field)};
}

// Reads one shard and checks it against the layout (if known) and its checksum.
Shard load_checked(const fs::path& path, NodeId expected, const Layout* layout) {
  Shard shard = read_shard(path);
  if (shard.header.node != expected) {
    fail(ErrorKind::verification, path.string() + " claims node " + std::to_string(shard.header.node));
  }
  if (crc32_of(shard.payload) != shard.header.crc) fail(ErrorKind::verification, "checksum mismatch in " + path.string());
  if (layout != nullptr) {
    if (!layout->compatible(shard.header)) fail(ErrorKind::verification, path.string() + " belongs to another encoding");
    if (shard.payload.size() != layout->payload_size()) fail(ErrorKind::verification, path.string() + " has a truncated payload");
  }
  return shard;
}

Shard make_shard(const Layout& layout, NodeId node, std::vector<std::uint8_t> payload) {
  Shard shard;
  shard.header = layout.reference;
  shard.header.node = node;
  shard.header.crc = crc32_of(payload);
  shard.payload = std::move(payload);
  return shard;
}

CodeSpec build_spec(const std::string& family, int n, int k, int h, int d, const FieldSpec& field, std::uint64_t cap) {
  if (family == "universal") return make_universal(n, k, field, cap);
  return make_code(parse_family(family), n, k, h, d, field, cap);
}

}  // namespace

std::vector<NodeId> parse_node_list(const std::string& text) {
  std::vector<NodeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_int(item, "node id"));
  }
  return out;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int v = parse_int(text, "range");
    return {v, v};
  }
  const int lo = parse_int(std::string_view(text).substr(0, dots), "range");
  const int hi = parse_int(std::string_view(text).substr(dots + 2), "range");
  if (lo > hi) fail(ErrorKind::invalid_argument, "empty range '" + text + "'");
  return {lo, hi};
}

// --- encode -------------------------------------------------------------

nlohmann::json cmd_encode(const EncodeOptions& opt) {
  const FieldSpec field = FieldSpec::parse(opt.field);
  const CodeSpec spec = build_spec(opt.family, opt.n, opt.k, opt.h, opt.d, field, opt.cap);
  const std::size_t dw = data_width(field);
  const auto bytes = read_file(opt.input);
  if (bytes.empty()) fail(ErrorKind::invalid_argument, "refusing to encode an empty file");

  const std::uint64_t l = spec.rows();
  const auto k = static_cast<std::uint64_t>(spec.k());
  const std::uint64_t symbols = (bytes.size() + dw - 1) / dw;
  const std::uint64_t per_stripe = k * l;
  const std::uint64_t stripes = (symbols + per_stripe - 1) / per_stripe;

  Layout layout{{field, serialize(spec), 0, stripes, bytes.size(), 0}, spec, symbol_width(field)};
  std::vector<std::vector<std::uint8_t>> payloads(static_cast<std::size_t>(spec.n()));
  for (auto& p : payloads) p.reserve(static_cast<std::size_t>(layout.payload_size()));

  std::vector<FieldElement> data(static_cast<std::size_t>(per_stripe));
  for (std::uint64_t stripe = 0; stripe < stripes; ++stripe) {
    // Column-major fill: node 1 carries the first l symbols of the stripe.
    for (std::uint64_t q = 0; q < per_stripe; ++q) {
      const std::uint64_t first = (stripe * per_stripe + q) * dw;
      std::uint32_t v = 0;
      for (std::size_t b = 0; b < dw; ++b) {
        if (first + b < bytes.size()) v |= static_cast<std::uint32_t>(bytes[first + b]) << (8 * b);
      }
      data[(q % l) * k + q / l] = FieldElement(v);
    }
    const CodewordArray word = encode_systematic(spec, data);
    for (std::uint64_t row = 0; row < l; ++row) {
      const auto cells = word.row(row);
      for (std::size_t i = 0; i < cells.size(); ++i) store_symbol(payloads[i], cells[i], layout.width);
    }
  }

  std::error_code ec;
  fs::create_directories(opt.outdir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + opt.outdir + ": " + ec.message());
  nlohmann::json files = nlohmann::json::array();
  for (NodeId i = 1; i <= spec.n(); ++i) {
    const auto path = shard_path(opt.outdir, i);
    write_shard(path, make_shard(layout, i, std::move(payloads[static_cast<std::size_t>(i - 1)])));
    files.push_back(path.string());
  }
  return {{"code", spec_to_json(spec)},
          {"length", bytes.size()},
          {"stripes", stripes},
          {"shard_payload_bytes", layout.payload_size()},
          {"shards", files}};
}

// --- repair -------------------------------------------------------------

nlohmann::json cmd_repair(const RepairOptions& opt) {
  if (opt.helpers.empty()) fail(ErrorKind::invalid_argument, "no helpers given");
  std::map<NodeId, Shard> helpers;
  std::optional<Layout> layout;
  for (NodeId j : opt.helpers) {
    if (std::find(opt.failed.begin(), opt.failed.end(), j) != opt.failed.end()) {
      fail(ErrorKind::invalid_argument, "node " + std::to_string(j) + " is both failed and a helper");
    }
    Shard shard = load_checked(shard_path(opt.dir, j), j, layout ? &*layout : nullptr);
    if (!layout) {
      layout = layout_from(shard.header, opt.cap);
      if (shard.payload.size() != layout->payload_size()) fail(ErrorKind::verification, "shard " + std::to_string(j) + " has a truncated payload");
    }
    helpers.emplace(j, std::move(shard));
  }
  const CodeSpec& spec = layout->spec;
  const std::uint64_t l = spec.rows();
  RepairContext ctx{opt.failed, opt.helpers};

  nlohmann::json report;
  report["mode"] = to_string(opt.mode);
  report["code"] = spec_to_json(spec);
  report["stripes"] = layout->reference.stripes;
  if (opt.failed.empty()) {
    const RepairOutcome noop = run_repair(opt.mode, CodewordArray(spec), ctx);
    report["failed"] = nlohmann::json::array();
    report["helpers"] = noop.transcript.helpers;
    report["per_stripe"] = transcript_json(noop.transcript);
    report["per_stripe_symbols"] = 0;
    report["total_symbols"] = 0;
    report["optimal"] = true;
    report["restored"] = nlohmann::json::array();
    return report;
  }

  std::optional<RepairPlan> plan;
  if (opt.mode != RepairMode::naive) plan = plan_repair(spec, ctx);
  std::map<NodeId, std::vector<std::uint8_t>> rebuilt;
  for (NodeId i : opt.failed) {
    if (i < 1 || i > spec.n()) fail(ErrorKind::invalid_argument, "failed node " + std::to_string(i) + " out of range");
    rebuilt[i].reserve(static_cast<std::size_t>(layout->payload_size()));
  }

  std::optional<RepairTranscript> first;
  std::uint64_t total = 0;
  bool uniform_stripes = true;
  for (std::uint64_t stripe = 0; stripe < layout->reference.stripes; ++stripe) {
    CodewordArray damaged(spec);
    for (NodeId i = 1; i <= spec.n(); ++i) {
      if (!helpers.contains(i)) damaged.erase(i);
    }
    for (const auto& [j, shard] : helpers) {
      for (std::uint64_t row = 0; row < l; ++row) damaged.set(row, j, load_symbol(shard.payload, stripe * l + row, layout->width));
    }
    RepairOutcome out = [&] {
      switch (opt.mode) {
        case RepairMode::cooperative: return cooperative_repair(*plan, damaged);
        case RepairMode::centralized: return centralized_repair_from_round1(*plan, damaged);
        case RepairMode::naive: break;
      }
      return naive_repair(damaged, ctx);
    }();
    total += out.transcript.ledger.total();
    out.transcript.messages.clear();
    if (!first) {
      first = std::move(out.transcript);
    } else if (out.transcript.ledger.total() != first->ledger.total()) {
      uniform_stripes = false;
    }
    for (auto& [i, bytes] : rebuilt) {
      for (std::uint64_t row = 0; row < l; ++row) store_symbol(bytes, out.restored.at(row, i), layout->width);
    }
  }

  nlohmann::json files = nlohmann::json::array();
  for (auto& [i, bytes] : rebuilt) {
    const auto path = shard_path(opt.dir, i);
    write_shard(path, make_shard(*layout, i, std::move(bytes)));
    files.push_back(path.string());
  }
  report["failed"] = first->failed;
  report["helpers"] = first->helpers;
  report["per_stripe"] = transcript_json(*first);
  report["per_stripe_symbols"] = first->ledger.total();
  report["total_symbols"] = total;
  report["optimal"] = uniform_stripes && first->optimal();
  report["restored"] = files;
  return report;
}

// --- bound --------------------------------------------------------------

std::string cmd_bound(const BoundOptions& opt) {
  if (opt.n < 2 || opt.k < 1 || opt.k >= opt.n) fail(ErrorKind::inadmissible, "need 1 <= k < n");
  std::uint64_t l = opt.l;
  if (l == 0) l = code_params(Family::fixed_subset, opt.n, opt.k, opt.h, opt.d).l;
  const Rational coop = cutset_cooperative(opt.h, opt.d, opt.k, l, opt.n);
  const Rational central = cutset_centralized(opt.h, opt.d, opt.k, l, opt.n);
  const Rational quota(l, static_cast<std::uint64_t>(opt.h + opt.d - opt.k));
  std::ostringstream out;
  out << "n=" << opt.n << " k=" << opt.k << " h=" << opt.h << " d=" << opt.d << " l=" << l << "\n";
  out << "cooperative " << coop.to_string() << "\n";
  out << "centralized " << central.to_string() << "\n";
  out << "per-link    " << quota.to_string() << "\n";
  return out.str();
}

// --- verify -------------------------------------------------------------

nlohmann::json cmd_verify(const std::string& dir, std::uint64_t cap) {
  if (!fs::is_directory(dir)) fail(ErrorKind::io, dir + " is not a directory");
  std::map<NodeId, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("shard_", 0) != 0 || entry.path().extension() != ".cmds") continue;
    const std::string stem = entry.path().stem().string().substr(6);
    try {
      found[parse_int(stem, "shard name")] = entry.path();
    } catch (const Error&) {
      continue;
    }
  }
  nlohmann::json report;
  nlohmann::json shards = nlohmann::json::array();
  std::optional<Layout> layout;
  std::map<NodeId, Shard> good;
  bool ok = true;
  for (const auto& [node, path] : found) {
    nlohmann::json entry{{"node", node}, {"file", path.string()}};
    try {
      Shard shard = load_checked(path, node, layout ? &*layout : nullptr);
      if (!layout) {
        layout = layout_from(shard.header, cap);
        if (shard.payload.size() != layout->payload_size()) fail(ErrorKind::verification, "truncated payload");
      }
      if (node > layout->spec.n()) fail(ErrorKind::verification, "node index beyond n");
      good.emplace(node, std::move(shard));
      entry["ok"] = true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io) throw;
      entry["ok"] = false;
      entry["reason"] = e.what();
      ok = false;
    }
    shards.push_back(entry);
  }
  report["shards"] = shards;
  if (!layout) {
    report["ok"] = false;
    report["reason"] = "no readable shards";
    return report;
  }
  const CodeSpec& spec = layout->spec;
  nlohmann::json missing = nlohmann::json::array();
  for (NodeId i = 1; i <= spec.n(); ++i) {
    if (!found.contains(i)) missing.push_back(i);
  }
  report["missing"] = missing;
  if (!missing.empty()) ok = false;

  nlohmann::json parity = nullptr;
  if (static_cast<int>(good.size()) == spec.n()) {
    parity = true;
    const std::uint64_t l = spec.rows();
    for (std::uint64_t stripe = 0; stripe < layout->reference.stripes; ++stripe) {
      CodewordArray word(spec);
      for (const auto& [i, shard] : good) {
        for (std::uint64_t row = 0; row < l; ++row) word.set(row, i, load_symbol(shard.payload, stripe * l + row, layout->width));
      }
      const ParityVerdict v = verify_parity(word);
      if (!v.ok) {
        parity = false;
        report["parity_failure"] = {{"stripe", stripe}, {"row", v.row}, {"t", v.t}};
        ok = false;
        break;
      }
    }
  }
  report["parity_ok"] = parity;
  report["ok"] = ok;
  return report;
}

// --- bench --------------------------------------------------------------

std::string cmd_bench(const BenchOptions& opt) {
  const Family family = parse_family(opt.family);
  if (family == Family::concatenated) fail(ErrorKind::invalid_argument, "bench sweeps the fixed or any family");
  std::ostringstream out;
  out << "n,k,h,d,l,coop_measured,coop_bound,central_measured,central_bound,optimal\n";
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (int k = 1; k < n; ++k) {
      if (opt.k != 0 && k != opt.k) continue;
      for (int d = k + 1; d < n; ++d) {
        if (opt.d != 0 && d != opt.d) continue;
        for (int h = 1; h <= n - d; ++h) {
          if (opt.h != 0 && h != opt.h) continue;
          const FieldSpec field = opt.field.empty() ? minimal_field(required_field_order(family, n, k, h, d))
                                                    : FieldSpec::parse(opt.field);
          const CodeSpec spec = make_code(family, n, k, h, d, field, opt.cap);
          const auto rows = inject_and_sweep(spec, {RepairMode::cooperative, RepairMode::centralized}, opt.seed);
          std::uint64_t coop = 0;
          std::uint64_t central = 0;
          bool optimal = !rows.empty();
          for (const auto& row : rows) {
            coop = std::max(coop, row.coop_measured);
            central = std::max(central, row.central_measured);
            optimal = optimal && row.optimal();
          }
          out << n << ',' << k << ',' << h << ',' << d << ',' << spec.rows() << ',' << coop << ','
              << rows.front().coop_bound.to_string() << ',' << central << ',' << rows.front().central_bound.to_string()
              << ',' << (optimal ? "true" : "false") << "\n";
        }
      }
    }
  }
  return out.str();
}

// --- simulate and decode ------------------------------------------------

nlohmann::json cmd_simulate(const std::string& scenario_path, unsigned threads, std::uint64_t cap) {
  const auto bytes = read_file(scenario_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("malformed scenario file: ") + e.what());
  }
  return run_scenario(parse_scenario(j, cap), threads);
}

nlohmann::json cmd_decode(const std::string& dir, const std::string& output, std::uint64_t cap) {
  std::optional<Layout> layout;
  std::map<NodeId, Shard> good;
  nlohmann::json skipped = nlohmann::json::array();
  for (NodeId i = 1; i <= (layout ? layout->spec.n() : 0xFFFF); ++i) {
    const auto path = shard_path(dir, i);
    if (!fs::exists(path)) continue;
    try {
      Shard shard = load_checked(path, i, layout ? &*layout : nullptr);
      if (!layout) layout = layout_from(shard.header, cap);
      if (shard.payload.size() != layout->payload_size()) fail(ErrorKind::verification, "truncated payload");
      good.emplace(i, std::move(shard));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io || e.kind() == ErrorKind::inadmissible) throw;
      skipped.push_back(i);
    }
    if (layout && static_cast<int>(good.size()) == layout->spec.k()) break;
  }
  if (!layout || static_cast<int>(good.size()) < layout->spec.k()) {
    fail(ErrorKind::verification, "fewer than k intact shards in " + dir);
  }
  const CodeSpec& spec = layout->spec;
  const std::uint64_t l = spec.rows();
  const auto k = static_cast<std::uint64_t>(spec.k());
  const std::size_t dw = data_width(layout->reference.field);
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(layout->reference.stripes * k * l * dw));
  for (std::uint64_t stripe = 0; stripe < layout->reference.stripes; ++stripe) {
    std::map<NodeId, std::vector<FieldElement>> columns;
    for (const auto& [i, shard] : good) {
      auto& col = columns[i];
      for (std::uint64_t row = 0; row < l; ++row) col.push_back(load_symbol(shard.payload, stripe * l + row, layout->width));
    }
    const CodewordArray word = decode_from_columns(spec, columns);
    for (NodeId i = 1; i <= spec.k(); ++i) {
      for (std::uint64_t row = 0; row < l; ++row) {
        const auto v = word.at(row, i).value();
        for (std::size_t b = 0; b < dw; ++b) bytes.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xFF));
      }
    }
  }
  bytes.resize(static_cast<std::size_t>(layout->reference.length));
  write_file(output, bytes);
  nlohmann::json used = nlohmann::json::array();
  for (const auto& [i, shard] : good) used.push_back(i);
  return {{"output", output}, {"length", bytes.size()}, {"shards_used", used}, {"skipped", skipped}};
}

}  // namespace coopmds
