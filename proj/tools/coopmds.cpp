// Command-line front end: encode, repair, bound, verify, bench, simulate, decode.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "coopmds/commands.hpp"
#include "coopmds/error.hpp"

namespace {

constexpr int kExitInadmissible = 2;
constexpr int kExitVerification = 3;
constexpr int kExitIo = 4;

int exit_code(coopmds::ErrorKind kind) {
  switch (kind) {
    case coopmds::ErrorKind::verification: return kExitVerification;
    case coopmds::ErrorKind::io: return kExitIo;
    case coopmds::ErrorKind::invalid_argument:
    case coopmds::ErrorKind::inadmissible: break;
  }
  return kExitInadmissible;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out || !(out << text)) coopmds::fail(coopmds::ErrorKind::io, "cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative-repair MDS array codes: file sharding, repair and bandwidth accounting"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  std::uint64_t cap = coopmds::kDefaultSubpacketizationCap;
  app.add_option("--cap", cap, "Largest sub-packetization l to accept")->capture_default_str();

  coopmds::EncodeOptions enc;
  auto* encode = app.add_subcommand("encode", "Split a file into n shards");
  encode->add_option("input", enc.input, "File to encode")->required();
  encode->add_option("outdir", enc.outdir, "Directory for the shard files")->required();
  encode->add_option("--family", enc.family, "fixed, any or universal")->capture_default_str();
  encode->add_option("--n", enc.n, "Number of nodes")->required();
  encode->add_option("--k", enc.k, "Number of data nodes")->required();
  encode->add_option("--h", enc.h, "Failed-set size the code is built for");
  encode->add_option("--d", enc.d, "Helper count the code is built for");
  encode->add_option("--field", enc.field, "gf256, gf2^16, p257, ...")->capture_default_str();

  coopmds::RepairOptions rep;
  std::string fail_list;
  std::string helper_list;
  std::string mode = "coop";
  std::string report_path;
  auto* repair = app.add_subcommand("repair", "Regenerate failed shards from helper shards");
  repair->add_option("dir", rep.dir, "Shard directory")->required();
  repair->add_option("--fail", fail_list, "Comma-separated failed node ids");
  repair->add_option("--helpers", helper_list, "Comma-separated helper node ids")->required();
  repair->add_option("--mode", mode, "coop, central or naive")->capture_default_str();
  repair->add_option("--report", report_path, "Write the JSON report here instead of stdout");

  coopmds::BoundOptions bnd;
  auto* bound = app.add_subcommand("bound", "Print cut-set bounds");
  bound->add_option("--n", bnd.n)->required();
  bound->add_option("--k", bnd.k)->required();
  bound->add_option("--h", bnd.h)->required();
  bound->add_option("--d", bnd.d)->required();
  bound->add_option("--l", bnd.l, "Sub-packetization (default: the fixed-subset code's)");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Check shard checksums and parity");
  verify->add_option("dir", verify_dir, "Shard directory")->required();

  coopmds::BenchOptions bench_opt;
  std::string n_range = "4..6";
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "Sweep (F, R) pairs and compare measured bandwidth with the bounds");
  bench->add_option("--family", bench_opt.family, "fixed or any")->capture_default_str();
  bench->add_option("--n", n_range, "n or a range lo..hi")->capture_default_str();
  bench->add_option("--k", bench_opt.k, "Restrict to one k");
  bench->add_option("--h", bench_opt.h, "Restrict to one h");
  bench->add_option("--d", bench_opt.d, "Restrict to one d");
  bench->add_option("--field", bench_opt.field, "Field (default: smallest admissible)");
  bench->add_option("--seed", bench_opt.seed)->capture_default_str();
  bench->add_option("--out", csv_path, "Write CSV here instead of stdout");

  std::string scenario;
  unsigned threads = 1;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run a cluster scenario file");
  simulate->add_option("scenario", scenario, "Scenario JSON")->required();
  simulate->add_option("--threads", threads)->capture_default_str();
  simulate->add_option("--out", sim_out, "Write the report here instead of stdout");

  std::string decode_dir;
  std::string decode_out;
  auto* decode = app.add_subcommand("decode", "Rebuild the original file from any k shards");
  decode->add_option("dir", decode_dir, "Shard directory")->required();
  decode->add_option("output", decode_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInadmissible;
  }

  try {
    if (*encode) {
      enc.cap = cap;
      std::cout << coopmds::cmd_encode(enc).dump(2) << "\n";
    } else if (*repair) {
      rep.failed = coopmds::parse_node_list(fail_list);
      rep.helpers = coopmds::parse_node_list(helper_list);
      rep.mode = coopmds::parse_repair_mode(mode);
      rep.cap = cap;
      emit(coopmds::cmd_repair(rep).dump(2) + "\n", report_path);
    } else if (*bound) {
      std::cout << coopmds::cmd_bound(bnd);
    } else if (*verify) {
      const auto report = coopmds::cmd_verify(verify_dir, cap);
      std::cout << report.dump(2) << "\n";
      if (!report.at("ok").get<bool>()) return kExitVerification;
    } else if (*bench) {
      std::tie(bench_opt.n_min, bench_opt.n_max) = coopmds::parse_range(n_range);
      bench_opt.cap = cap;
      emit(coopmds::cmd_bench(bench_opt), csv_path);
    } else if (*simulate) {
      emit(coopmds::cmd_simulate(scenario, threads, cap).dump(2) + "\n", sim_out);
    } else if (*decode) {
      std::cout << coopmds::cmd_decode(decode_dir, decode_out, cap).dump(2) << "\n";
    }
  } catch (const coopmds::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
