#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coopmds/cluster.hpp"
#include "coopmds/error.hpp"
#include "oracles.hpp"

using namespace coopmds;
using nlohmann::json;

namespace {

json two_failure_scenario(const std::string& mode = "cooperative") {
  return json::parse(R"({"code": {"family": "fixed", "n": 5, "k": 2, "h": 2, "d": 3, "field": "gf7"},
                         "seed": 42,
                         "events": [{"type": "fail", "nodes": [1, 2]},
                                    {"type": "repair", "helpers": [3, 4, 5], "mode": ")" + mode + R"("},
                                    {"type": "verify"}]})");
}

}  // namespace

TEST_CASE("two failures, three helpers: meter equals ledger and bound") {
  const auto report = run_scenario(parse_scenario(two_failure_scenario()));
  const auto& events = report.at("events");
  REQUIRE(events.size() == 3);
  const auto& rep = events[1];
  CHECK(rep.at("meter").at("total") == 8);
  CHECK(rep.at("ledger").at("total") == 8);
  CHECK(rep.at("meter_matches_ledger") == true);
  CHECK(rep.at("optimal") == true);
  CHECK(rep.at("restored") == true);
  CHECK(events[2].at("ok") == true);
  CHECK(events[2].at("parity_ok") == true);
  CHECK(report.at("meter").at("total") == 8);
  const auto [num, den] = oracle::coop_bound(2, 3, 2, 3);
  CHECK(rep.at("meter").at("total").get<std::uint64_t>() * den == num);
  // every link carries l / (h + d - k) = 1 symbol
  for (const auto& link : rep.at("meter").at("links")) CHECK(link.at("symbols") == 1);
}

TEST_CASE("centralized scenario totals hdl/(h+d-k)") {
  const auto report = run_scenario(parse_scenario(two_failure_scenario("centralized")));
  const auto& rep = report.at("events")[1];
  CHECK(rep.at("meter").at("total") == 6);
  CHECK(rep.at("meter_matches_ledger") == true);
  CHECK(report.at("events")[2].at("ok") == true);
}

TEST_CASE("verify before repair reports down nodes") {
  auto s = two_failure_scenario();
  s["events"] = json::parse(R"([{"type": "fail", "nodes": [4]}, {"type": "verify"}])");
  const auto report = run_scenario(parse_scenario(s));
  const auto& v = report.at("events")[1];
  CHECK(v.at("ok") == false);
  CHECK(v.at("down") == json::array({4}));
}

TEST_CASE("empty scenario") {
  auto s = two_failure_scenario();
  s["events"] = json::array();
  const auto report = run_scenario(parse_scenario(s));
  CHECK(report.at("events").empty());
  CHECK(report.at("meter").at("total") == 0);
  CHECK(report.at("meter").at("links").empty());
}

TEST_CASE("scenario errors") {
  auto s = two_failure_scenario();
  s["events"] = json::parse(R"([{"type": "fail", "nodes": [1, 2, 3, 4]}, {"type": "repair", "helpers": [5]}])");
  const auto cfg = parse_scenario(s);
  try {
    run_scenario(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::inadmissible);
  }
  s["events"] = json::parse(R"([{"type": "explode"}])");
  CHECK_THROWS_AS(parse_scenario(s), Error);
  s["events"] = json::parse(R"([{"type": "fail", "nodes": [9]}])");
  CHECK_THROWS_AS(run_scenario(parse_scenario(s)), Error);
  CHECK_THROWS_AS(parse_scenario(json::parse(R"({"seed": 1})")), Error);
}

TEST_CASE("reports are identical across runs and thread counts") {
  auto s = json::parse(R"({"code": {"family": "any", "n": 5, "k": 2, "h": 2, "d": 3, "field": "gf2^8"},
                           "seed": 7,
                           "events": [{"type": "fail", "nodes": [2, 4]},
                                      {"type": "repair", "helpers": [1, 3, 5]},
                                      {"type": "verify"},
                                      {"type": "fail", "nodes": [1, 5]},
                                      {"type": "repair", "helpers": [2, 3, 4], "mode": "centralized"},
                                      {"type": "verify"}]})");
  const auto cfg = parse_scenario(s);
  const std::string base = run_scenario(cfg, 1).dump();
  CHECK(run_scenario(cfg, 1).dump() == base);
  for (unsigned t : {2u, 3u, 8u}) CHECK(run_scenario(cfg, t).dump() == base);
  const auto report = json::parse(base);
  CHECK(report.at("events")[2].at("ok") == true);
  CHECK(report.at("events")[5].at("ok") == true);
}

TEST_CASE("spec descriptors round-trip") {
  for (const char* text : {R"({"family": "fixed", "n": 5, "k": 2, "h": 2, "d": 3, "field": "gf7"})",
                           R"({"family": "any", "n": 4, "k": 1, "h": 2, "d": 2})",
                           R"({"family": "concatenated", "n": 4, "k": 1, "field": "gf2^5",
                               "components": [{"family": "any", "h": 1, "d": 2}, {"family": "any", "h": 1, "d": 3}]})"}) {
    const auto spec = spec_from_json(json::parse(text));
    const auto again = spec_from_json(spec_to_json(spec));
    CHECK(spec_to_json(again) == spec_to_json(spec));
    CHECK(again.rows() == spec.rows());
  }
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"family": "fixed", "n": 5, "k": 2, "h": 3, "d": 3})")), Error);
  const auto inferred = spec_from_json(json::parse(
      R"({"family": "concatenated", "n": 4, "k": 1,
          "components": [{"family": "any", "h": 1, "d": 2}, {"family": "any", "h": 1, "d": 3}]})"));
  CHECK(inferred.field().order() >= 24);
}

TEST_CASE("sweep: fixed-subset n=5") {
  const auto spec = make_code(Family::fixed_subset, 5, 2, 2, 3, FieldSpec::prime(7));
  const auto rows = inject_and_sweep(spec, {RepairMode::cooperative, RepairMode::centralized});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].coop_measured == 8);
  CHECK(rows[0].central_measured == 6);
  CHECK(rows[0].optimal());
}

TEST_CASE("sweep: single failures give equal cooperative and centralized traffic") {
  const auto spec = make_code(Family::any_subset, 5, 2, 1, 3, FieldSpec::prime(11));
  const auto rows = inject_and_sweep(spec, {RepairMode::cooperative, RepairMode::centralized}, 3);
  CHECK(rows.size() == 5 * 4);  // every F = {i}, every 3-subset of the other four
  for (const auto& row : rows) {
    CHECK(row.optimal());
    CHECK(row.coop_measured == row.central_measured);
  }
}

TEST_CASE("sweep: any-subset covers every failure pattern") {
  const auto spec = make_code(Family::any_subset, 4, 1, 2, 2, FieldSpec::binary(3));
  const auto rows = inject_and_sweep(spec, {RepairMode::cooperative});
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.optimal());
    CHECK(row.coop_measured == 1458);
    CHECK_FALSE(row.has_central);
  }
}
