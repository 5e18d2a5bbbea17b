#include <doctest.h>

#include <cmath>

#include "hpcalc/cli.hpp"

using namespace hpcalc;
using namespace hpcalc::cli;
using doctest::Approx;

namespace {

std::string parse_error(const json& j) {
  try {
    parse_job(j);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

json strip_timings(json r) {
  r.erase("timings");
  if (r.contains("rows"))
    for (json& row : r["rows"]) row.erase("time_s");
  return r;
}

}  // namespace

TEST_CASE("job parsing reports the offending field") {
  const json base = json::parse(R"({"matrix": [[-1]], "function": {"kind": "reciprocal"}, "vector": [1]})");
  CHECK(parse_error(base).empty());

  json j = base;
  j["function"] = {{"kind", "neg_frac_power"}, {"alpha", "x"}};
  CHECK(parse_error(j).find("function.alpha") != std::string::npos);

  j = base;
  j["matrix"] = json::parse("[[1, 2], [3]]");
  CHECK(parse_error(j).find("matrix[1]") != std::string::npos);

  j = base;
  j["vector"] = json::parse("[1, 2]");
  CHECK(parse_error(j).find("does not match") != std::string::npos);

  j = base;
  j["function"] = {{"measure", {{"density", {{"kind", "power_exp"}, {"power", -2.0}}}}}};
  CHECK(parse_error(j).find("function.measure.density") != std::string::npos);

  j = base;
  j["identities"] = {"theorem"};
  CHECK(parse_error(j).find("identities[0]") != std::string::npos);

  j = base;
  j["identities"] = {"representation"};
  CHECK(parse_error(j).find("Bernstein") != std::string::npos);

  j = base;
  j["function"]["measure"] = "neg_lebesgue";
  CHECK(parse_error(j).find("exactly one") != std::string::npos);
}

TEST_CASE("matrix text files") {
  const Mat A = parse_matrix_text("# comment\n-1 0.5,1\n\n0 -2\n", "m.txt");
  CHECK(A.rows() == 2);
  CHECK(A(0, 1) == cplx(0.5, 1.0));
  try {
    parse_matrix_text("-1 0\n0 x\n", "m.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("m.txt:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_matrix_text("-1 0\n0\n", "m.txt"), ParseError);
}

TEST_CASE("compute") {
  auto job = parse_job(json::parse(R"({"matrix": [[-1]], "function": {"kind": "neg_frac_power", "alpha": 0.5}, "vector": [1]})"));
  auto out = cmd_compute(job, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["results"][0]["converged"] == true);
  CHECK(out.report["results"][0]["value"][0][0].get<double>() == Approx(1.0).epsilon(1e-9));

  job = parse_job(json::parse(R"({"matrix": [[-1, 0], [0, 0]], "function": {"measure": "neg_lebesgue"}, "vector": [0, 1]})"));
  out = cmd_compute(job, {});
  CHECK(out.exit_code == 2);
  CHECK(out.report["results"][0]["diagnosis"] == "DivergentTail");
  CHECK(out.report["results"][0]["value"].is_null());

  job = parse_job(json::parse(R"({"matrix": [[-1, 0], [0, -4]], "function": {"kind": "log_inverse"}, "vector": [1, 1]})"));
  out = cmd_compute(job, {});
  CHECK(out.exit_code == 0);
  const json& v = out.report["results"][0]["value"];
  CHECK(v[0][0].get<double>() == Approx(1.0 / std::log(2.0)).epsilon(1e-7));
  CHECK(v[1][0].get<double>() == Approx(1.0 / std::log(5.0)).epsilon(1e-7));
  CHECK(out.report["results"][0]["oracle_gap"].get<double>() <= 1e-6);
}

TEST_CASE("compute on an unbounded semigroup is a validation failure") {
  const auto job = parse_job(json::parse(R"({"matrix": [[0.5]], "function": {"kind": "reciprocal"}, "vector": [1]})"));
  CHECK(cmd_compute(job, {}).exit_code == 3);
}

TEST_CASE("verify") {
  auto job = parse_job(json::parse(R"({"matrix": [[-1, 1], [0, -2]], "function": {"measure": "neg_lebesgue"},
                                       "vector": [0.3, -1.1], "identities": ["commutation"]})"));
  auto out = cmd_verify(job, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["identities"][0]["residual"].get<double>() <= 1e-7);

  job = parse_job(json::parse(R"({"matrix": [[-1, 0.5], [0, -3]], "function": {"measure": {"atoms": [[0.5, 1]]}},
                                  "vector": [1, 1],
                                  "identities": [{"name": "product", "bernstein": {"kind": "atom", "u0": 1}}]})"));
  out = cmd_verify(job, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["identities"][0]["r1"].get<double>() <= 1e-9);
  CHECK(out.report["identities"][0]["r2"].get<double>() <= 1e-9);
  CHECK(out.report["identities"][0]["lmt"] == true);

  job = parse_job(json::parse(R"({"matrix": [[-1.718281828459045]], "function": {"kind": "log_shift"},
                                  "vector": [1], "identities": ["reciprocal"]})"));
  out = cmd_verify(job, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["identities"][0]["residual"].get<double>() <= 1e-5);
}

TEST_CASE("verify fails with exit 3 when an identity cannot hold") {
  // 1/(e^{s} - 1) is not a Laplace transform of the default reciprocal measure
  const auto job = parse_job(json::parse(R"({"matrix": [[-1]], "function": {"bernstein": {"kind": "atom", "u0": 1}},
                                             "vector": [1], "identities": ["reciprocal"]})"));
  const auto out = cmd_verify(job, {});
  CHECK(out.exit_code == 3);
  CHECK(out.report["identities"][0]["pass"] == false);
  CHECK(out.report["identities"][0]["residual"].is_null());
  CHECK(out.report["identities"][0].contains("diagnosis"));
}

TEST_CASE("sweep") {
  auto job = parse_job(json::parse(R"({"matrix": [[-1, 0], [0, -4]], "function": {"kind": "neg_frac_power", "alpha": 0.5},
                                       "vector": [1, 1], "sweep": {"param": "alpha", "values": [0.25, 0.5, 0.75]}})"));
  RunOptions csv;
  csv.format = "csv";
  auto out = cmd_sweep(job, csv);
  CHECK(out.exit_code == 0);
  REQUIRE(out.report["rows"].size() == 3);
  for (const json& row : out.report["rows"]) CHECK(row["oracle_gap"].get<double>() <= 1e-6);
  CHECK(std::count(out.csv.begin(), out.csv.end(), '\n') == 4);

  job.sweep->values.clear();
  out = cmd_sweep(job, csv);
  CHECK(out.exit_code == 0);
  CHECK(out.csv == "param,value,value_norm,oracle_gap,residual,time_s,diagnosis\n");

  job = parse_job(json::parse(R"({"matrix": [[-1, 0], [0, 0]], "function": {"kind": "reciprocal"}, "vector": [1, 1],
                                  "sweep": {"param": "omega0", "values": [0, 0, 0]}})"));
  out = cmd_sweep(job, csv);
  CHECK(out.exit_code == 2);
  for (const json& row : out.report["rows"]) CHECK(row["diagnosis"] == "DivergentTail");
}

TEST_CASE("sweep over omega0 shifts the spectrum") {
  const auto job = parse_job(json::parse(R"({"matrix": [[-1, 0], [0, -3]], "function": {"kind": "reciprocal"}, "vector": [1, 0],
                                             "sweep": {"param": "omega0", "values": [-2, -0.5]}})"));
  const auto out = cmd_sweep(job, {});
  CHECK(out.report["rows"][0]["value_norm"].get<double>() == Approx(0.5).epsilon(1e-7));
  CHECK(out.report["rows"][1]["value_norm"].get<double>() == Approx(2.0).epsilon(1e-7));
}

TEST_CASE("reports are deterministic for a fixed seed") {
  const auto job = parse_job(json::parse(R"({"matrix": [[-1, 1], [0, -2]], "function": {"measure": "neg_lebesgue"},
                                             "vector": [1, 1], "identities": ["norm_bound"], "seed": 4})"));
  const json a = strip_timings(cmd_verify(job, {}).report);
  const json b = strip_timings(cmd_verify(job, {}).report);
  CHECK(a.dump() == b.dump());
  RunOptions other;
  other.seed = 5;
  CHECK(strip_timings(cmd_verify(job, other).report)["config"]["seed"] == 5);
}

TEST_CASE("non-finite numbers become null") {
  // truncation point of a compactly supported measure is finite; condition of a
  // defective matrix is not
  const auto job = parse_job(json::parse(R"({"matrix": [[-1, 1], [0, -1]], "function": {"measure": "neg_lebesgue"}, "vector": [1, 1]})"));
  const auto out = cmd_compute(job, {});
  CHECK(out.report["config"]["matrix"]["condition"].is_null());
  CHECK(out.report["results"][0]["oracle"].is_null());
  CHECK(out.report["results"][0].contains("oracle_diagnosis"));
}
