#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "ghzw/cli.hpp"
#include "ghzw/lp.hpp"
#include "ghzw/qsim.hpp"
#include "ghzw/witness.hpp"
#include "ghzw/witness_json.hpp"

using namespace ghzw;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("ghzw_test_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kData = std::string(GHZW_DATA_DIR) + "/table1_counts.csv";

}  // namespace

TEST_CASE("simulate") {
  const Run r = run({"simulate", "--witness", "W3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["total"].get<double>() == doctest::Approx(4 + 4 * std::numbers::sqrt2).epsilon(1e-12));
  CHECK(j["violated"].get<bool>());
  CHECK(j["terms"].size() == 7);
  CHECK(j["config"]["witness"] == "W3");
  CHECK(j["versions"].contains("ghzw"));

  const Run low = run({"simulate", "--witness", "W4", "--p", "0.5", "--csv"});
  CHECK(low.code == 2);
  CHECK(low.out.rfind("term,coeff,value\n", 0) == 0);
  CHECK(low.out.find("total,,") != std::string::npos);

  const Run np = run({"simulate", "--witness", "NParty", "--n", "5"});
  CHECK(np.code == 0);
}

TEST_CASE("reports are reproducible and hashed") {
  const Run a = run({"simulate", "--witness", "W4", "--p", "0.9"});
  const Run b = run({"simulate", "--witness", "W4", "--p", "0.9"});
  const Run c = run({"simulate", "--witness", "W4", "--p", "0.91"});
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["config_hash"] != json::parse(c.out)["config_hash"]);
  CHECK(config_hash("x") == config_hash("x"));
  CHECK(config_hash("x").size() == 16);
}

TEST_CASE("sweep") {
  const Run r = run({"sweep", "--witness", "W3", "--p-range", "0.7:0.9:5", "--k", "0,0.5", "--csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,k,p,value,violated,p_star,f_star");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
  CHECK(r.out.find("0.78361") != std::string::npos);

  const Run j = run({"sweep", "--witness", "W4", "--p-range", "0:1:11", "--k", "0.5"});
  REQUIRE(j.code == 0);
  const json d = json::parse(j.out);
  REQUIRE(d["thresholds"].size() == 1);
  CHECK(d["thresholds"][0]["p_star"].get<double>() == doctest::Approx(2 * (std::numbers::sqrt2 - 1)).epsilon(1e-9));
  CHECK(d["thresholds"][0]["fidelity_star"].get<double>() == doctest::Approx(0.8343).epsilon(1e-3));
  CHECK(run({"sweep", "--p-range", "0:1"}).code == 1);
}

TEST_CASE("certify") {
  const fs::path cert = temp_path("cert.json"), lp = temp_path("vis.lp");
  const Run pr = run({"certify", "--n", "2", "--behavior", "pr", "--cert-out", cert.string(), "--lp-out", lp.string()});
  REQUIRE(pr.code == 0);
  const json j = json::parse(pr.out);
  CHECK(j["tau"].get<double>() == doctest::Approx(4.0 / 3).epsilon(1e-7));
  CHECK(j["certificate"]["verified"].get<bool>());
  CHECK_FALSE(j["feasible"].get<bool>());

  const ProbabilityFormWitness w = probability_form_from_json(slurp(cert));
  CHECK(w.n_parties() == 2);
  std::ifstream lin(lp);
  const LPSolution sol = solve_lp(read_lp(lin));
  REQUIRE(sol.status == LPStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(4.0 / 3).epsilon(1e-7));
  fs::remove(cert);
  fs::remove(lp);

  CHECK(run({"certify", "--n", "2", "--behavior", "white"}).code == 2);
  CHECK(run({"certify", "--n", "3", "--behavior", "pr"}).code == 1);
  const Run big = run({"certify", "--n", "4"});
  CHECK(big.code == 1);
  CHECK(big.err.find("nonzeros") != std::string::npos);
}

TEST_CASE("analyze") {
  const Run r = run({"analyze", "--dataset", kData, "--resamples", "1000", "--seed", "3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["W4"]["value"].get<double>() == doctest::Approx(6.71429).epsilon(1e-5));
  CHECK(j["W3"]["value"].get<double>() == doctest::Approx(9.50801).epsilon(1e-5));
  CHECK(j["W4"]["sigmas_above_bound"].get<double>() > 20);
  CHECK(run({"analyze", "--dataset", kData, "--resamples", "1000", "--seed", "3"}).out == r.out);
  CHECK(run({"analyze", "--resamples", "10"}).code == 1);
  const Run missing = run({"analyze", "--dataset", "/nonexistent.csv"});
  CHECK(missing.code == 1);
  CHECK_FALSE(missing.err.empty());
}

TEST_CASE("vertices") {
  const Run r = run({"vertices", "--witness", "W3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["classical_max"].get<double>() == doctest::Approx(8.0));
  CHECK(j["nonsignalling_min"].get<double>() == doctest::Approx(-8.0).epsilon(1e-9));
  CHECK(j["worst_case_visibility"].get<double>() == doctest::Approx(0.906).epsilon(1e-3));
  CHECK(j["vertices"].get<int>() == 64);
}

TEST_CASE("witness from a JSON file") {
  const fs::path p = temp_path("w.json");
  {
    std::ofstream out(p);
    out << witness_to_json(build_w3());
  }
  const Run r = run({"simulate", "--witness", p.string()});
  CHECK((r.code == 0 || r.code == 2));
  const MeasurementStrategy zx(3, {{0.0}, {std::numbers::pi / 2}});
  const double expect = evaluate(build_w3(), behavior_from_state(ghz_state(3), zx));
  CHECK(json::parse(r.out)["total"].get<double>() == doctest::Approx(expect).epsilon(1e-12));
  fs::remove(p);
}

TEST_CASE("output file and errors") {
  const fs::path p = temp_path("out.json");
  const Run r = run({"simulate", "--out", p.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(p))["command"] == "simulate");
  fs::remove(p);

  CHECK(run({"simulate", "--witness", "W7"}).code == 1);
  CHECK(run({"simulate", "--p", "1.5"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
}
