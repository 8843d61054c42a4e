#include "ghzw/cli.hpp"

#include <Eigen/Core>
#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"
#include "ghzw/inflation.hpp"
#include "ghzw/inflation_json.hpp"
#include "ghzw/polytope.hpp"
#include "ghzw/qsim.hpp"
#include "ghzw/witness.hpp"
#include "ghzw/witness_json.hpp"

namespace ghzw {

using nlohmann::json;

namespace {

struct Config {
  std::string command;
  std::string witness = "W3";
  int n = 0;
  double p = 1.0;
  double k = 0.0;
  std::string p_range = "0:1:101";
  std::string k_list = "0,0.5,1";
  std::string dataset;
  std::string inflation = "ring";
  int order = 2;
  std::string behavior = "ghz";
  int resamples = 10000;
  std::uint64_t seed = 1;
  std::string out;
  std::string cert_out;
  std::string lp_out;
  bool csv = false;
  bool main_text_b1 = false;
  double tol_feas = 1e-7;
  double tol_gap = 1e-7;

  json to_json() const {
    return {{"command", command}, {"witness", witness},   {"n", n},
            {"p", p},             {"k", k},               {"p_range", p_range},
            {"k_list", k_list},   {"dataset", dataset},   {"inflation", inflation},
            {"order", order},     {"behavior", behavior}, {"resamples", resamples},
            {"seed", seed},       {"csv", csv},           {"main_text_b1", main_text_b1},
            {"tol_feas", tol_feas}, {"tol_gap", tol_gap}};
  }
};

struct Outcome {
  std::string text;
  int code = 0;
};

json report_header(const Config& c) {
  const json cfg = c.to_json();
  return {{"command", c.command},
          {"config", cfg},
          {"config_hash", config_hash(cfg.dump())},
          {"versions",
           {{"ghzw", GHZW_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)}}}};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string term_label(const CorrelatorTerm& t) {
  std::string s;
  for (const Factor& f : t.factors) {
    s += static_cast<char>('A' + f.party);
    s += std::to_string(f.setting);
    if (f.flip) s += '~';
  }
  if (t.condition)
    s += "|" + std::string(1, static_cast<char>('A' + t.condition->party)) + std::to_string(t.condition->setting) +
         (t.condition->outcome > 0 ? "=+" : "=-");
  return s;
}

struct WitnessSetup {
  Witness w;
  MeasurementStrategy s;
  int n = 0;
  bool builtin = true;
};

// Angles 0, pi/(2(m-1)), ..., pi/2 for a party with m inputs.
MeasurementStrategy generic_strategy(const std::vector<int>& inputs) {
  MeasurementStrategy s;
  for (int m : inputs) {
    std::vector<DichotomicObservable> obs;
    for (int i = 0; i < m; ++i) obs.push_back({m == 1 ? 0.0 : i * std::numbers::pi / (2.0 * (m - 1))});
    s.push_back(obs);
  }
  return s;
}

WitnessSetup resolve_witness(const Config& c) {
  if (c.witness == "W3") return {build_w3(), w3_strategy(), 3};
  if (c.witness == "W4") return {build_w4(), w4_strategy(), 4};
  if (c.witness == "NParty" || c.witness == "N") {
    const int n = c.n > 0 ? c.n : 5;
    return {build_n_party(n), n_party_strategy(n, c.main_text_b1), n};
  }
  if (!std::filesystem::exists(c.witness))
    throw DomainError("unknown witness '" + c.witness + "' (W3, W4, NParty or a JSON file)");
  Witness w = read_witness_file(c.witness);
  const int n = w.n_parties();
  return {w, generic_strategy(w.inputs_per_party), n, false};
}

void check_unit(double v, const char* name) {
  if (!(v >= 0 && v <= 1)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

std::vector<double> parse_p_range(const std::string& spec) {
  double a = 0, b = 0;
  int steps = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &a, &b, &steps, &tail) != 3)
    throw DomainError("--p-range expects a:b:steps, got '" + spec + "'");
  check_unit(a, "p");
  check_unit(b, "p");
  if (steps < 2) throw DomainError("--p-range needs at least 2 steps");
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) out.push_back(a + (b - a) * i / (steps - 1));
  return out;
}

std::vector<double> parse_k_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) throw DomainError("--k expects a comma-separated list, got '" + spec + "'");
    check_unit(v, "k");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("--k list is empty");
  return out;
}

Outcome cmd_simulate(const Config& c) {
  check_unit(c.p, "p");
  check_unit(c.k, "k");
  const WitnessSetup ws = resolve_witness(c);
  const MixedState rho = noisy_ghz(ws.n, c.p, c.k);
  const Behavior b = behavior_from_state(rho, ws.s);
  const std::vector<double> vals = evaluate_terms(ws.w, b);
  double total = 0;
  for (double v : vals) total += v;
  const bool violated = total > ws.w.bound + 1e-9;

  Outcome o;
  o.code = violated ? 0 : 2;
  if (c.csv) {
    std::string s = "term,coeff,value\n";
    for (std::size_t i = 0; i < vals.size(); ++i)
      s += term_label(ws.w.terms[i]) + "," + fmt(ws.w.terms[i].coeff) + "," + fmt(vals[i]) + "\n";
    s += "total,," + fmt(total) + "\n";
    o.text = s;
    return o;
  }
  json r = report_header(c);
  json terms = json::array();
  for (std::size_t i = 0; i < vals.size(); ++i)
    terms.push_back({{"term", term_label(ws.w.terms[i])}, {"coeff", ws.w.terms[i].coeff}, {"value", vals[i]}});
  r["witness"] = ws.w.name;
  r["n"] = ws.n;
  r["p"] = c.p;
  r["k"] = c.k;
  r["fidelity"] = fidelity_to_ghz(rho);
  r["terms"] = terms;
  r["total"] = total;
  r["bound"] = ws.w.bound;
  r["violated"] = violated;
  o.text = r.dump(2) + "\n";
  return o;
}

Outcome cmd_sweep(const Config& c) {
  const WitnessSetup ws = resolve_witness(c);
  const std::vector<double> ps = parse_p_range(c.p_range);
  const std::vector<double> ks = parse_k_list(c.k_list);

  struct Row {
    double k, p, value;
  };
  std::vector<Row> rows(ps.size() * ks.size());
  parallel_for(static_cast<int>(rows.size()), default_threads(), [&](int i) {
    const double k = ks[i / ps.size()], p = ps[i % ps.size()];
    rows[i] = {k, p, evaluate(ws.w, behavior_from_state(noisy_ghz(ws.n, p, k), ws.s))};
  });
  std::vector<std::optional<Threshold>> th;
  for (double k : ks) {
    try {
      th.push_back(threshold_mixed_noise(ws.w, ws.s, ws.n, k));
    } catch (const NoCrossing&) {
      th.push_back(std::nullopt);
    }
  }
  bool any = false;
  for (const Row& r : rows) any = any || r.value > ws.w.bound + 1e-9;

  Outcome o;
  o.code = any ? 0 : 2;
  if (c.csv) {
    std::string s = "n,k,p,value,violated,p_star,f_star\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& t = th[i / ps.size()];
      s += std::to_string(ws.n) + "," + fmt(rows[i].k) + "," + fmt(rows[i].p) + "," + fmt(rows[i].value) + "," +
           (rows[i].value > ws.w.bound + 1e-9 ? "1" : "0") + "," + (t ? fmt(t->p) : "") + "," +
           (t ? fmt(t->fidelity) : "") + "\n";
    }
    o.text = s;
    return o;
  }
  json r = report_header(c);
  r["witness"] = ws.w.name;
  r["n"] = ws.n;
  r["bound"] = ws.w.bound;
  json jr = json::array(), jt = json::array();
  for (const Row& row : rows)
    jr.push_back({{"k", row.k}, {"p", row.p}, {"value", row.value}, {"violated", row.value > ws.w.bound + 1e-9}});
  for (std::size_t i = 0; i < ks.size(); ++i)
    jt.push_back(th[i] ? json{{"k", ks[i]}, {"p_star", th[i]->p}, {"fidelity_star", th[i]->fidelity}}
                       : json{{"k", ks[i]}, {"p_star", nullptr}, {"fidelity_star", nullptr}});
  r["rows"] = jr;
  r["thresholds"] = jt;
  o.text = r.dump(2) + "\n";
  return o;
}

Behavior certify_behavior(const Config& c, int n) {
  if (c.behavior == "ghz" || c.behavior == "noisy") {
    check_unit(c.p, "p");
    check_unit(c.k, "k");
    const double p = c.behavior == "ghz" ? 1.0 : c.p;
    return behavior_from_state(noisy_ghz(n, p, c.behavior == "ghz" ? 0.0 : c.k),
                               generic_strategy(std::vector<int>(n, 2)));
  }
  if (c.behavior == "white") return Behavior::uniform(std::vector<int>(n, 2));
  if (c.behavior == "local") return Behavior::deterministic(std::vector<int>(n, 2), std::vector<std::vector<int>>(n, {1, 1}));
  if (c.behavior == "pr") {
    if (n != 2) throw DomainError("the PR box needs --n 2");
    std::vector<double> t(16, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            if ((a ^ b) == (x & y)) t[(x * 2 + y) * 4 + a * 2 + b] = 0.5;
    return Behavior({2, 2}, t);
  }
  throw DomainError("unknown behavior '" + c.behavior + "' (ghz, noisy, white, local, pr)");
}

Outcome cmd_certify(const Config& c) {
  const int n = c.n > 0 ? c.n : 3;
  const Scenario s = Scenario::make(std::vector<int>(n, 2));
  InflationGraph g;
  if (c.inflation == "ring") {
    g = ring_inflation(s, c.order);
  } else {
    g = graph_from_json(read_text_file(c.inflation));
  }
  const NonfanoutReport nf = validate_nonfanout(g);
  if (!nf.ok) {
    std::string msg = "inflation graph is not nonfanout:";
    for (const std::string& d : nf.diagnostics) msg += "\n  " + d;
    throw StructuralError(msg);
  }
  const InflationConstraintSystem cs = build_constraint_system(g, s);
  const Behavior b = certify_behavior(c, n);
  if (!c.lp_out.empty()) {
    std::ostringstream lp;
    write_lp(lp, visibility_program(cs, b));
    write_text_file(c.lp_out, lp.str());
  }

  InflationOptions opts;
  opts.lp.feasibility_tol = std::min(opts.lp.feasibility_tol, c.tol_feas);
  opts.lp.gap_tol = c.tol_gap;
  opts.feasibility_tol = c.tol_feas;
  InflationSolver solver(cs, opts);
  const VisibilityResult vr = solver.visibility(b);
  const bool feasible = vr.tau <= 1.0 + c.tol_feas;
  const CertificateReport rep = verify_certificate(cs, vr.certificate, b);
  const double gmf = solver.gmf_lower_bound(b);
  const ProbabilityFormWitness pf = certificate_witness(cs, vr.certificate);
  if (!c.cert_out.empty()) write_text_file(c.cert_out, probability_form_to_json(pf));

  Outcome o;
  o.code = feasible ? 2 : 0;
  if (c.csv) {
    o.text = "quantity,value\ntau," + fmt(vr.tau) + "\nvisibility," + fmt(vr.visibility) + "\nfeasible," +
             (feasible ? "1" : "0") + "\ncertificate_verified," + (rep.ok ? "1" : "0") + "\ncertificate_value," +
             fmt(rep.value) + "\ngmf_lower_bound," + fmt(gmf) + "\n";
    return o;
  }
  json r = report_header(c);
  r["scenario"] = {{"n_parties", n}, {"inputs", s.inputs}};
  r["inflation"] = {{"party_copies", g.party_copies.size()},
                    {"source_copies", g.source_copies.size()},
                    {"columns", cs.n_columns},
                    {"correlator_classes", cs.n_classes},
                    {"m1_rows", cs.M1.rows()},
                    {"m2_rows", cs.M2.rows()},
                    {"nonzeros", cs.nonzeros()}};
  r["behavior"] = c.behavior;
  r["tau"] = vr.tau;
  r["visibility"] = vr.visibility;
  r["feasible"] = feasible;
  r["lp_iterations"] = vr.iterations;
  r["certificate"] = {{"verified", rep.ok},
                      {"value", rep.value},
                      {"max_violation", rep.max_violation},
                      {"failures", rep.failures}};
  r["gmf_lower_bound"] = gmf;
  r["certificate_witness"] = json::parse(probability_form_to_json(pf));
  o.text = r.dump(2) + "\n";
  return o;
}

Outcome cmd_analyze(const Config& c) {
  const std::string path = c.dataset.empty() ? std::string(GHZW_BUNDLED_DATASET) : c.dataset;
  const ExperimentDataset ds = parse_dataset(path);

  struct Block {
    std::string name;
    double bound;
    double value;
    MonteCarloResult mc;
    std::vector<TermValue> terms;
  };
  std::vector<Block> blocks;
  const std::pair<const char*, DatasetEvaluator> evals[] = {{"W4", eval_w4_from_data}, {"W3", eval_w3_from_data}};
  for (const auto& [name, ev] : evals) {
    const bool w4 = std::string(name) == "W4";
    blocks.push_back({name, w4 ? 6.0 : 8.0, ev(ds), monte_carlo_sigma(ds, ev, c.resamples, c.seed),
                      evaluate_data_terms(ds, w4 ? w4_data_terms() : w3_data_terms())});
  }
  const StabilizerReport st = stabilizer_fidelity(ds);
  const MonteCarloResult st_mc = monte_carlo_sigma(
      ds, [](const ExperimentDataset& d) { return stabilizer_fidelity(d).witness; }, c.resamples, c.seed);

  Outcome o;
  o.code = 0;
  for (const Block& b : blocks)
    if (b.value <= b.bound) o.code = 2;
  if (c.csv) {
    std::string s = "quantity,value,sigma\n";
    for (const Block& b : blocks) {
      s += b.name + "," + fmt(b.value) + "," + fmt(b.mc.sigma) + "\n";
      s += b.name + "_sigmas_above_bound," + fmt((b.value - b.bound) / b.mc.sigma) + ",\n";
    }
    s += "stabilizer_witness," + fmt(st.witness) + "," + fmt(st_mc.sigma) + "\n";
    s += "fidelity_bound," + fmt(st.fidelity_bound) + "," + fmt(st_mc.sigma / 2) + "\n";
    s += "hom_visibility," + fmt(st.hom_visibility) + ",\n";
    o.text = s;
    return o;
  }
  json r = report_header(c);
  r["dataset"] = path;
  for (const Block& b : blocks) {
    json terms = json::array();
    for (const TermValue& t : b.terms)
      terms.push_back({{"term", t.term.label},
                       {"row", t.term.row.str()},
                       {"coeff", t.term.coeff},
                       {"value", t.estimate.value},
                       {"effective_total", t.estimate.effective_total}});
    r[b.name] = {{"value", b.value},
                 {"bound", b.bound},
                 {"sigma", b.mc.sigma},
                 {"mc_mean", b.mc.mean},
                 {"resamples", b.mc.n_resamples},
                 {"sigmas_above_bound", (b.value - b.bound) / b.mc.sigma},
                 {"terms", terms}};
  }
  r["stabilizer"] = {{"xxxx", st.s1},
                     {"zz_pairs", st.pair},
                     {"z_projector", st.z_projector},
                     {"witness", st.witness},
                     {"witness_sigma", st_mc.sigma},
                     {"fidelity_bound", st.fidelity_bound},
                     {"hom_visibility", st.hom_visibility}};
  o.text = r.dump(2) + "\n";
  return o;
}

Outcome cmd_vertices(const Config& c) {
  const WitnessSetup ws = resolve_witness(c);
  const std::vector<Behavior> verts = local_deterministic_vertices(ws.w.inputs_per_party);
  std::vector<double> values;
  for (const Behavior& v : verts) values.push_back(evaluate(ws.w, v));
  const double cmax = *std::max_element(values.begin(), values.end());
  const double cmin = *std::min_element(values.begin(), values.end());

  Outcome o;
  o.code = cmax > ws.w.bound + 1e-9 ? 2 : 0;
  if (c.csv) {
    std::string s = "vertex,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) s += std::to_string(i) + "," + fmt(values[i]) + "\n";
    o.text = s;
    return o;
  }
  json r = report_header(c);
  r["witness"] = ws.w.name;
  r["bound"] = ws.w.bound;
  r["vertices"] = verts.size();
  r["classical_max"] = cmax;
  r["classical_min"] = cmin;
  r["bound_holds"] = cmax <= ws.w.bound + 1e-9;
  if (ws.n <= 4) {
    SolverOptions so;
    so.gap_tol = c.tol_gap;
    const double ns_min = extremize_over_nonsignalling(ws.w, Sense::Minimize, so).value;
    const double ns_max = extremize_over_nonsignalling(ws.w, Sense::Maximize, so).value;
    r["nonsignalling_min"] = ns_min;
    r["nonsignalling_max"] = ns_max;
    if (ws.builtin) {
      const double q = evaluate(ws.w, behavior_from_state(ghz_state(ws.n), ws.s));
      r["quantum_value"] = q;
      r["worst_case_visibility"] = visibility_specific(q, ns_min, ws.w.bound);
    }
  }
  o.text = r.dump(2) + "\n";
  return o;
}

}  // namespace

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"GHZ network-nonlocality witnesses, inflation certificates and coincidence-count analysis", "ghzw"};
  app.set_version_flag("--version", GHZW_VERSION);
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
    sub->add_flag("--csv", c.csv, "CSV output instead of JSON");
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--tol-feas", c.tol_feas, "LP feasibility tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-gap", c.tol_gap, "LP duality-gap tolerance")->check(CLI::PositiveNumber);
  };
  auto witness_opts = [&](CLI::App* sub) {
    sub->add_option("--witness", c.witness, "W3, W4, NParty, or a witness JSON file");
    sub->add_option("--n", c.n, "Number of parties (NParty witness, certify)")->check(CLI::Range(2, 12));
    sub->add_flag("--main-text-b1", c.main_text_b1, "NParty: use (X - Z)/sqrt2 for Bob's second setting");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Per-term witness values on a noisy GHZ state");
  witness_opts(sim);
  sim->add_option("--p", c.p, "GHZ weight p");
  sim->add_option("--k", c.k, "Dephasing share k of the noise");
  common(sim);

  CLI::App* sweep = app.add_subcommand("sweep", "Witness value over a noise grid, with thresholds");
  witness_opts(sweep);
  sweep->add_option("--p-range", c.p_range, "a:b:steps");
  sweep->add_option("--k", c.k_list, "Comma-separated k values");
  common(sweep);

  CLI::App* cert = app.add_subcommand("certify", "Inflation LP, dual certificate and its verification");
  cert->add_option("--n", c.n, "Number of parties")->check(CLI::Range(2, 12));
  cert->add_option("--inflation", c.inflation, "ring, or an inflation graph JSON file");
  cert->add_option("--order", c.order, "Ring inflation order")->check(CLI::Range(2, 16));
  cert->add_option("--behavior", c.behavior, "ghz, noisy, white, local or pr");
  cert->add_option("--p", c.p, "GHZ weight p for --behavior noisy");
  cert->add_option("--k", c.k, "Dephasing share k for --behavior noisy");
  cert->add_option("--cert-out", c.cert_out, "Write the certificate as a probability-form witness JSON");
  cert->add_option("--lp-out", c.lp_out, "Write the visibility LP in the polytope text format");
  common(cert);

  CLI::App* an = app.add_subcommand("analyze", "W3/W4, Monte Carlo errors and fidelity from count data");
  an->add_option("--dataset", c.dataset, "Counts CSV (default: the bundled four-photon counts)");
  an->add_option("--resamples", c.resamples, "Monte Carlo resamples")->check(CLI::Range(1000, 10000000));
  common(an);

  CLI::App* vert = app.add_subcommand("vertices", "Classical and nonsignalling extremes of a witness");
  witness_opts(vert);
  common(vert);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    Outcome o;
    if (c.command == "simulate") o = cmd_simulate(c);
    else if (c.command == "sweep") o = cmd_sweep(c);
    else if (c.command == "certify") o = cmd_certify(c);
    else if (c.command == "analyze") o = cmd_analyze(c);
    else o = cmd_vertices(c);
    if (c.out.empty()) out << o.text;
    else write_text_file(c.out, o.text);
    return o.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace ghzw
