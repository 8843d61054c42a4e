#include "ghzw/witness_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ghzw/errors.hpp"

namespace ghzw {

using nlohmann::json;

namespace {

std::vector<int> checked_inputs(const json& j) {
  auto inputs = j.at("inputs_per_party").get<std::vector<int>>();
  if (j.contains("n_parties") && j.at("n_parties").get<int>() != static_cast<int>(inputs.size()))
    throw ParseError("n_parties disagrees with inputs_per_party");
  return inputs;
}

template <class F>
auto parse_guarded(std::string_view text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed witness JSON: ") + e.what());
  }
}

}  // namespace

std::string witness_to_json(const Witness& w, int indent) {
  json terms = json::array();
  for (const CorrelatorTerm& t : w.terms) {
    json parties = json::array();
    for (const Factor& f : t.factors)
      parties.push_back({{"party", f.party}, {"setting", f.setting}, {"flip", f.flip}});
    json jt = {{"parties", parties}, {"coeff", t.coeff}};
    if (t.condition)
      jt["condition"] = {{"party", t.condition->party},
                         {"setting", t.condition->setting},
                         {"outcome", t.condition->outcome}};
    terms.push_back(std::move(jt));
  }
  json j = {{"name", w.name},
            {"n_parties", w.n_parties()},
            {"inputs_per_party", w.inputs_per_party},
            {"terms", terms},
            {"bound", w.bound}};
  return j.dump(indent);
}

Witness witness_from_json(std::string_view text) {
  Witness w = parse_guarded(text, [](const json& j) {
    Witness w;
    w.name = j.value("name", std::string{});
    w.inputs_per_party = checked_inputs(j);
    w.bound = j.at("bound").get<double>();
    for (const json& jt : j.at("terms")) {
      CorrelatorTerm t;
      t.coeff = jt.at("coeff").get<double>();
      for (const json& jf : jt.at("parties"))
        t.factors.push_back({jf.at("party").get<int>(), jf.at("setting").get<int>(), jf.value("flip", false)});
      if (jt.contains("condition")) {
        const json& c = jt.at("condition");
        t.condition = Condition{c.at("party").get<int>(), c.at("setting").get<int>(), c.at("outcome").get<int>()};
      }
      w.terms.push_back(std::move(t));
    }
    return w;
  });
  try {
    w.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("invalid witness: ") + e.what());
  }
  return w;
}

std::string probability_form_to_json(const ProbabilityFormWitness& pf, int indent) {
  json events = json::array();
  for (const ProbabilityEvent& e : pf.events)
    events.push_back({{"parties", e.parties}, {"settings", e.settings}, {"outcomes", e.outcomes}, {"coeff", e.coeff}});
  json j = {{"name", pf.name},       {"n_parties", pf.n_parties()}, {"inputs_per_party", pf.inputs_per_party},
            {"events", events},      {"bound", pf.bound},           {"shift", pf.shift},
            {"scale", pf.scale}};
  return j.dump(indent);
}

ProbabilityFormWitness probability_form_from_json(std::string_view text) {
  return parse_guarded(text, [](const json& j) {
    ProbabilityFormWitness pf;
    pf.name = j.value("name", std::string{});
    pf.inputs_per_party = checked_inputs(j);
    pf.bound = j.at("bound").get<double>();
    pf.shift = j.value("shift", 0.0);
    pf.scale = j.value("scale", 1.0);
    for (const json& je : j.at("events"))
      pf.events.push_back({je.at("parties").get<std::vector<int>>(), je.at("settings").get<std::vector<int>>(),
                           je.at("outcomes").get<std::vector<int>>(), je.at("coeff").get<double>()});
    return pf;
  });
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

Witness read_witness_file(const std::filesystem::path& path) {
  return witness_from_json(read_text_file(path));
}

}  // namespace ghzw
