#include "ghzw/inflation_json.hpp"

#include <json.hpp>

#include "ghzw/errors.hpp"

namespace ghzw {

using nlohmann::json;

std::string graph_to_json(const InflationGraph& g, int indent) {
  json parties = json::array(), sources = json::array(), edges = json::array();
  for (const PartyCopy& p : g.party_copies) parties.push_back({{"role", p.role}, {"copy", p.copy}});
  for (const SourceCopy& s : g.source_copies)
    sources.push_back({{"role", s.role}, {"copy", s.copy}, {"scope", s.scope}});
  for (const auto& [s, p] : g.edges) edges.push_back({s, p});
  return json{{"party_copies", parties}, {"source_copies", sources}, {"edges", edges}}.dump(indent);
}

InflationGraph graph_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    InflationGraph g;
    for (const json& p : j.at("party_copies")) g.party_copies.push_back({p.at("role").get<int>(), p.at("copy").get<int>()});
    for (const json& s : j.at("source_copies"))
      g.source_copies.push_back({s.at("role").get<int>(), s.at("copy").get<int>(), s.at("scope").get<std::vector<int>>()});
    for (const json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("graph edges must be [source, party] pairs");
      g.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return g;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed graph JSON: ") + e.what());
  }
}

std::string certificate_to_json(const DualCertificate& cert, int indent) {
  return json{{"y1", cert.y1}, {"y2", cert.y2}, {"value", cert.value}}.dump(indent);
}

DualCertificate certificate_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DualCertificate c;
    c.y1 = j.at("y1").get<std::vector<double>>();
    c.y2 = j.at("y2").get<std::vector<double>>();
    c.value = j.value("value", 0.0);
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed certificate JSON: ") + e.what());
  }
}

}  // namespace ghzw
