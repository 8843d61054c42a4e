#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "ghzw/errors.hpp"
#include "ghzw/expdata.hpp"

namespace ghzw {

namespace {

constexpr const char* kOutcomeNames[16] = {"pppp", "pppm", "ppmp", "ppmm", "pmpp", "pmpm", "pmmp", "pmmm",
                                           "mppp", "mppm", "mpmp", "mpmm", "mmpp", "mmpm", "mmmp", "mmmm"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::string header_line() {
  std::string h = "basisA,basisB,basisC,basisD,t_seconds";
  for (const char* n : kOutcomeNames) h += std::string(",n_") + n;
  return h;
}

}  // namespace

std::string to_string(Basis b) {
  switch (b) {
    case Basis::Z: return "Z";
    case Basis::X: return "X";
    case Basis::DPlus: return "D+";
    case Basis::DMinus: return "D-";
  }
  return "?";
}

Basis parse_basis(std::string_view tag) {
  if (tag == "Z") return Basis::Z;
  if (tag == "X") return Basis::X;
  if (tag == "D+") return Basis::DPlus;
  if (tag == "D-") return Basis::DMinus;
  throw ParseError("unknown basis tag '" + std::string(tag) + "'");
}

double basis_angle(Basis b) {
  switch (b) {
    case Basis::Z: return 0.0;
    case Basis::X: return std::numbers::pi / 2;
    case Basis::DPlus: return std::numbers::pi / 4;
    case Basis::DMinus: return -std::numbers::pi / 4;
  }
  return 0.0;
}

std::string SettingLabel::str() const {
  std::string s;
  for (Basis b : bases) s += to_string(b);
  return s;
}

SettingLabel parse_label(std::string_view compact) {
  SettingLabel l;
  std::size_t i = 0;
  for (int p = 0; p < 4; ++p) {
    if (i >= compact.size()) throw ParseError("setting label '" + std::string(compact) + "' is too short");
    const std::size_t len = compact[i] == 'D' ? 2 : 1;
    l.bases[p] = parse_basis(compact.substr(i, len));
    i += len;
  }
  if (i != compact.size()) throw ParseError("setting label '" + std::string(compact) + "' is too long");
  return l;
}

std::int64_t CountRecord::total() const {
  std::int64_t t = 0;
  for (std::int64_t n : counts) t += n;
  return t;
}

const CountRecord* ExperimentDataset::try_find(const SettingLabel& label) const {
  for (const CountRecord& r : records)
    if (r.label == label) return &r;
  return nullptr;
}

const CountRecord& ExperimentDataset::find(const SettingLabel& label) const {
  if (const CountRecord* r = try_find(label)) return *r;
  throw MissingRow("dataset has no " + label.str() + " row");
}

void ExperimentDataset::validate() const {
  if (records.empty()) throw ParseError("dataset is empty");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CountRecord& r = records[i];
    for (std::int64_t n : r.counts)
      if (n < 0) throw ParseError("row " + r.label.str() + " has a negative count");
    if (r.total() <= 0) throw ParseError("row " + r.label.str() + " has no counts");
    for (std::size_t j = 0; j < i; ++j)
      if (records[j].label == r.label) throw ParseError("duplicate row " + r.label.str());
  }
}

ExperimentDataset parse_dataset_text(std::string_view text) {
  ExperimentDataset ds;
  bool have_header = false;
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      ds.provenance.emplace_back(trim(line.substr(1)));
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    const auto cells = split(line);
    if (!have_header) {
      if (line != header_line()) throw ParseError(where + ": unexpected header");
      have_header = true;
      continue;
    }
    if (cells.size() != 21)
      throw ParseError(where + ": expected 21 columns, got " + std::to_string(cells.size()));
    CountRecord r;
    for (int p = 0; p < 4; ++p) {
      try {
        r.label.bases[p] = parse_basis(cells[p]);
      } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    {
      const std::string t(cells[4]);
      std::size_t used = 0;
      try {
        r.t_seconds = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != t.size() || t.empty() || !(r.t_seconds >= 0)) throw ParseError(where + ": bad t_seconds '" + t + "'");
    }
    for (int k = 0; k < 16; ++k) {
      const std::string_view c = cells[5 + k];
      std::int64_t n = 0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), n);
      if (ec != std::errc{} || ptr != c.data() + c.size() || c.empty())
        throw ParseError(where + ": count '" + std::string(c) + "' is not an integer");
      if (n < 0) throw ParseError(where + ": negative count " + std::string(c));
      r.counts[k] = n;
    }
    if (r.total() <= 0) throw ParseError(where + ": row " + r.label.str() + " has no counts");
    if (ds.try_find(r.label)) throw ParseError(where + ": duplicate row " + r.label.str());
    ds.records.push_back(r);
  }
  if (ds.records.empty()) throw ParseError("dataset is empty");
  return ds;
}

ExperimentDataset parse_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset_text(ss.str());
}

std::string dataset_to_csv(const ExperimentDataset& ds) {
  std::ostringstream out;
  for (const std::string& p : ds.provenance) out << "# " << p << '\n';
  out << header_line() << '\n';
  for (const CountRecord& r : ds.records) {
    for (Basis b : r.label.bases) out << to_string(b) << ',';
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, r.t_seconds);
    out << std::string_view(buf, res.ptr - buf);
    for (std::int64_t n : r.counts) out << ',' << n;
    out << '\n';
  }
  return out.str();
}

std::vector<SettingLabel> table1_labels() {
  std::vector<SettingLabel> out;
  for (const char* s : {"XD+XX", "XD-XX", "ZD+XX", "ZD-XX", "XXXX", "ZZZZ", "ZZZX", "XD+ZX", "XD-ZX"})
    out.push_back(parse_label(s));
  return out;
}

}  // namespace ghzw
