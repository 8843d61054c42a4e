// lp 1
// sense min|max
// variables <n>
// objective <j>:<v> ...
// bound <j> <lo> <up>          (only for non-default bounds)
// row le|eq|ge <rhs> <j>:<v> ...
// end

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ghzw/errors.hpp"
#include "ghzw/lp.hpp"

namespace ghzw {

namespace {

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, int line) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

Coefficient parse_entry(const std::string& tok, int line) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos) throw ParseError("line " + std::to_string(line) + ": expected j:v, got " + tok);
  return {parse_int(tok.substr(0, colon), line), parse_double(tok.substr(colon + 1), line)};
}

}  // namespace

void write_lp(std::ostream& out, const LinearProgram& lp) {
  out << "lp 1\n";
  out << "sense " << (lp.sense == Sense::Minimize ? "min" : "max") << "\n";
  out << "variables " << lp.n_vars() << "\n";
  out << "objective";
  for (int j = 0; j < lp.n_vars(); ++j)
    if (lp.objective[j] != 0) out << ' ' << j << ':' << fmt(lp.objective[j]);
  out << "\n";
  for (int j = 0; j < lp.n_vars(); ++j)
    if (lp.lower_bound(j) != 0 || lp.upper_bound(j) != kInf)
      out << "bound " << j << ' ' << fmt(lp.lower_bound(j)) << ' ' << fmt(lp.upper_bound(j)) << "\n";
  for (const Constraint& r : lp.rows) {
    const char* rel = r.relation == Relation::LessEqual ? "le" : r.relation == Relation::Equal ? "eq" : "ge";
    out << "row " << rel << ' ' << fmt(r.rhs);
    for (const Coefficient& a : r.coeffs) out << ' ' << a.index << ':' << fmt(a.value);
    out << "\n";
  }
  out << "end\n";
}

LinearProgram read_lp(std::istream& in) {
  LinearProgram lp;
  std::string line;
  int lineno = 0;
  bool header = false, ended = false, sized = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (ended) throw ParseError("line " + std::to_string(lineno) + ": content after end");
    if (!header) {
      std::string ver;
      ss >> ver;
      if (key != "lp" || ver != "1") throw ParseError("missing 'lp 1' header");
      header = true;
      continue;
    }
    std::string tok;
    if (key == "sense") {
      ss >> tok;
      if (tok == "min") lp.sense = Sense::Minimize;
      else if (tok == "max") lp.sense = Sense::Maximize;
      else throw ParseError("line " + std::to_string(lineno) + ": unknown sense " + tok);
    } else if (key == "variables") {
      ss >> tok;
      lp.objective.assign(parse_int(tok, lineno), 0.0);
      sized = true;
    } else if (!sized) {
      throw ParseError("line " + std::to_string(lineno) + ": 'variables' must come first");
    } else if (key == "objective") {
      while (ss >> tok) {
        Coefficient c = parse_entry(tok, lineno);
        if (c.index < 0 || c.index >= lp.n_vars()) throw ParseError("objective index out of range");
        lp.objective[c.index] = c.value;
      }
    } else if (key == "bound") {
      std::string j, lo, up;
      ss >> j >> lo >> up;
      const int idx = parse_int(j, lineno);
      if (idx < 0 || idx >= lp.n_vars()) throw ParseError("bound index out of range");
      if (lp.lower.empty()) lp.lower.assign(lp.n_vars(), 0.0);
      if (lp.upper.empty()) lp.upper.assign(lp.n_vars(), kInf);
      lp.lower[idx] = parse_double(lo, lineno);
      lp.upper[idx] = parse_double(up, lineno);
    } else if (key == "row") {
      Constraint r;
      ss >> tok;
      if (tok == "le") r.relation = Relation::LessEqual;
      else if (tok == "eq") r.relation = Relation::Equal;
      else if (tok == "ge") r.relation = Relation::GreaterEqual;
      else throw ParseError("line " + std::to_string(lineno) + ": unknown relation " + tok);
      ss >> tok;
      r.rhs = parse_double(tok, lineno);
      while (ss >> tok) r.coeffs.push_back(parse_entry(tok, lineno));
      lp.rows.push_back(std::move(r));
    } else if (key == "end") {
      ended = true;
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown keyword " + key);
    }
  }
  if (!ended) throw ParseError("LP text is missing 'end'");
  lp.validate();
  return lp;
}

}  // namespace ghzw
