#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghzw {

/// `args` excludes the program name. Exit codes: 0 success, 2 informative negative outcome (no violation, or
/// the behavior is inflation-feasible), 1 error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

/// FNV-1a of a canonical config string; embedded in every report.
std::string config_hash(const std::string& canonical);

}  // namespace ghzw
