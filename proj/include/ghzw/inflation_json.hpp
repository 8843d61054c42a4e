#pragma once

#include <string>
#include <string_view>

#include "ghzw/inflation.hpp"

namespace ghzw {

/// {"party_copies": [{"role", "copy"}], "source_copies": [{"role", "copy",
/// "scope"}], "edges": [[source, party]]}
std::string graph_to_json(const InflationGraph& g, int indent = 2);
InflationGraph graph_from_json(std::string_view text);

std::string certificate_to_json(const DualCertificate& cert, int indent = 2);
DualCertificate certificate_from_json(std::string_view text);

}  // namespace ghzw
