#pragma once

#include <vector>

#include "ghzw/inflation.hpp"

namespace ghzw::detail {

// Index arithmetic for one inflation graph's table and correlator
// coordinates. A correlator coordinate gives each copy a digit in
// 0..m_j: 0 leaves the copy out, d > 0 reads it at setting d - 1.
struct GraphLayout {
  GraphLayout(const InflationGraph& g, const Scenario& s);

  int K = 0;
  std::vector<int> roles;
  std::vector<int> m;
  long n_settings = 1;
  long n_outcomes = 1;
  long n_z = 1;

  std::vector<int> decode_setting(long s) const;
  long encode_setting(const std::vector<int>& x) const;
  std::vector<int> decode_z(long t) const;
  long encode_z(const std::vector<int>& v) const;
};

}  // namespace ghzw::detail
