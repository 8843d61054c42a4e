#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ghzw/witness.hpp"

namespace ghzw {

// {name, n_parties, inputs_per_party,
//  terms: [{parties: [{party, setting, flip}], condition?: {party, setting, outcome}, coeff}],
//  bound}
std::string witness_to_json(const Witness& w, int indent = 2);
Witness witness_from_json(std::string_view text);

// {name, n_parties, inputs_per_party,
//  events: [{parties, settings, outcomes, coeff}], bound, shift, scale}
std::string probability_form_to_json(const ProbabilityFormWitness& pf, int indent = 2);
ProbabilityFormWitness probability_form_from_json(std::string_view text);

Witness read_witness_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ghzw
