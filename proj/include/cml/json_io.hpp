#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cml/game.hpp"
#include "cml/icp.hpp"

namespace cml {

// all readers throw std::runtime_error on malformed input

std::string arena_to_json(const modal_arena& a, bool pretty = false);
modal_arena arena_from_json(const std::string& text);

std::string net_to_json(const arena_net& p, bool pretty = false);
arena_net net_from_json(const std::string& text);

std::string map_to_json(const skew_map& m, bool pretty = false);
skew_map map_from_json(const std::string& text);

std::string icp_to_json(const combinatorial_proof& c, bool pretty = false);
combinatorial_proof icp_from_json(const std::string& text);

// the arena is carried as its formula; vertex ids are preorder indices
std::string strategy_to_json(const formula_ptr& f, const strategy& s,
                             bool pretty = false);
std::pair<formula_ptr, strategy> strategy_from_json(const std::string& text);

std::string derivation_to_json(const derivation_ptr& d, bool pretty = false);
derivation_ptr derivation_from_json(const std::string& text);

// {"ok":...,"layer":...,"witness":...,"detail":...}
std::string report_json(bool ok, const std::string& layer,
                        const std::string& detail,
                        const std::vector<int>& witness = {},
                        bool pretty = false);

}  // namespace cml
