#pragma once

#include <string>

#include "cml/game.hpp"
#include "cml/icp.hpp"

namespace cml {

// ⊸ solid directed, ↝ dashed directed, modal vertices boxed
std::string arena_dot(const modal_arena& a);

// arena plus ≈ as undirected dashed blue edges, one spanning chain per class
std::string net_dot(const arena_net& p);

// two clusters with dotted cross-arrows for the assignment
std::string map_dot(const skew_map& m);

// framed views as grids: one row per view, columns in play order
std::string strategy_dot(const modal_arena& a, const strategy& s);

}  // namespace cml
