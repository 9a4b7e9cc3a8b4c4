#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cml/icp.hpp"

namespace cml {

// prefix-closed set of views over one arena; the empty view is a member
struct strategy {
  std::set<std::vector<int>> views;

  bool operator==(const strategy& o) const = default;
};

strategy strategy_of_maximal(const std::vector<std::vector<int>>& maximal);
std::vector<std::vector<int>> maximal_views(const strategy& s);

struct game_report {
  bool ok = true;
  std::string clause;
  std::vector<int> view;  // offending view (or sequence) when ok is false
  std::string detail;
};

// clause: play | justified | shortsighted | uniform | modal | distinct |
// alternating; names the first violated view condition
game_report is_view(const modal_arena& a, const std::vector<int>& seq);

// clause: view | prefix-closed | o-complete | dia-complete | deterministic |
// total; a missing forced successor is reported as dia-complete when the
// missing move is a diamond and as o-complete otherwise
game_report check_wis(const modal_arena& a, const strategy& s);

// clause: well-framed | linked | CK-framed | CD-framed; precondition:
// check_wis accepts; logic: "CK" or "CD"
game_report check_framed(const modal_arena& a, const strategy& s,
                         const std::string& logic);

// images of the abstract views of c.net under c.map; precondition: check_icp
// accepts (throws std::runtime_error otherwise)
strategy wis_of_icp(const combinatorial_proof& c);

// rebuilds a combinatorial proof from a framed strategy on arena_of(f);
// preconditions: f is dia-bot-free and check_wis and check_framed(logic)
// accept; throws std::runtime_error otherwise
combinatorial_proof icp_of_wis(const formula_ptr& f, const strategy& s,
                               const std::string& logic);

// exhaustive search over answer choices; nullopt when no strategy on
// arena_of(f) passes check_wis and check_framed(logic)
std::optional<strategy> find_wis(const formula_ptr& f, const std::string& logic);

}  // namespace cml
