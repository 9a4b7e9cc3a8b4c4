#pragma once

#include <string>

#include "cml/net.hpp"
#include "cml/skew.hpp"

namespace cml {

// certificate: an axiom-partitioned arena fibred over the conclusion arena
struct combinatorial_proof {
  arena_net net;
  formula_ptr conclusion;  // dia-bot-free
  skew_map map;            // even skew fibration net.arena -> arena_of(conclusion)
  std::string logic;       // "CK" or "CD"
};

struct icp_report {
  bool ok = true;
  std::string layer;  // diabot | arena | net | fibration
  std::string detail;
};

// polynomial-time validity check; never reconstructs a missing layer
icp_report check_icp(const combinatorial_proof& c);

// linear: IMLL-<logic>-pol proof; down: downLJ chain topped by a hyp node
// holding the linear conclusion; throws std::runtime_error when either part
// fails to check or the assembled certificate is invalid
combinatorial_proof icp_of_factorised_proof(const derivation_ptr& linear,
                                            const derivation_ptr& down,
                                            const std::string& logic);

}  // namespace cml
