#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cml/arena.hpp"
#include "cml/sequent.hpp"

namespace cml {

// modal arena together with a partition of its vertices into axiom classes
struct arena_net {
  modal_arena arena;
  std::vector<std::vector<int>> classes;  // each sorted ascending

  bool operator==(const arena_net& o) const = default;
};

// v ⊸ w is a chord when some u has v⊸u and u↝w, or u⊸w and u↝v
bool is_chord(const modal_arena& a, int v, int w);

// Λ(G): odd non-chord ⊸-edges, pmv edges and one axiom link per odd vertex
struct linking {
  std::set<std::pair<int, int>> oedges, omedges, axlinks;
};

// throws std::runtime_error when the partition is not linked
linking linking_of(const arena_net& p);

struct net_report {
  bool ok = true;
  std::string condition;  // arena | not-linked | acyclic | functional |
                          // functorial | non-empty | CK-correct | CD-correct
  std::vector<int> witness;
  std::string detail;
};

// logic: "CK" or "CD"; a partition with no modal vertices only has to satisfy
// the two structural conditions
net_report check_net(const arena_net& p, const std::string& logic);

// translation of a linear proof; the derivation must check in IMLL-CK (logic
// "CK") or IMLL-CD (logic "CD"); the result arena is the arena of the curried
// conclusion sequent, with one axiom class per ax instance and one per
// modal-rule instance
arena_net net_of_proof(const derivation_ptr& d, const std::string& logic);

// modality elimination: every modal vertex m splits into a linked pair of
// fresh atoms m_in ≈ m_out; precondition: check_net(p, "CK") accepts; a
// modality-free net is returned unchanged
arena_net linearize(const arena_net& p);

// label-preserving isomorphism that also matches the partitions
bool net_isomorphic(const arena_net& a, const arena_net& b);

}  // namespace cml
