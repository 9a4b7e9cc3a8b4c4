#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cml/arena.hpp"
#include "cml/sequent.hpp"

namespace cml {

// arena map; the source may be empty (the empty map into `target`)
struct skew_map {
  modal_arena source, target;
  std::map<int, int> assign;

  bool operator==(const skew_map& o) const = default;
};

skew_map identity_map(const modal_arena& a);

struct skew_report {
  bool ok = true;
  std::string clause;  // arena | empty | assignment | label | depth | iedge |
                       // medge | modal | conjunct | disjunct | lifting
  std::vector<int> witness;
  std::string detail;
};

// kind: "even" or "odd"; the empty map is only a valid odd fibration
skew_report check_fibration(const skew_map& m, const std::string& kind);

// g after f; throws std::runtime_error unless f.target == g.source
skew_map compose(const skew_map& f, const skew_map& g);

// d: chain of deep rules over single-formula sequents, topped by a hyp node
// (the shape produced by decompose); must check in system downLJ; returns the
// even skew fibration from the arena of the top formula to the arena of the
// bottom one
skew_map fibration_of_derivation(const derivation_ptr& d);

// generator tree; ops: id | empty | sum | imp | mod | pair
struct gen_tree;
using gen_ptr = std::shared_ptr<gen_tree>;
struct gen_tree {
  std::string op;
  std::vector<gen_ptr> kids;
};

struct skew_decomposition {
  gen_ptr tree;
  derivation_ptr down;  // deep-rule chain rebuilding the map
};

// factorises an even skew fibration into generators and reads the chain of
// deep rules off the tree (one deep weakening per empty leaf, one deep
// contraction per pairing); precondition: check_fibration(m, "even") accepts
skew_decomposition decompose_fibration(const skew_map& m);

// isomorphism pair source->source, target->target commuting with the
// assignments
bool skew_equivalent(const skew_map& a, const skew_map& b);

}  // namespace cml
