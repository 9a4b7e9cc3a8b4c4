#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cml/formula.hpp"

namespace cml {

// directed acyclic graph with two edge kinds and labelled vertices;
// vertex ids are arbitrary ints (formula-tree preorder indices when the
// arena comes from a formula)
struct modal_arena {
  std::map<int, std::string> labels;             // "box", "dia" or an atom name
  std::set<std::pair<int, int>> iedges;          // v ⊸ w
  std::set<std::pair<int, int>> medges;          // v ↝ w, stored transitively closed

  bool has(int v) const { return labels.count(v) != 0; }
  bool modal(int v) const {
    auto it = labels.find(v);
    return it != labels.end() && (it->second == "box" || it->second == "dia");
  }
  bool ie(int v, int w) const { return iedges.count({v, w}) != 0; }
  bool me(int v, int w) const { return medges.count({v, w}) != 0; }
  std::vector<int> vertices() const;

  bool operator==(const modal_arena& o) const = default;
};

// ⟦F⟧; vertex ids are the formula-tree preorder indices of atoms and modalities
modal_arena arena_of(const formula_ptr& f);

struct arena_report {
  bool ok = true;
  std::string violation;      // empty | cyclic | L-shape | Sigma-shape |
                              // modal-axiom-1 .. modal-axiom-6 | labeling
  std::vector<int> witness;
  std::string detail;
};

arena_report is_modal_arena(const modal_arena& a);

struct vertex_data {
  int depth = 0;      // length of the longest ⊸-path to a root
  bool even = true;   // depth parity; even = ∘, odd = •
  int pmv = -1;       // ṽ(v): innermost modality whose cone contains v, else v
  std::set<int> cone; // cone(v), non-empty only for modalities
};

// depth/parity/pmv/cone for every vertex; requires a valid modal arena
std::map<int, vertex_data> vertex_info(const modal_arena& a);

std::set<int> iroots(const modal_arena& a);   // no outgoing ⊸
std::set<int> mroots(const modal_arena& a);   // no incoming ↝

// ⊸*-descendants, reflexive
std::map<int, std::set<int>> ireach(const modal_arena& a);

// depth of the deepest common ⊸*-descendants of v and w, or -1 if none
int meeting_depth(const modal_arena& a, int v, int w);
// v ⌢ w: meeting depth odd (including -1)
bool conjunct(const modal_arena& a, int v, int w);

// address add(v) = ṽ(v), ṽ(ṽ(v)), ... (empty when v is its own pmv)
std::vector<int> address(const std::map<int, vertex_data>& info, int v);

struct formula_of_result {
  formula_ptr f;
  std::map<int, int> to_preorder;  // original vertex id -> preorder index in f
};

// inverse of arena_of up to ~f; throws std::runtime_error when the graph is
// not the arena of any formula
formula_of_result formula_of(const modal_arena& a);

// label-preserving isomorphism of the two graphs (backtracking, used for
// fixed expected graphs in tests)
bool arena_isomorphic(const modal_arena& a, const modal_arena& b);

}  // namespace cml
