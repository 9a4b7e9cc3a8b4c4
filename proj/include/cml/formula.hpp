#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace cml {

enum class fkind { atom, implies, conj, box, dia, diabot };

struct formula;
using formula_ptr = std::shared_ptr<const formula>;

struct formula {
  fkind kind;
  std::string name;       // atom name, when kind == atom
  formula_ptr left;       // implies/conj left, box/dia body
  formula_ptr right;      // implies/conj right
};

formula_ptr mk_atom(const std::string& name);
formula_ptr mk_implies(formula_ptr l, formula_ptr r);
formula_ptr mk_conj(formula_ptr l, formula_ptr r);
formula_ptr mk_box(formula_ptr b);
formula_ptr mk_dia(formula_ptr b);
formula_ptr mk_diabot();

struct parse_error : std::runtime_error {
  size_t pos;
  parse_error(const std::string& msg, size_t p)
      : std::runtime_error(msg + " at position " + std::to_string(p)), pos(p) {}
};

formula_ptr parse_formula(const std::string& text);
std::string print_formula(const formula_ptr& f);

bool equal(const formula_ptr& f, const formula_ptr& g);

// number of formula-tree nodes (dia bot counts as two: the diamond and its leaf)
int tree_size(const formula_ptr& f);

// ---- formula tree --------------------------------------------------------
// nodes in preorder; node 0 is the root; every later module identifies
// subformula occurrences by these indices

struct tree_node {
  std::string label;            // "->", "/\\", "box", "dia", "bot" or atom name
  int parent = -1;
  std::vector<int> children;
  formula_ptr sub;              // subformula rooted here (null for the bot leaf)
};

struct formula_tree {
  std::vector<tree_node> nodes;
};

formula_tree build_tree(const formula_ptr& f);

// vertices of the arena of the subformula at `node`, i.e. its future
// depth-0 vertices (atoms and modalities reachable going right)
std::vector<int> rightmost_descendants(const formula_tree& t, int node);
// the future depth-1 vertices of the subformula at `node`
std::vector<int> second_rightmost_descendants(const formula_tree& t, int node);

// ---- polarities -----------------------------------------------------------

enum class pol { out, in };  // out = white/conclusion, in = black/hypothesis

inline pol flip(pol p) { return p == pol::out ? pol::in : pol::out; }

struct polarize_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// polarity for each formula-tree node (preorder index), forced from the root;
// throws polarize_error if a dia-bot occurrence would receive out-polarity
std::vector<pol> polarize(const formula_ptr& f, pol root);

// ---- the ~f isomorphism ---------------------------------------------------

// canonical representative modulo commutativity/associativity of /\ and
// currying; two formulas have equal arenas iff their canonical forms match
formula_ptr canonical(const formula_ptr& f);
bool iso_equal(const formula_ptr& f, const formula_ptr& g);

}  // namespace cml
