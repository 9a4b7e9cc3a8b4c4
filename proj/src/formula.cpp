#include "cml/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>

namespace cml {

formula_ptr mk_atom(const std::string& name) {
  return std::make_shared<formula>(formula{fkind::atom, name, nullptr, nullptr});
}
formula_ptr mk_implies(formula_ptr l, formula_ptr r) {
  return std::make_shared<formula>(formula{fkind::implies, "", std::move(l), std::move(r)});
}
formula_ptr mk_conj(formula_ptr l, formula_ptr r) {
  return std::make_shared<formula>(formula{fkind::conj, "", std::move(l), std::move(r)});
}
formula_ptr mk_box(formula_ptr b) {
  return std::make_shared<formula>(formula{fkind::box, "", std::move(b), nullptr});
}
formula_ptr mk_dia(formula_ptr b) {
  return std::make_shared<formula>(formula{fkind::dia, "", std::move(b), nullptr});
}
formula_ptr mk_diabot() {
  return std::make_shared<formula>(formula{fkind::diabot, "", nullptr, nullptr});
}

// ---- lexer / parser -------------------------------------------------------

namespace {

struct token {
  enum kind { ident, arrow, wedge, lpar, rpar, kw_box, kw_dia, kw_bot, end } k;
  std::string text;
  size_t pos;
};

std::vector<token> lex(const std::string& s) {
  std::vector<token> out;
  size_t i = 0;
  auto starts = [&](const char* u) {
    return s.compare(i, std::string(u).size(), u) == 0;
  };
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) { i++; continue; }
    if (starts("->")) { out.push_back({token::arrow, "->", i}); i += 2; continue; }
    if (starts("/\\")) { out.push_back({token::wedge, "/\\", i}); i += 2; continue; }
    if (starts("⊃")) { out.push_back({token::arrow, "->", i}); i += 3; continue; }
    if (starts("∧")) { out.push_back({token::wedge, "/\\", i}); i += 3; continue; }
    if (starts("□")) { out.push_back({token::kw_box, "box", i}); i += 3; continue; }
    if (starts("◇")) { out.push_back({token::kw_dia, "dia", i}); i += 3; continue; }
    if (starts("⊥")) { out.push_back({token::kw_bot, "bot", i}); i += 3; continue; }
    if (c == '(') { out.push_back({token::lpar, "(", i}); i++; continue; }
    if (c == ')') { out.push_back({token::rpar, ")", i}); i++; continue; }
    if (std::isalnum(c)) {
      size_t j = i;
      while (j < s.size() && std::isalnum((unsigned char)s[j])) j++;
      std::string w = s.substr(i, j - i);
      if (w == "box") out.push_back({token::kw_box, w, i});
      else if (w == "dia") out.push_back({token::kw_dia, w, i});
      else if (w == "bot") out.push_back({token::kw_bot, w, i});
      else out.push_back({token::ident, w, i});
      i = j;
      continue;
    }
    throw parse_error("unknown token '" + s.substr(i, 1) + "'", i);
  }
  out.push_back({token::end, "", s.size()});
  return out;
}

struct parser {
  std::vector<token> ts;
  size_t i = 0;

  const token& peek() const { return ts[i]; }
  token next() { return ts[i++]; }
  void expect(token::kind k, const char* what) {
    if (peek().k != k) throw parse_error(std::string("expected ") + what, peek().pos);
    i++;
  }

  // implication: right-associative, lowest precedence
  formula_ptr imp() {
    formula_ptr l = con();
    if (peek().k == token::arrow) {
      next();
      return mk_implies(l, imp());
    }
    return l;
  }

  // conjunction: left-associative
  formula_ptr con() {
    formula_ptr l = un();
    while (peek().k == token::wedge) {
      next();
      l = mk_conj(l, un());
    }
    return l;
  }

  formula_ptr un() {
    const token& t = peek();
    switch (t.k) {
      case token::kw_box:
        next();
        return mk_box(un());
      case token::kw_dia:
        next();
        if (peek().k == token::kw_bot) { next(); return mk_diabot(); }
        return mk_dia(un());
      case token::ident:
        next();
        return mk_atom(t.text);
      case token::lpar: {
        next();
        formula_ptr f = imp();
        expect(token::rpar, "')'");
        return f;
      }
      case token::kw_bot:
        throw parse_error("'bot' is only allowed directly under 'dia'", t.pos);
      default:
        throw parse_error("expected formula", t.pos);
    }
  }
};

void print_rec(std::ostringstream& os, const formula_ptr& f, int ctx) {
  // ctx: minimum precedence the surrounding context requires without parens
  switch (f->kind) {
    case fkind::atom:
      os << f->name;
      break;
    case fkind::diabot:
      os << "dia bot";
      break;
    case fkind::box:
    case fkind::dia:
      os << (f->kind == fkind::box ? "box " : "dia ");
      print_rec(os, f->left, 3);
      break;
    case fkind::conj: {
      bool par = ctx > 2;
      if (par) os << "(";
      print_rec(os, f->left, 2);
      os << " /\\ ";
      print_rec(os, f->right, 3);
      if (par) os << ")";
      break;
    }
    case fkind::implies: {
      bool par = ctx > 1;
      if (par) os << "(";
      print_rec(os, f->left, 2);
      os << " -> ";
      print_rec(os, f->right, 1);
      if (par) os << ")";
      break;
    }
  }
}

}  // namespace

formula_ptr parse_formula(const std::string& text) {
  parser p{lex(text)};
  formula_ptr f = p.imp();
  if (p.peek().k != token::end)
    throw parse_error("trailing input", p.peek().pos);
  return f;
}

std::string print_formula(const formula_ptr& f) {
  std::ostringstream os;
  print_rec(os, f, 0);
  return os.str();
}

bool equal(const formula_ptr& f, const formula_ptr& g) {
  if (f.get() == g.get()) return true;
  if (f->kind != g->kind) return false;
  switch (f->kind) {
    case fkind::atom: return f->name == g->name;
    case fkind::diabot: return true;
    case fkind::box:
    case fkind::dia: return equal(f->left, g->left);
    default: return equal(f->left, g->left) && equal(f->right, g->right);
  }
}

int tree_size(const formula_ptr& f) {
  switch (f->kind) {
    case fkind::atom: return 1;
    case fkind::diabot: return 2;
    case fkind::box:
    case fkind::dia: return 1 + tree_size(f->left);
    default: return 1 + tree_size(f->left) + tree_size(f->right);
  }
}

// ---- formula tree ---------------------------------------------------------

namespace {

int build_rec(formula_tree& t, const formula_ptr& f, int parent) {
  int id = (int)t.nodes.size();
  t.nodes.push_back({});
  t.nodes[id].parent = parent;
  t.nodes[id].sub = f;
  switch (f->kind) {
    case fkind::atom:
      t.nodes[id].label = f->name;
      break;
    case fkind::diabot: {
      t.nodes[id].label = "dia";
      int leaf = (int)t.nodes.size();
      t.nodes.push_back({"bot", id, {}, nullptr});
      t.nodes[id].children = {leaf};
      break;
    }
    case fkind::box:
    case fkind::dia: {
      t.nodes[id].label = f->kind == fkind::box ? "box" : "dia";
      int c = build_rec(t, f->left, id);
      t.nodes[id].children = {c};
      break;
    }
    case fkind::implies:
    case fkind::conj: {
      t.nodes[id].label = f->kind == fkind::implies ? "->" : "/\\";
      int l = build_rec(t, f->left, id);
      int r = build_rec(t, f->right, id);
      t.nodes[id].children = {l, r};
      break;
    }
  }
  return id;
}

bool is_leaf_like(const tree_node& n) {
  // atoms and modalities: the nodes that become arena vertices
  return n.label != "->" && n.label != "/\\" && n.label != "bot";
}

void rightmost_rec(const formula_tree& t, int v, std::vector<int>& out) {
  const tree_node& n = t.nodes[v];
  if (is_leaf_like(n)) out.push_back(v);
  if (n.label == "->") {
    rightmost_rec(t, n.children[1], out);
  } else if (n.label == "/\\") {
    rightmost_rec(t, n.children[0], out);
    rightmost_rec(t, n.children[1], out);
  } else if (n.label == "box" || (n.label == "dia" && n.sub && n.sub->kind != fkind::diabot)) {
    rightmost_rec(t, n.children[0], out);
  }
}

}  // namespace

formula_tree build_tree(const formula_ptr& f) {
  formula_tree t;
  build_rec(t, f, -1);
  return t;
}

std::vector<int> rightmost_descendants(const formula_tree& t, int node) {
  std::vector<int> out;
  rightmost_rec(t, node, out);
  return out;
}

std::vector<int> second_rightmost_descendants(const formula_tree& t, int node) {
  if (t.nodes[node].label != "->") return {};
  return rightmost_descendants(t, t.nodes[node].children[0]);
}

// ---- polarities -----------------------------------------------------------

namespace {

void polarize_rec(const formula_tree& t, int v, pol p, std::vector<pol>& out) {
  out[v] = p;
  const tree_node& n = t.nodes[v];
  if (n.sub && n.sub->kind == fkind::diabot) {
    if (p == pol::out)
      throw polarize_error("dia bot occurrence forced to out-polarity");
    out[n.children[0]] = p;
    return;
  }
  if (n.label == "->") {
    polarize_rec(t, n.children[0], flip(p), out);
    polarize_rec(t, n.children[1], p, out);
  } else {
    for (int c : n.children) polarize_rec(t, c, p, out);
  }
}

}  // namespace

std::vector<pol> polarize(const formula_ptr& f, pol root) {
  formula_tree t = build_tree(f);
  std::vector<pol> out(t.nodes.size(), root);
  polarize_rec(t, 0, root, out);
  return out;
}

// ---- canonical form for ~f ------------------------------------------------

namespace {

void conjuncts_of(const formula_ptr& f, std::vector<formula_ptr>& out) {
  if (f->kind == fkind::conj) {
    conjuncts_of(f->left, out);
    conjuncts_of(f->right, out);
  } else {
    out.push_back(f);
  }
}

formula_ptr rebuild_sorted_conj(std::vector<formula_ptr> parts) {
  std::sort(parts.begin(), parts.end(), [](const formula_ptr& a, const formula_ptr& b) {
    return print_formula(a) < print_formula(b);
  });
  formula_ptr acc = parts[0];
  for (size_t i = 1; i < parts.size(); i++) acc = mk_conj(acc, parts[i]);
  return acc;
}

}  // namespace

formula_ptr canonical(const formula_ptr& f) {
  switch (f->kind) {
    case fkind::atom:
    case fkind::diabot:
      return f;
    case fkind::box:
      return mk_box(canonical(f->left));
    case fkind::dia:
      return mk_dia(canonical(f->left));
    case fkind::conj: {
      std::vector<formula_ptr> parts;
      conjuncts_of(mk_conj(canonical(f->left), canonical(f->right)), parts);
      return rebuild_sorted_conj(parts);
    }
    case fkind::implies: {
      // gather all premises along the curried spine, splitting conjunctions:
      // (A /\ B) -> C, A -> (B -> C) and reorderings share one normal form
      std::vector<formula_ptr> premises;
      formula_ptr cur = f;
      while (cur->kind == fkind::implies) {
        conjuncts_of(canonical(cur->left), premises);
        cur = cur->right;
      }
      formula_ptr core = canonical(cur);
      std::sort(premises.begin(), premises.end(),
                [](const formula_ptr& a, const formula_ptr& b) {
                  return print_formula(a) < print_formula(b);
                });
      formula_ptr acc = core;
      for (auto it = premises.rbegin(); it != premises.rend(); ++it)
        acc = mk_implies(*it, acc);
      return acc;
    }
  }
  return f;
}

bool iso_equal(const formula_ptr& f, const formula_ptr& g) {
  return equal(canonical(f), canonical(g));
}

}  // namespace cml
