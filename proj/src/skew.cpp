#include "cml/skew.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace cml {

namespace {

// all-pairs meeting category: 0 = disjunct (even meeting depth), 1 = strictly
// conjunct (odd meeting depth), 2 = no meeting point; diagonal unused
struct conj_table {
  std::vector<int> ids;
  std::map<int, int> idx;
  std::vector<std::vector<char>> cat;

  explicit conj_table(const modal_arena& a) {
    ids = a.vertices();
    int n = (int)ids.size();
    for (int i = 0; i < n; ++i) idx[ids[i]] = i;
    int words = (n + 63) / 64;
    std::vector<std::vector<uint64_t>> reach(n, std::vector<uint64_t>(words, 0));
    std::vector<std::vector<int>> succ(n);
    for (auto& e : a.iedges) succ[idx.at(e.first)].push_back(idx.at(e.second));
    // reflexive ⊸* by memoised DFS (⊸ is acyclic in a modal arena)
    std::vector<char> ready(n, 0);
    std::function<void(int)> go = [&](int i) {
      if (ready[i]) return;
      ready[i] = 1;
      reach[i][i / 64] |= 1ull << (i % 64);
      for (int j : succ[i]) {
        go(j);
        for (int k = 0; k < words; ++k) reach[i][k] |= reach[j][k];
      }
    };
    for (int i = 0; i < n; ++i) go(i);
    std::vector<int> rsize(n), depth(n);
    auto info = vertex_info(a);
    for (int i = 0; i < n; ++i) {
      int c = 0;
      for (int k = 0; k < words; ++k) c += std::popcount(reach[i][k]);
      rsize[i] = c;
      depth[i] = info.at(ids[i]).depth;
    }
    cat.assign(n, std::vector<char>(n, 2));
    std::vector<uint64_t> common(words);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int c = 0;
        for (int k = 0; k < words; ++k) {
          common[k] = reach[i][k] & reach[j][k];
          c += std::popcount(common[k]);
        }
        // meeting depth: depth of the deepest common descendants, i.e. those
        // not ⊸*-below any other common descendant
        int md = -1;
        if (c > 0)
          for (int k = 0; k < words; ++k)
            for (uint64_t b = common[k]; b; b &= b - 1) {
              int u = k * 64 + std::countr_zero(b);
              bool inner = false;
              for (int k2 = 0; k2 < words && !inner; ++k2)
                for (uint64_t b2 = common[k2]; b2; b2 &= b2 - 1) {
                  int x = k2 * 64 + std::countr_zero(b2);
                  if (x != u && (reach[x][u / 64] >> (u % 64)) & 1) {
                    inner = true;
                    break;
                  }
                }
              if (!inner && depth[u] > md) md = depth[u];
            }
        cat[i][j] = cat[j][i] = md == -1 ? 2 : (char)(md % 2);
      }
  }

  char operator()(int v, int w) const { return cat[idx.at(v)][idx.at(w)]; }
};

std::vector<std::set<int>> components(const modal_arena& a, const std::set<int>& vs) {
  std::map<int, std::vector<int>> adj;
  auto link = [&](int v, int w) {
    if (vs.count(v) && vs.count(w)) { adj[v].push_back(w); adj[w].push_back(v); }
  };
  for (auto& e : a.iedges) link(e.first, e.second);
  for (auto& e : a.medges) link(e.first, e.second);
  std::vector<std::set<int>> out;
  std::set<int> seen;
  for (int v : vs) {
    if (seen.count(v)) continue;
    std::set<int> comp;
    std::vector<int> stack{v};
    seen.insert(v);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      comp.insert(x);
      for (int y : adj[x])
        if (seen.insert(y).second) stack.push_back(y);
    }
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

skew_map identity_map(const modal_arena& a) {
  skew_map m{a, a, {}};
  for (int v : a.vertices()) m.assign[v] = v;
  return m;
}

skew_report check_fibration(const skew_map& m, const std::string& kind) {
  if (kind != "even" && kind != "odd")
    throw std::runtime_error("unknown fibration kind " + kind);
  bool even = kind == "even";
  skew_report r;
  auto fail = [&](std::string c, std::vector<int> w, std::string d) {
    r.ok = false;
    r.clause = std::move(c);
    r.witness = std::move(w);
    r.detail = std::move(d);
    return r;
  };
  auto tr = is_modal_arena(m.target);
  if (!tr.ok) return fail("arena", tr.witness, "target: " + tr.violation);
  if (m.source.labels.empty()) {
    if (even) return fail("empty", {}, "the empty map is only an odd fibration");
    if (!m.assign.empty())
      return fail("assignment", {}, "assignment entries on the empty source");
    return r;
  }
  auto sr = is_modal_arena(m.source);
  if (!sr.ok) return fail("arena", sr.witness, "source: " + sr.violation);
  auto sv = m.source.vertices();
  for (int v : sv) {
    auto it = m.assign.find(v);
    if (it == m.assign.end())
      return fail("assignment", {v}, "unassigned source vertex");
    if (!m.target.has(it->second))
      return fail("assignment", {v, it->second}, "image is not a target vertex");
  }
  for (auto& [v, w] : m.assign)
    if (!m.source.has(v))
      return fail("assignment", {v, w}, "entry on a non-vertex of the source");
  auto f = [&](int v) { return m.assign.at(v); };
  auto si = vertex_info(m.source);
  auto ti = vertex_info(m.target);
  for (int v : sv) {
    if (m.source.labels.at(v) != m.target.labels.at(f(v)))
      return fail("label", {v, f(v)}, "label changes across the map");
    if (si.at(v).depth != ti.at(f(v)).depth)
      return fail("depth", {v, f(v)},
                  "depth " + std::to_string(si.at(v).depth) + " maps to depth " +
                      std::to_string(ti.at(f(v)).depth));
  }
  for (auto& e : m.source.iedges)
    if (!m.target.ie(f(e.first), f(e.second)))
      return fail("iedge", {e.first, e.second}, "⊸-edge not preserved");
  for (auto& e : m.source.medges)
    if (!m.target.me(f(e.first), f(e.second)))
      return fail("medge", {e.first, e.second}, "↝-edge not preserved");
  // whenever f(v) ↝ f(u) in the target, some w ↝ u in the source maps onto f(v)
  for (int v : sv)
    for (int u : sv) {
      if (!m.target.me(f(v), f(u))) continue;
      bool wit = false;
      for (int w : sv)
        if (m.source.me(w, u) && f(w) == f(v)) { wit = true; break; }
      if (!wit)
        return fail("modal", {v, u},
                    "no ↝-predecessor of " + std::to_string(u) + " above " +
                        std::to_string(f(v)));
    }
  conj_table cs(m.source), ct(m.target);
  auto tv = m.target.vertices();
  // ⌢ includes pairs with no meeting point (their depth -1 counts as odd);
  // the lifting escape only demands the witness image avoid strict ⌢ (an
  // actual odd meeting point); coinciding vertices are in neither relation
  auto sconj = [&](int a, int b) { return cs(a, b) != 0; };
  auto sdisj = [&](int a, int b) { return cs(a, b) == 0; };
  auto tdisj = [&](int a, int b) { return a != b && ct(a, b) == 0; };
  auto tconj = [&](int a, int b) { return a != b && ct(a, b) != 0; };
  auto tconj_strict = [&](int a, int b) { return a != b && ct(a, b) == 1; };
  for (size_t i = 0; i < sv.size(); ++i)
    for (size_t j = i + 1; j < sv.size(); ++j) {
      int v = sv[i], w = sv[j];
      if (even) {
        // only strict ⌢ constrains the images: meeting-point-free pairs may
        // fold onto one vertex or drift to a meeting-point-free image pair
        if (cs(v, w) == 1 && tdisj(f(v), f(w)))
          return fail("conjunct", {v, w}, "v ⌢ w but f(v) ⌣ f(w)");
      } else {
        if (sdisj(v, w) && f(v) != f(w) && !tdisj(f(v), f(w)))
          return fail("disjunct", {v, w}, "v ⌣ w but f(v) ⌢ f(w)");
      }
    }
  for (int v : sv)
    for (int w : tv) {
      bool trigger = even ? tconj(f(v), w) : tdisj(f(v), w);
      if (!trigger) continue;
      bool ok2 = false;
      for (int u : sv) {
        if (u == v) continue;
        bool rel = even ? sconj(v, u) : sdisj(v, u);
        bool escaped = even ? !tconj_strict(f(u), w) : !tdisj(f(u), w);
        if (rel && escaped) { ok2 = true; break; }
      }
      if (!ok2)
        return fail("lifting", {v, w},
                    even ? "f(v) ⌢ w has no lifting" : "f(v) ⌣ w has no lifting");
    }
  return r;
}

skew_map compose(const skew_map& f, const skew_map& g) {
  if (!(f.target == g.source))
    throw std::runtime_error("compose: middle arenas differ");
  skew_map h{f.source, g.target, {}};
  for (auto& [v, w] : f.assign) h.assign[v] = g.assign.at(w);
  return h;
}

// ---- fibration of a deep-rule chain ---------------------------------------

namespace {

// premise and conclusion subtrees are identical; record the vertex map,
// advancing both preorder counters
void walk_ident(const formula_ptr& f, int& ip, int& ic, std::map<int, int>& as) {
  switch (f->kind) {
    case fkind::atom:
      as[ip++] = ic++;
      break;
    case fkind::implies:
    case fkind::conj:
      ++ip;
      ++ic;
      walk_ident(f->left, ip, ic, as);
      walk_ident(f->right, ip, ic, as);
      break;
    case fkind::box:
    case fkind::dia:
      as[ip] = ic;
      ++ip;
      ++ic;
      walk_ident(f->left, ip, ic, as);
      break;
    case fkind::diabot:
      as[ip] = ic;
      ip += 2;
      ic += 2;
      break;
  }
}

void walk_step(const formula_ptr& p, const formula_ptr& c, int& ip, int& ic,
               const std::vector<int>& steps, size_t k, const std::string& rule,
               std::map<int, int>& as) {
  if (k == steps.size()) {
    if (rule == "deep_w_conj") {
      ++ic;
      if (equal(p, c->left)) {
        walk_ident(p, ip, ic, as);
        ic += tree_size(c->right);
      } else {
        ic += tree_size(c->left);
        walk_ident(p, ip, ic, as);
      }
    } else if (rule == "deep_w_imp") {
      ++ic;
      ic += tree_size(c->left);
      walk_ident(p, ip, ic, as);
    } else if (rule == "deep_w_dia") {
      as[ip] = ic;
      ip += 2;
      ic += tree_size(c);
    } else if (rule == "deep_c") {
      ++ip;
      int ic0 = ic;
      walk_ident(p->left, ip, ic, as);
      ic = ic0;
      walk_ident(p->right, ip, ic, as);
    } else {
      throw std::runtime_error("unexpected rule in chain: " + rule);
    }
    return;
  }
  switch (c->kind) {
    case fkind::implies:
    case fkind::conj:
      ++ip;
      ++ic;
      if (steps[k] == 0) {
        walk_step(p->left, c->left, ip, ic, steps, k + 1, rule, as);
        walk_ident(p->right, ip, ic, as);
      } else {
        walk_ident(p->left, ip, ic, as);
        walk_step(p->right, c->right, ip, ic, steps, k + 1, rule, as);
      }
      break;
    case fkind::box:
    case fkind::dia:
      as[ip] = ic;
      ++ip;
      ++ic;
      walk_step(p->left, c->left, ip, ic, steps, k + 1, rule, as);
      break;
    default:
      throw std::runtime_error("context path leaves the formula");
  }
}

}  // namespace

skew_map fibration_of_derivation(const derivation_ptr& d) {
  auto rep = check_derivation(d, "downLJ");
  if (!rep.ok)
    throw std::runtime_error("not a downLJ chain: " + rep.error);
  std::vector<derivation_ptr> chain;
  for (auto n = d; n; n = n->premises.empty() ? nullptr : n->premises[0])
    chain.push_back(n);
  if (chain.back()->rule != "hyp")
    throw std::runtime_error("chain is not topped by a hyp node");
  skew_map f = identity_map(arena_of(chain.back()->concl.goal));
  for (size_t i = chain.size() - 1; i-- > 0;) {
    auto& n = chain[i];
    const formula_ptr& prem = n->premises[0]->concl.goal;
    const formula_ptr& conc = n->concl.goal;
    if (n->context_path.empty() || n->context_path[0] != -1)
      throw std::runtime_error("deep rule not applied to the goal");
    std::vector<int> steps(n->context_path.begin() + 1, n->context_path.end());
    std::map<int, int> as;
    int ip = 0, ic = 0;
    walk_step(prem, conc, ip, ic, steps, 0, n->rule, as);
    f = compose(f, skew_map{arena_of(prem), arena_of(conc), std::move(as)});
  }
  return f;
}

// ---- decomposition ---------------------------------------------------------

namespace {

struct tgt_node {
  formula_ptr f;
  std::set<int> verts;  // original target vertex ids in this subtree
  int self = -1;        // own vertex id when the root node is a vertex
  std::unique_ptr<tgt_node> l, r;
};

std::unique_ptr<tgt_node> build_tgt(const formula_ptr& f, int& pre,
                                    const std::map<int, int>& orig_at) {
  auto n = std::make_unique<tgt_node>();
  n->f = f;
  switch (f->kind) {
    case fkind::atom:
      n->self = orig_at.at(pre++);
      n->verts.insert(n->self);
      break;
    case fkind::implies:
    case fkind::conj:
      ++pre;
      n->l = build_tgt(f->left, pre, orig_at);
      n->r = build_tgt(f->right, pre, orig_at);
      n->verts = n->l->verts;
      n->verts.insert(n->r->verts.begin(), n->r->verts.end());
      break;
    case fkind::box:
    case fkind::dia:
      n->self = orig_at.at(pre++);
      n->l = build_tgt(f->left, pre, orig_at);
      n->verts = n->l->verts;
      n->verts.insert(n->self);
      break;
    case fkind::diabot:
      n->self = orig_at.at(pre);
      pre += 2;
      n->verts.insert(n->self);
      break;
  }
  return n;
}

struct dnode {
  std::string op;  // id | empty | sum | imp | mod | pair
  const tgt_node* t = nullptr;
  std::vector<std::unique_ptr<dnode>> kids;
  formula_ptr src;  // source subformula built for this part (null for empty)
};

using dptr = std::unique_ptr<dnode>;

[[noreturn]] void stuck(const std::string& why) {
  throw std::runtime_error("non-decomposable map: " + why);
}

struct decomposer {
  const skew_map& m;

  std::set<int> pre(const std::set<int>& src, const std::set<int>& tv) const {
    std::set<int> r;
    for (int v : src)
      if (tv.count(m.assign.at(v))) r.insert(v);
    return r;
  }

  bool bijection(const std::set<int>& src, const tgt_node* t) const {
    if (src.size() != t->verts.size()) return false;
    std::set<int> img;
    for (int v : src) img.insert(m.assign.at(v));
    return img == t->verts;
  }

  // unique source vertex mapped onto the modality t->self
  int apex(const std::set<int>& src, const tgt_node* t) const {
    int w = -1;
    for (int v : src)
      if (m.assign.at(v) == t->self) {
        if (w != -1) stuck("two vertices over one modality in one component");
        w = v;
      }
    if (w == -1) stuck("no vertex over a target modality");
    return w;
  }

  dptr leaf(const std::string& op, const tgt_node* t, formula_ptr src) const {
    auto n = std::make_unique<dnode>();
    n->op = op;
    n->t = t;
    n->src = std::move(src);
    return n;
  }

  dptr node(const std::string& op, const tgt_node* t, dptr a, dptr b,
            formula_ptr src) const {
    auto n = std::make_unique<dnode>();
    n->op = op;
    n->t = t;
    n->kids.push_back(std::move(a));
    if (b) n->kids.push_back(std::move(b));
    n->src = std::move(src);
    return n;
  }

  dptr even(const std::set<int>& src, const tgt_node* t) const {
    if (src.empty()) stuck("empty source at an even position");
    if (bijection(src, t)) return leaf("id", t, t->f);
    switch (t->f->kind) {
      case fkind::conj: {
        auto v1 = pre(src, t->l->verts), v2 = pre(src, t->r->verts);
        if (v1.empty() || v2.empty()) stuck("even sum part with empty preimage");
        auto a = even(v1, t->l.get()), b = even(v2, t->r.get());
        auto f = mk_conj(a->src, b->src);
        return node("sum", t, std::move(a), std::move(b), f);
      }
      case fkind::implies: {
        auto v1 = pre(src, t->l->verts), v2 = pre(src, t->r->verts);
        if (v1.empty()) {
          auto a = leaf("empty", t->l.get(), nullptr);
          auto b = even(v2, t->r.get());
          auto f = b->src;
          return node("imp", t, std::move(a), std::move(b), f);
        }
        auto a = odd(v1, t->l.get()), b = even(v2, t->r.get());
        auto f = mk_implies(a->src, b->src);
        return node("imp", t, std::move(a), std::move(b), f);
      }
      case fkind::box:
      case fkind::dia: {
        int w = apex(src, t);
        std::set<int> rest = src;
        rest.erase(w);
        if (rest.empty()) stuck("even modality with empty cone");
        auto a = even(rest, t->l.get());
        auto f = t->f->kind == fkind::box ? mk_box(a->src) : mk_dia(a->src);
        return node("mod", t, std::move(a), nullptr, f);
      }
      default:
        stuck("several vertices over a single target vertex");
    }
  }

  dptr odd(const std::set<int>& src, const tgt_node* t) const {
    if (src.empty()) return leaf("empty", t, nullptr);
    if (bijection(src, t)) return leaf("id", t, t->f);
    if (t->f->kind == fkind::conj) {
      auto v1 = pre(src, t->l->verts), v2 = pre(src, t->r->verts);
      auto a = odd(v1, t->l.get()), b = odd(v2, t->r.get());
      formula_ptr f = a->src && b->src ? mk_conj(a->src, b->src)
                                       : (a->src ? a->src : b->src);
      return node("sum", t, std::move(a), std::move(b), f);
    }
    auto cs = components(m.source, src);
    if (cs.size() >= 2) {
      // pair the component holding the smallest vertex against the rest
      size_t best = 0;
      for (size_t i = 1; i < cs.size(); ++i)
        if (*cs[i].begin() < *cs[best].begin()) best = i;
      std::set<int> rest;
      for (size_t i = 0; i < cs.size(); ++i)
        if (i != best) rest.insert(cs[i].begin(), cs[i].end());
      auto a = odd(cs[best], t), b = odd(rest, t);
      auto f = mk_conj(a->src, b->src);
      return node("pair", t, std::move(a), std::move(b), f);
    }
    switch (t->f->kind) {
      case fkind::implies: {
        auto v1 = pre(src, t->l->verts), v2 = pre(src, t->r->verts);
        if (v1.empty()) stuck("odd map missing the implication premise");
        auto a = even(v1, t->l.get()), b = odd(v2, t->r.get());
        auto f = mk_implies(a->src, b->src);
        return node("imp", t, std::move(a), std::move(b), f);
      }
      case fkind::box:
      case fkind::dia: {
        int w = apex(src, t);
        std::set<int> rest = src;
        rest.erase(w);
        if (rest.empty()) {
          if (m.source.labels.at(w) != "dia")
            stuck("box with empty cone in the source");
          auto a = leaf("empty", t->l.get(), nullptr);
          return node("mod", t, std::move(a), nullptr, mk_diabot());
        }
        auto a = odd(rest, t->l.get());
        auto f = t->f->kind == fkind::box ? mk_box(a->src) : mk_dia(a->src);
        return node("mod", t, std::move(a), nullptr, f);
      }
      default:
        stuck("several vertices over a single target vertex in one component");
    }
  }
};

formula_ptr replace_at(const formula_ptr& f, const std::vector<int>& path,
                       size_t k, const formula_ptr& sub) {
  if (k == path.size()) return sub;
  if (path[k] == 0) {
    switch (f->kind) {
      case fkind::implies:
        return mk_implies(replace_at(f->left, path, k + 1, sub), f->right);
      case fkind::conj:
        return mk_conj(replace_at(f->left, path, k + 1, sub), f->right);
      case fkind::box:
        return mk_box(replace_at(f->left, path, k + 1, sub));
      case fkind::dia:
        return mk_dia(replace_at(f->left, path, k + 1, sub));
      default:
        break;
    }
  } else if (path[k] == 1 &&
             (f->kind == fkind::implies || f->kind == fkind::conj)) {
    auto r = replace_at(f->right, path, k + 1, sub);
    return f->kind == fkind::implies ? mk_implies(f->left, r)
                                     : mk_conj(f->left, r);
  }
  throw std::runtime_error("replace_at: path leaves the formula");
}

struct emitter {
  formula_ptr cur;
  struct entry {
    std::string rule;
    std::vector<int> path;
    formula_ptr after;
  };
  std::vector<entry> out;

  void push(const std::string& rule, const std::vector<int>& path,
            const formula_ptr& repl) {
    cur = replace_at(cur, path, 0, repl);
    out.push_back({rule, path, cur});
  }

  void emit(const dnode* n, std::vector<int>& path) {
    if (n->op == "id" || n->op == "empty") return;
    auto child = [&](const dnode* k, int step) {
      path.push_back(step);
      emit(k, path);
      path.pop_back();
    };
    if (n->op == "sum") {
      const dnode *a = n->kids[0].get(), *b = n->kids[1].get();
      if (a->op == "empty") {
        emit(b, path);
        push("deep_w_conj", path, n->t->f);
      } else if (b->op == "empty") {
        emit(a, path);
        push("deep_w_conj", path, n->t->f);
      } else {
        child(a, 0);
        child(b, 1);
      }
    } else if (n->op == "imp") {
      if (n->kids[0]->op == "empty") {
        emit(n->kids[1].get(), path);
        push("deep_w_imp", path, n->t->f);
      } else {
        child(n->kids[0].get(), 0);
        child(n->kids[1].get(), 1);
      }
    } else if (n->op == "mod") {
      if (n->kids[0]->op == "empty")
        push("deep_w_dia", path, n->t->f);
      else
        child(n->kids[0].get(), 0);
    } else if (n->op == "pair") {
      child(n->kids[0].get(), 0);
      child(n->kids[1].get(), 1);
      push("deep_c", path, n->t->f);
    }
  }
};

gen_ptr to_gen(const dnode* n) {
  auto g = std::make_shared<gen_tree>();
  g->op = n->op;
  for (auto& k : n->kids) g->kids.push_back(to_gen(k.get()));
  return g;
}

}  // namespace

skew_decomposition decompose_fibration(const skew_map& m) {
  auto rep = check_fibration(m, "even");
  if (!rep.ok)
    throw std::runtime_error("not an even skew fibration: " + rep.clause +
                             " (" + rep.detail + ")");
  auto fr = formula_of(m.target);
  std::map<int, int> orig_at;
  for (auto& [o, p] : fr.to_preorder) orig_at[p] = o;
  int pre = 0;
  auto troot = build_tgt(fr.f, pre, orig_at);
  decomposer dec{m};
  std::set<int> all;
  for (int v : m.source.vertices()) all.insert(v);
  auto root = dec.even(all, troot.get());
  emitter em;
  em.cur = root->src;
  std::vector<int> path;
  em.emit(root.get(), path);
  if (!equal(em.cur, fr.f))
    throw std::runtime_error("decomposition does not rebuild the target");
  derivation_ptr down = mk_deriv("hyp", sequent{{}, root->src});
  for (auto& e : em.out) {
    std::vector<int> cp{-1};
    cp.insert(cp.end(), e.path.begin(), e.path.end());
    down = mk_deriv(e.rule, sequent{{}, e.after}, {down}, cp);
  }
  return {to_gen(root.get()), down};
}

// ---- equivalence up to renaming --------------------------------------------

namespace {

bool iso_search(const modal_arena& a, const modal_arena& b,
                const std::function<bool(int, int)>& cand,
                const std::function<bool(const std::map<int, int>&)>& done) {
  auto va = a.vertices(), vb = b.vertices();
  if (va.size() != vb.size()) return false;
  std::map<int, int> sigma;
  std::set<int> used;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == va.size()) return done(sigma);
    int v = va[i];
    for (int w : vb) {
      if (used.count(w)) continue;
      if (a.labels.at(v) != b.labels.at(w)) continue;
      if (cand && !cand(v, w)) continue;
      bool fit = true;
      for (auto& [x, y] : sigma) {
        if (a.ie(v, x) != b.ie(w, y) || a.ie(x, v) != b.ie(y, w) ||
            a.me(v, x) != b.me(w, y) || a.me(x, v) != b.me(y, w)) {
          fit = false;
          break;
        }
      }
      if (!fit) continue;
      sigma[v] = w;
      used.insert(w);
      if (go(i + 1)) return true;
      sigma.erase(v);
      used.erase(w);
    }
    return false;
  };
  return go(0);
}

}  // namespace

bool skew_equivalent(const skew_map& a, const skew_map& b) {
  if (a.source.labels.size() != b.source.labels.size()) return false;
  return iso_search(
      a.target, b.target, nullptr, [&](const std::map<int, int>& st) {
        return iso_search(
            a.source, b.source,
            [&](int v, int w) {
              return b.assign.at(w) == st.at(a.assign.at(v));
            },
            [](const std::map<int, int>&) { return true; });
      });
}

}  // namespace cml
