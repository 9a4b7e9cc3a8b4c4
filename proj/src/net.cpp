#include "cml/net.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace cml {

namespace {

// nullopt when the partition is well formed, otherwise a not-linked report
std::optional<net_report> linked_violation(const arena_net& p,
                                           const std::map<int, vertex_data>& info) {
  std::map<int, int> seen;
  for (const auto& c : p.classes) {
    if (c.empty())
      return net_report{false, "not-linked", {}, "empty axiom class"};
    int evens = 0;
    bool modal = p.arena.modal(c[0]);
    for (int v : c) {
      if (!p.arena.has(v))
        return net_report{false, "not-linked", {v}, "class mentions an unknown vertex"};
      seen[v]++;
      if (p.arena.modal(v) != modal)
        return net_report{false, "not-linked", c, "class mixes atoms and modalities"};
      if (info.at(v).even) evens++;
    }
    if (evens != 1)
      return net_report{false, "not-linked", c,
                        "class needs exactly one even vertex, got " + std::to_string(evens)};
    if (!modal) {
      if (c.size() != 2)
        return net_report{false, "not-linked", c, "atomic class is not a pair"};
      if (p.arena.labels.at(c[0]) != p.arena.labels.at(c[1]))
        return net_report{false, "not-linked", c, "atomic class pairs different atoms"};
    }
  }
  for (int v : p.arena.vertices()) {
    auto it = seen.find(v);
    if (it == seen.end())
      return net_report{false, "not-linked", {v}, "vertex missing from the partition"};
    if (it->second != 1)
      return net_report{false, "not-linked", {v}, "vertex occurs in several classes"};
  }
  return std::nullopt;
}

linking build_linking(const arena_net& p, const std::map<int, vertex_data>& info) {
  linking l;
  for (auto [v, w] : p.arena.iedges)
    if (!info.at(w).even && !is_chord(p.arena, v, w)) l.oedges.insert({v, w});
  for (const auto& [v, d] : info) {
    int m = d.pmv;
    // only the ⊸-roots of the body of m are related to m
    if (m != v && p.arena.medges.count({m, v}) && (d.even || !info.at(m).even))
      l.omedges.insert({v, m});
  }
  for (const auto& c : p.classes) {
    int w = -1;
    for (int v : c)
      if (info.at(v).even) w = v;
    for (int v : c)
      if (v != w) l.axlinks.insert({v, w});
  }
  return l;
}

struct lam_graph {
  std::map<int, std::vector<int>> out, in;
  std::set<int> roots;  // iroots ∩ mroots
  std::set<int> sub;    // co-reachable to roots
};

// Λ_c: axlinks whose source has a non-empty cone do not occur on checked paths
lam_graph checked_graph(const arena_net& p, const linking& l,
                        const std::map<int, vertex_data>& info) {
  lam_graph g;
  auto add = [&](int v, int w) {
    g.out[v].push_back(w);
    g.in[w].push_back(v);
  };
  for (auto [v, w] : l.oedges) add(v, w);
  for (auto [v, w] : l.omedges) add(v, w);
  for (auto [v, w] : l.axlinks)
    if (info.at(v).cone.empty()) add(v, w);
  auto ir = iroots(p.arena);
  auto mr = mroots(p.arena);
  for (int v : ir)
    if (mr.count(v)) g.roots.insert(v);
  std::deque<int> q(g.roots.begin(), g.roots.end());
  g.sub.insert(g.roots.begin(), g.roots.end());
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int u : g.in[v])
      if (g.sub.insert(u).second) q.push_back(u);
  }
  return g;
}

// cycle among the co-reachable vertices, if any
std::optional<std::vector<int>> find_cycle(const lam_graph& g) {
  std::map<int, int> color;  // 0 new, 1 open, 2 done
  std::vector<int> stack;
  std::optional<std::vector<int>> cycle;
  std::function<bool(int)> dfs = [&](int v) {
    color[v] = 1;
    stack.push_back(v);
    for (int u : g.out.count(v) ? g.out.at(v) : std::vector<int>{}) {
      if (!g.sub.count(u)) continue;
      if (color[u] == 1) {
        auto it = std::find(stack.begin(), stack.end(), u);
        cycle = std::vector<int>(it, stack.end());
        return true;
      }
      if (color[u] == 0 && dfs(u)) return true;
    }
    stack.pop_back();
    color[v] = 2;
    return false;
  };
  for (int v : g.sub)
    if (color[v] == 0 && dfs(v)) break;
  return cycle;
}

// a root reachable from v while avoiding every even w with v ⊸ w, if any
std::optional<int> functional_violation(const arena_net& p, const lam_graph& g,
                                        const std::map<int, vertex_data>& info, int v) {
  std::set<int> avoid;
  for (auto [x, w] : p.arena.iedges)
    if (x == v && info.at(w).even) avoid.insert(w);
  std::set<int> vis{v};
  std::deque<int> q{v};
  while (!q.empty()) {
    int x = q.front();
    q.pop_front();
    if (x != v && g.roots.count(x)) return x;
    if (!g.out.count(x)) continue;
    for (int u : g.out.at(x)) {
      if (!g.sub.count(u) || avoid.count(u)) continue;
      if (vis.insert(u).second) q.push_back(u);
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_chord(const modal_arena& a, int v, int w) {
  for (int u : a.vertices()) {
    if (a.ie(v, u) && a.me(u, w)) return true;
    if (a.ie(u, w) && a.me(u, v)) return true;
  }
  return false;
}

linking linking_of(const arena_net& p) {
  auto rep = is_modal_arena(p.arena);
  if (!rep.ok) throw std::runtime_error("linking_of: not a modal arena: " + rep.violation);
  auto info = vertex_info(p.arena);
  if (auto bad = linked_violation(p, info))
    throw std::runtime_error("linking_of: " + bad->detail);
  return build_linking(p, info);
}

net_report check_net(const arena_net& p, const std::string& logic) {
  if (logic != "CK" && logic != "CD")
    throw std::invalid_argument("check_net: unknown logic " + logic);
  auto ar = is_modal_arena(p.arena);
  if (!ar.ok)
    return {false, "arena", ar.witness, ar.violation + (ar.detail.empty() ? "" : ": " + ar.detail)};
  auto info = vertex_info(p.arena);
  if (auto bad = linked_violation(p, info)) return *bad;

  auto l = build_linking(p, info);
  auto g = checked_graph(p, l, info);

  if (auto cyc = find_cycle(g))
    return {false, "acyclic", *cyc, "checked paths contain a cycle"};

  for (int v : g.sub) {
    if (info.at(v).even) continue;
    if (auto r = functional_violation(p, g, info, v))
      return {false, "functional", {v, *r},
              "a checked path from " + std::to_string(v) + " reaches root " +
                  std::to_string(*r) + " without crossing an implication target"};
  }

  // class index per vertex
  std::map<int, int> cls;
  for (size_t i = 0; i < p.classes.size(); ++i)
    for (int v : p.classes[i]) cls[v] = (int)i;

  // functorial: a cone member's partner must lie in the cone of a partner
  // modality
  for (const auto& [m, d] : info) {
    if (d.cone.empty()) continue;
    for (int x : d.cone) {
      for (int x2 : p.classes[cls.at(x)]) {
        if (x2 == x) continue;
        bool ok = false;
        for (int m2 : p.classes[cls.at(m)])
          if (info.at(m2).cone.count(x2)) ok = true;
        if (!ok)
          return {false, "functorial", {m, x, x2},
                  "vertex " + std::to_string(x2) + " is linked to " + std::to_string(x) +
                      " but no modality linked to " + std::to_string(m) + " covers it"};
      }
    }
  }

  for (int v : p.arena.vertices()) {
    if (!p.arena.modal(v) || !info.at(v).cone.empty()) continue;
    if (logic == "CD")
      return {false, "non-empty", {v}, "empty modality"};
    if (p.arena.labels.at(v) != "dia" || info.at(v).even)
      return {false, "non-empty", {v}, "only an odd dia may be an empty modality"};
  }

  for (const auto& c : p.classes) {
    if (!p.arena.modal(c[0])) continue;
    int w = -1, odd_dias = 0;
    bool all_box = true;
    for (int v : c) {
      if (info.at(v).even)
        w = v;
      else if (p.arena.labels.at(v) == "dia")
        odd_dias++;
      if (p.arena.labels.at(v) == "dia") all_box = false;
    }
    if (all_box) continue;
    bool w_dia = p.arena.labels.at(w) == "dia";
    if (logic == "CK") {
      if (!(w_dia && odd_dias == 1))
        return {false, "CK-correct", c,
                "modal class must be all box or pair one odd dia with an even dia"};
    } else {
      if (!(w_dia && odd_dias <= 1))
        return {false, "CD-correct", c,
                "modal class must be all box or an even dia with at most one odd dia"};
    }
  }

  return {};
}

// ---------------------------------------------------------------------------
// net_of_proof

namespace {

struct tokf {
  formula_ptr f;
  std::vector<int> toks;  // one token per arena vertex, in ascending preorder
};

struct tokseq {
  std::vector<tokf> hyps;
  tokf goal;
};

struct net_builder {
  std::vector<int> uf;
  int fresh() {
    uf.push_back((int)uf.size());
    return (int)uf.size() - 1;
  }
  int find(int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  }
  void unite(int a, int b) { uf[find(a)] = find(b); }
};

std::vector<int> cat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// greedy per-formula matching of `need` into the unused part of `pool`
std::optional<std::vector<int>> match_pool(const std::vector<formula_ptr>& need,
                                           const std::vector<tokf>& pool,
                                           const std::vector<char>& used) {
  std::map<std::string, std::vector<int>> avail;
  for (int i = (int)pool.size() - 1; i >= 0; --i)
    if (!used[i]) avail[print_formula(pool[i].f)].push_back(i);
  std::vector<int> out;
  for (const auto& f : need) {
    auto& v = avail[print_formula(f)];
    if (v.empty()) return std::nullopt;
    out.push_back(v.back());
    v.pop_back();
  }
  return out;
}

[[noreturn]] void bad(const derivation_ptr& d, const std::string& why) {
  throw std::runtime_error("net_of_proof: " + why + " at " + print_sequent(d->concl));
}

tokseq rec(const derivation_ptr& d, net_builder& B) {
  const std::string& r = d->rule;
  const sequent& c = d->concl;

  if (r == "ax") {
    int t1 = B.fresh(), t2 = B.fresh();
    B.unite(t1, t2);
    return {{{c.hyps[0], {t1}}}, {c.goal, {t2}}};
  }

  if (r == "imp_r") {
    auto p = rec(d->premises[0], B);
    for (size_t i = 0; i < p.hyps.size(); ++i) {
      if (!equal(p.hyps[i].f, c.goal->left)) continue;
      std::vector<char> used(p.hyps.size(), 0);
      used[i] = 1;
      std::vector<formula_ptr> need(c.hyps.begin(), c.hyps.end());
      if (auto m = match_pool(need, p.hyps, used)) {
        tokseq out;
        for (size_t k = 0; k < c.hyps.size(); ++k)
          out.hyps.push_back({c.hyps[k], p.hyps[(*m)[k]].toks});
        out.goal = {c.goal, cat(p.hyps[i].toks, p.goal.toks)};
        return out;
      }
    }
    bad(d, "imp_r premise does not match");
  }

  if (r == "conj_r") {
    auto p0 = rec(d->premises[0], B);
    auto p1 = rec(d->premises[1], B);
    std::vector<tokf> pool = p0.hyps;
    pool.insert(pool.end(), p1.hyps.begin(), p1.hyps.end());
    std::vector<char> used(pool.size(), 0);
    std::vector<formula_ptr> need(c.hyps.begin(), c.hyps.end());
    auto m = match_pool(need, pool, used);
    if (!m) bad(d, "conj_r context does not match");
    tokseq out;
    for (size_t k = 0; k < c.hyps.size(); ++k)
      out.hyps.push_back({c.hyps[k], pool[(*m)[k]].toks});
    out.goal = {c.goal, cat(p0.goal.toks, p1.goal.toks)};
    return out;
  }

  if (r == "conj_l") {
    auto p = rec(d->premises[0], B);
    for (size_t h = 0; h < c.hyps.size(); ++h) {
      if (c.hyps[h]->kind != fkind::conj) continue;
      for (size_t i = 0; i < p.hyps.size(); ++i) {
        if (!equal(p.hyps[i].f, c.hyps[h]->left)) continue;
        for (size_t j = 0; j < p.hyps.size(); ++j) {
          if (j == i || !equal(p.hyps[j].f, c.hyps[h]->right)) continue;
          std::vector<char> used(p.hyps.size(), 0);
          used[i] = used[j] = 1;
          std::vector<formula_ptr> need;
          for (size_t k = 0; k < c.hyps.size(); ++k)
            if (k != h) need.push_back(c.hyps[k]);
          if (auto m = match_pool(need, p.hyps, used)) {
            tokseq out;
            size_t mi = 0;
            for (size_t k = 0; k < c.hyps.size(); ++k) {
              if (k == h)
                out.hyps.push_back({c.hyps[k], cat(p.hyps[i].toks, p.hyps[j].toks)});
              else
                out.hyps.push_back({c.hyps[k], p.hyps[(*m)[mi++]].toks});
            }
            out.goal = {c.goal, p.goal.toks};
            return out;
          }
        }
      }
    }
    bad(d, "conj_l premise does not match");
  }

  if (r == "imp_l") {
    auto p0 = rec(d->premises[0], B);
    auto p1 = rec(d->premises[1], B);
    std::vector<tokf> pool = p0.hyps;
    pool.insert(pool.end(), p1.hyps.begin(), p1.hyps.end());
    for (size_t h = 0; h < c.hyps.size(); ++h) {
      if (c.hyps[h]->kind != fkind::implies) continue;
      if (!equal(c.hyps[h]->left, p0.goal.f)) continue;
      for (size_t b = 0; b < p1.hyps.size(); ++b) {
        if (!equal(p1.hyps[b].f, c.hyps[h]->right)) continue;
        std::vector<char> used(pool.size(), 0);
        used[p0.hyps.size() + b] = 1;
        std::vector<formula_ptr> need;
        for (size_t k = 0; k < c.hyps.size(); ++k)
          if (k != h) need.push_back(c.hyps[k]);
        if (auto m = match_pool(need, pool, used)) {
          tokseq out;
          size_t mi = 0;
          for (size_t k = 0; k < c.hyps.size(); ++k) {
            if (k == h)
              out.hyps.push_back({c.hyps[k], cat(p0.goal.toks, p1.hyps[b].toks)});
            else
              out.hyps.push_back({c.hyps[k], pool[(*m)[mi++]].toks});
          }
          out.goal = {c.goal, p1.goal.toks};
          return out;
        }
      }
    }
    bad(d, "imp_l premises do not match");
  }

  if (r == "k_box" || r == "k_dia" || r == "k_diabot" || r == "d") {
    auto p = rec(d->premises[0], B);
    std::vector<formula_ptr> need;
    std::vector<size_t> which;  // concl hyp index per entry of need
    for (size_t k = 0; k < c.hyps.size(); ++k) {
      if (c.hyps[k]->kind == fkind::diabot) continue;
      need.push_back(c.hyps[k]->left);
      which.push_back(k);
    }
    std::vector<char> used(p.hyps.size(), 0);
    auto m = match_pool(need, p.hyps, used);
    if (!m || need.size() != p.hyps.size()) bad(d, r + " premise does not match");
    std::vector<int> intro;
    tokseq out;
    std::map<size_t, size_t> pos;
    for (size_t q = 0; q < which.size(); ++q) pos[which[q]] = (size_t)(*m)[q];
    for (size_t k = 0; k < c.hyps.size(); ++k) {
      int t = B.fresh();
      intro.push_back(t);
      if (c.hyps[k]->kind == fkind::diabot)
        out.hyps.push_back({c.hyps[k], {t}});
      else
        out.hyps.push_back({c.hyps[k], cat({t}, p.hyps[pos[k]].toks)});
    }
    int tg = B.fresh();
    intro.push_back(tg);
    out.goal = {c.goal, cat({tg}, p.goal.toks)};
    for (size_t k = 1; k < intro.size(); ++k) B.unite(intro[0], intro[k]);
    return out;
  }

  bad(d, "rule " + r + " has no net translation");
}

}  // namespace

arena_net net_of_proof(const derivation_ptr& d, const std::string& logic) {
  std::string sys = logic == "CD" ? "IMLL-CD" : "IMLL-CK";
  if (logic != "CK" && logic != "CD")
    throw std::invalid_argument("net_of_proof: unknown logic " + logic);
  auto rep = check_derivation(d, sys);
  if (!rep.ok)
    throw std::runtime_error("net_of_proof: derivation does not check in " + sys + ": " +
                             rep.error);
  net_builder B;
  auto ts = rec(d, B);
  formula_ptr fc = ts.goal.f;
  for (size_t i = ts.hyps.size(); i-- > 0;) fc = mk_implies(ts.hyps[i].f, fc);
  std::vector<int> all;
  for (const auto& h : ts.hyps) all = cat(all, h.toks);
  all = cat(all, ts.goal.toks);
  auto arena = arena_of(fc);
  auto vs = arena.vertices();
  if (vs.size() != all.size())
    throw std::logic_error("net_of_proof: token/vertex count mismatch");
  std::map<int, std::vector<int>> by_root;
  for (size_t k = 0; k < vs.size(); ++k) by_root[B.find(all[k])].push_back(vs[k]);
  arena_net out{arena, {}};
  for (auto& [_, c] : by_root) {
    std::sort(c.begin(), c.end());
    out.classes.push_back(c);
  }
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

// ---------------------------------------------------------------------------
// linearize

namespace {

struct modal_site {
  formula_ptr body;  // null for a dia with empty cone
  int body_start = 0;
};

}  // namespace

arena_net linearize(const arena_net& p) {
  auto rep = check_net(p, "CK");
  if (!rep.ok)
    throw std::runtime_error("linearize: input is not a CK-arena net (" + rep.condition +
                             (rep.detail.empty() ? "" : ": " + rep.detail) + ")");
  bool any_modal = false;
  for (const auto& [v, l] : p.arena.labels)
    if (p.arena.modal(v)) any_modal = true;
  if (!any_modal) return p;

  auto fo = formula_of(p.arena);
  std::map<int, int> orig_at;  // preorder index in fo.f -> arena vertex id
  for (const auto& [orig, pre] : fo.to_preorder) orig_at[pre] = orig;

  // locate every modal vertex's body inside fo.f
  std::map<int, modal_site> sites;
  std::function<void(const formula_ptr&, int&)> walk = [&](const formula_ptr& g, int& idx) {
    int my = idx++;
    switch (g->kind) {
      case fkind::atom:
        break;
      case fkind::implies:
      case fkind::conj:
        walk(g->left, idx);
        walk(g->right, idx);
        break;
      case fkind::box:
      case fkind::dia:
        sites[orig_at.at(my)] = {g->left, idx};
        walk(g->left, idx);
        break;
      case fkind::diabot:
        sites[orig_at.at(my)] = {nullptr, 0};
        idx++;
        break;
    }
  };
  int idx0 = 0;
  walk(fo.f, idx0);

  // replace atoms by uniquely named ones and modalities by their out-atoms
  std::function<formula_ptr(const formula_ptr&, int&)> strip = [&](const formula_ptr& g,
                                                                   int& idx) -> formula_ptr {
    int my = idx++;
    switch (g->kind) {
      case fkind::atom:
        return mk_atom("v" + std::to_string(orig_at.at(my)));
      case fkind::implies:
      case fkind::conj: {
        auto l = strip(g->left, idx);
        auto r = strip(g->right, idx);
        return g->kind == fkind::implies ? mk_implies(l, r) : mk_conj(l, r);
      }
      case fkind::box:
      case fkind::dia:
        idx += tree_size(g->left);
        return mk_atom("o" + std::to_string(orig_at.at(my)));
      case fkind::diabot:
        idx++;
        return mk_atom("o" + std::to_string(orig_at.at(my)));
    }
    throw std::logic_error("linearize: bad formula kind");
  };

  auto info = vertex_info(p.arena);
  std::map<int, int> cls;
  for (size_t i = 0; i < p.classes.size(); ++i)
    for (int v : p.classes[i]) cls[v] = (int)i;

  // nesting of modal classes via the enclosing modality of the even member
  std::vector<int> top;
  std::map<int, std::vector<int>> children;
  std::vector<int> modal_cls;
  for (size_t i = 0; i < p.classes.size(); ++i) {
    if (!p.arena.modal(p.classes[i][0])) continue;
    modal_cls.push_back((int)i);
    int v0 = -1;
    for (int v : p.classes[i])
      if (info.at(v).even) v0 = v;
    int pm = info.at(v0).pmv;
    if (pm == v0)
      top.push_back((int)i);
    else
      children[cls.at(pm)].push_back((int)i);
  }

  std::function<formula_ptr(int)> build_h = [&](int ci) -> formula_ptr {
    int v0 = -1;
    std::vector<int> odds;
    for (int v : p.classes[ci]) {
      if (info.at(v).even)
        v0 = v;
      else
        odds.push_back(v);
    }
    const auto& s0 = sites.at(v0);
    if (!s0.body) throw std::logic_error("linearize: even modality without a body");
    int ix = s0.body_start;
    formula_ptr core = strip(s0.body, ix);
    formula_ptr prem;
    for (int vi : odds) {
      const auto& s = sites.at(vi);
      if (!s.body) {
        core = mk_conj(core, mk_atom("i" + std::to_string(vi)));
        continue;
      }
      int jx = s.body_start;
      auto part = mk_implies(mk_atom("i" + std::to_string(vi)), strip(s.body, jx));
      prem = prem ? mk_conj(prem, part) : part;
    }
    formula_ptr inner = prem ? mk_implies(prem, core) : core;
    auto ch = children.find(ci);
    if (ch != children.end())
      for (size_t k = ch->second.size(); k-- > 0;)
        inner = mk_implies(build_h(ch->second[k]), inner);
    return mk_implies(inner, mk_atom("i" + std::to_string(v0)));
  };

  int ix = 0;
  formula_ptr base = strip(fo.f, ix);
  for (size_t k = top.size(); k-- > 0;) base = mk_implies(build_h(top[k]), base);

  auto af = arena_of(base);
  std::map<std::string, int> byname;
  for (int v : af.vertices()) byname[af.labels.at(v)] = v;

  std::set<std::string> taken;
  for (const auto& [v, l] : p.arena.labels)
    if (!p.arena.modal(v)) taken.insert(l);

  arena_net out{af, {}};
  int mseq = 0;
  std::vector<int> modal_ids;
  for (const auto& [v, l] : p.arena.labels)
    if (p.arena.modal(v)) modal_ids.push_back(v);
  for (int m : modal_ids) {
    std::string nm;
    do {
      nm = "m" + std::to_string(mseq++);
    } while (taken.count(nm));
    int vin = byname.at("i" + std::to_string(m));
    int vout = byname.at("o" + std::to_string(m));
    out.arena.labels[vin] = nm;
    out.arena.labels[vout] = nm;
    out.classes.push_back({std::min(vin, vout), std::max(vin, vout)});
  }
  for (const auto& c : p.classes) {
    if (p.arena.modal(c[0])) continue;
    int x = byname.at("v" + std::to_string(c[0]));
    int y = byname.at("v" + std::to_string(c[1]));
    out.classes.push_back({std::min(x, y), std::max(x, y)});
  }
  for (const auto& [orig, l] : p.arena.labels) {
    if (p.arena.modal(orig)) continue;
    out.arena.labels[byname.at("v" + std::to_string(orig))] = l;
  }
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

// ---------------------------------------------------------------------------
// isomorphism

bool net_isomorphic(const arena_net& a, const arena_net& b) {
  auto va = a.arena.vertices(), vb = b.arena.vertices();
  if (va.size() != vb.size() || a.classes.size() != b.classes.size()) return false;
  std::map<int, int> ca, cb;
  for (size_t i = 0; i < a.classes.size(); ++i)
    for (int v : a.classes[i]) ca[v] = (int)i;
  for (size_t i = 0; i < b.classes.size(); ++i)
    for (int v : b.classes[i]) cb[v] = (int)i;
  if (ca.size() != va.size() || cb.size() != vb.size()) return false;

  auto sig = [](const modal_arena& g, const std::map<int, int>& cls,
                const std::vector<int>& cs_sizes, int v) {
    int io = 0, ii = 0, mo = 0, mi = 0;
    for (auto [x, y] : g.iedges) {
      if (x == v) io++;
      if (y == v) ii++;
    }
    for (auto [x, y] : g.medges) {
      if (x == v) mo++;
      if (y == v) mi++;
    }
    return std::tuple(g.labels.at(v), io, ii, mo, mi, cs_sizes[cls.at(v)]);
  };
  std::vector<int> sa, sb;
  for (const auto& c : a.classes) sa.push_back((int)c.size());
  for (const auto& c : b.classes) sb.push_back((int)c.size());

  std::map<int, std::vector<int>> cand;
  for (int v : va) {
    for (int w : vb)
      if (sig(a.arena, ca, sa, v) == sig(b.arena, cb, sb, w)) cand[v].push_back(w);
    if (cand[v].empty()) return false;
  }
  std::sort(va.begin(), va.end(),
            [&](int x, int y) { return cand[x].size() < cand[y].size(); });

  std::map<int, int> m;
  std::set<int> used;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == va.size()) return true;
    int v = va[i];
    for (int w : cand[v]) {
      if (used.count(w)) continue;
      bool ok = true;
      for (const auto& [x, y] : m) {
        if (a.arena.ie(v, x) != b.arena.ie(w, y) || a.arena.ie(x, v) != b.arena.ie(y, w) ||
            a.arena.me(v, x) != b.arena.me(w, y) || a.arena.me(x, v) != b.arena.me(y, w) ||
            (ca.at(v) == ca.at(x)) != (cb.at(w) == cb.at(y))) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      m[v] = w;
      used.insert(w);
      if (go(i + 1)) return true;
      m.erase(v);
      used.erase(w);
    }
    return false;
  };
  return go(0);
}

}  // namespace cml
