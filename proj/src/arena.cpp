#include "cml/arena.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace cml {

std::vector<int> modal_arena::vertices() const {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto& [v, _] : labels) out.push_back(v);
  return out;
}

// ---- construction ---------------------------------------------------------

namespace {

// builds the arena of the subtree at `node`, returns its ⊸-roots
std::vector<int> arena_rec(const formula_tree& t, int node, modal_arena& a) {
  const tree_node& n = t.nodes[node];
  if (n.label == "->") {
    std::vector<int> rl = arena_rec(t, n.children[0], a);
    std::vector<int> rr = arena_rec(t, n.children[1], a);
    for (int u : rl)
      for (int v : rr) a.iedges.insert({u, v});
    return rr;
  }
  if (n.label == "/\\") {
    std::vector<int> rl = arena_rec(t, n.children[0], a);
    std::vector<int> rr = arena_rec(t, n.children[1], a);
    rl.insert(rl.end(), rr.begin(), rr.end());
    return rl;
  }
  if (n.label == "box" || n.label == "dia") {
    a.labels[node] = n.label;
    if (n.sub && n.sub->kind == fkind::diabot) return {node};
    std::vector<int> rb = arena_rec(t, n.children[0], a);
    for (int v : rb) a.medges.insert({node, v});
    rb.insert(rb.begin(), node);
    return rb;
  }
  a.labels[node] = n.label;  // atom
  return {node};
}

void close_medges(modal_arena& a) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<int, int>> add;
    for (auto& [v, w] : a.medges)
      for (auto& [x, u] : a.medges)
        if (w == x && !a.me(v, u)) add.push_back({v, u});
    for (auto& e : add) changed |= a.medges.insert(e).second;
  }
}

}  // namespace

modal_arena arena_of(const formula_ptr& f) {
  formula_tree t = build_tree(f);
  modal_arena a;
  arena_rec(t, 0, a);
  close_medges(a);
  return a;
}

// ---- validity -------------------------------------------------------------

namespace {

std::map<int, std::set<int>> out_sets(const std::set<std::pair<int, int>>& es) {
  std::map<int, std::set<int>> out;
  for (auto& [v, w] : es) out[v].insert(w);
  return out;
}

bool find_cycle(const modal_arena& a, std::vector<int>& cycle) {
  // DFS over ⊸ ∪ ↝
  std::map<int, std::set<int>> out = out_sets(a.iedges);
  for (auto& [v, w] : a.medges) out[v].insert(w);
  std::map<int, int> state;  // 0 new, 1 open, 2 done
  std::vector<int> stack;
  std::function<bool(int)> dfs = [&](int v) {
    state[v] = 1;
    stack.push_back(v);
    for (int w : out[v]) {
      if (state[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (int v : a.vertices())
    if (state[v] == 0 && dfs(v)) return true;
  return false;
}

}  // namespace

arena_report is_modal_arena(const modal_arena& a) {
  if (a.labels.empty()) return {false, "empty", {}, "arena has no vertices"};
  for (auto& [v, w] : a.iedges)
    if (!a.has(v) || !a.has(w))
      return {false, "labeling", {v, w}, "edge endpoint is not a vertex"};
  for (auto& [v, w] : a.medges)
    if (!a.has(v) || !a.has(w))
      return {false, "labeling", {v, w}, "edge endpoint is not a vertex"};

  std::vector<int> cycle;
  if (find_cycle(a, cycle)) return {false, "cyclic", cycle, "cycle in the edge relations"};

  auto iout = out_sets(a.iedges);

  // L-free: a⊸u and a⊸w⊸v imply u⊸v
  for (auto& [s, outs] : iout)
    for (int w : outs)
      for (int v : iout[w])
        for (int u : outs)
          if (u != w && !a.ie(u, v))
            return {false, "L-shape", {s, u, w, v}, "missing edge closing the L"};

  // Σ-free: overlapping out-sets must be nested
  for (auto it = iout.begin(); it != iout.end(); ++it)
    for (auto jt = std::next(it); jt != iout.end(); ++jt) {
      const std::set<int>&sa = it->second, &sb = jt->second;
      if (sa.empty() || sb.empty()) continue;
      int common = -1, onlya = -1, onlyb = -1;
      for (int x : sa) (sb.count(x) ? common : onlya) = x;
      if (common == -1 || onlya == -1) continue;
      for (int x : sb)
        if (!sa.count(x)) onlyb = x;
      if (onlyb != -1)
        return {false, "Sigma-shape", {it->first, onlya, common, jt->first, onlyb},
                "out-neighbourhoods overlap without nesting"};
    }

  // modal axioms
  auto mout = out_sets(a.medges);
  for (auto& [v, ws] : mout)
    for (int w : ws) {
      for (int u : mout[w])
        if (!a.me(v, u)) return {false, "modal-axiom-1", {v, w, u}, "↝ not transitive"};
      for (auto& [u, us] : mout)
        if (us.count(w) && u != v && !a.me(u, v) && !a.me(v, u))
          return {false, "modal-axiom-2", {v, w, u}, "↝-predecessors not comparable"};
      for (int u : ws)
        if (a.ie(u, w)) return {false, "modal-axiom-3", {v, w, u}, "⊸ between ↝-siblings"};
      for (auto& [u, outs] : iout)
        if (outs.count(v) && !a.ie(u, w))
          return {false, "modal-axiom-4", {v, w, u}, "⊸ into a ↝-source misses its target"};
      for (int u : iout[v])
        if (!a.ie(w, u))
          return {false, "modal-axiom-5", {v, w, u}, "⊸ out of a ↝-source misses its target"};
      for (int u : iout[w])
        if (!a.ie(v, u))
          return {false, "modal-axiom-6", {v, w, u}, "⊸ out of a ↝-target misses its source"};
    }

  // properly labeled
  for (auto& [v, ws] : mout)
    if (!ws.empty() && !a.modal(v))
      return {false, "labeling", {v}, "↝-source is not a modality"};
  for (auto& [v, l] : a.labels)
    if (l == "box" && mout[v].empty())
      return {false, "labeling", {v}, "box vertex without ↝-successor"};

  return {};
}

// ---- derived data ---------------------------------------------------------

std::set<int> iroots(const modal_arena& a) {
  std::set<int> r;
  for (auto& [v, _] : a.labels) r.insert(v);
  for (auto& [v, w] : a.iedges) r.erase(v);
  return r;
}

std::set<int> mroots(const modal_arena& a) {
  std::set<int> r;
  for (auto& [v, _] : a.labels) r.insert(v);
  for (auto& [v, w] : a.medges) r.erase(w);
  return r;
}

std::map<int, std::set<int>> ireach(const modal_arena& a) {
  auto iout = out_sets(a.iedges);
  std::map<int, std::set<int>> reach;
  std::function<const std::set<int>&(int)> go = [&](int v) -> const std::set<int>& {
    auto it = reach.find(v);
    if (it != reach.end()) return it->second;
    std::set<int> r{v};
    for (int w : iout[v]) {
      const std::set<int>& rw = go(w);
      r.insert(rw.begin(), rw.end());
    }
    return reach.emplace(v, std::move(r)).first->second;
  };
  for (auto& [v, _] : a.labels) go(v);
  return reach;
}

std::map<int, vertex_data> vertex_info(const modal_arena& a) {
  auto iout = out_sets(a.iedges);
  std::map<int, vertex_data> info;
  std::function<int(int)> depth = [&](int v) -> int {
    auto it = info.find(v);
    if (it != info.end()) return it->second.depth;
    info[v];  // mark (graph is acyclic)
    int d = 0;
    for (int w : iout[v]) d = std::max(d, 1 + depth(w));
    info[v].depth = d;
    return d;
  };
  for (auto& [v, _] : a.labels) depth(v);
  for (auto& [v, d] : info) d.even = d.depth % 2 == 0;

  auto reach = ireach(a);
  auto mout = out_sets(a.medges);
  for (auto& [m, ts] : mout)
    for (auto& [w, _] : a.labels) {
      if (reach[w].count(m)) continue;
      for (int u : ts)
        if (reach[w].count(u)) {
          info[m].cone.insert(w);
          break;
        }
    }

  for (auto& [v, d] : info) {
    std::vector<int> holders;
    for (auto& [m, md] : info)
      if (md.cone.count(v)) holders.push_back(m);
    if (holders.empty()) {
      d.pmv = v;
      continue;
    }
    int best = -1;
    for (int m : holders) {
      bool innermost = true;
      for (int m2 : holders)
        if (m2 != m && !info[m2].cone.count(m)) innermost = false;
      if (innermost) {
        if (best != -1) throw std::runtime_error("ambiguous pmv");
        best = m;
      }
    }
    if (best == -1) throw std::runtime_error("no innermost modality");
    d.pmv = best;
  }
  return info;
}

std::vector<int> address(const std::map<int, vertex_data>& info, int v) {
  std::vector<int> out;
  int cur = v;
  while (true) {
    int nxt = info.at(cur).pmv;
    if (nxt == cur) break;
    out.push_back(nxt);
    cur = nxt;
  }
  return out;
}

int meeting_depth(const modal_arena& a, int v, int w) {
  auto reach = ireach(a);
  std::set<int> common;
  for (int u : reach[v])
    if (reach[w].count(u)) common.insert(u);
  if (common.empty()) return -1;
  // depth of the deepest common descendants: those not ⊸*-below another one
  auto info = vertex_info(a);
  int md = -1;
  for (int u : common) {
    bool inner = false;
    for (int x : common) inner = inner || (x != u && reach[x].count(u));
    if (!inner && info.at(u).depth > md) md = info.at(u).depth;
  }
  return md;
}

bool conjunct(const modal_arena& a, int v, int w) {
  int d = meeting_depth(a, v, w);
  return d == -1 || d % 2 == 1;
}

// ---- formula reconstruction -----------------------------------------------

namespace {

modal_arena restrict_arena(const modal_arena& a, const std::set<int>& vs) {
  modal_arena r;
  for (int v : vs) r.labels[v] = a.labels.at(v);
  for (auto& e : a.iedges)
    if (vs.count(e.first) && vs.count(e.second)) r.iedges.insert(e);
  for (auto& e : a.medges)
    if (vs.count(e.first) && vs.count(e.second)) r.medges.insert(e);
  return r;
}

// returns the formula together with the original ids of its future arena
// vertices in formula-tree preorder
std::pair<formula_ptr, std::vector<int>> formula_rec(const modal_arena& a) {
  std::vector<int> vs = a.vertices();
  if (vs.empty()) throw std::runtime_error("empty arena has no formula");
  if (vs.size() == 1) {
    int v = vs[0];
    const std::string& l = a.labels.at(v);
    if (l == "dia") return {mk_diabot(), {v}};
    if (l == "box") throw std::runtime_error("isolated box vertex");
    return {mk_atom(l), {v}};
  }

  std::set<int> R = iroots(a);
  if (R.empty()) throw std::runtime_error("no ⊸-roots");
  auto reach = ireach(a);
  auto info = vertex_info(a);
  auto mout = out_sets(a.medges);

  // modal join: a root modality whose ↝-targets are all the other roots and
  // whose cone holds everything else
  std::set<int> MR = mroots(a);
  for (int v : R) {
    if (!MR.count(v) || !a.modal(v)) continue;
    std::set<int> r1{v};
    for (int w : mout[v]) r1.insert(w);
    if (r1 != R) continue;
    std::set<int> body = info.at(v).cone;
    std::set<int> all = body;
    all.insert(v);
    if ((int)all.size() != (int)vs.size()) continue;
    auto [inner, origs] = formula_rec(restrict_arena(a, body));
    origs.insert(origs.begin(), v);
    formula_ptr f = a.labels.at(v) == "box" ? mk_box(inner) : mk_dia(inner);
    return {f, origs};
  }

  // ⊸-join: the premise part collects every vertex outside the roots and
  // their cones that reaches all roots (currying flattens nested premises)
  {
    std::set<int> excluded = R;
    for (int r : R)
      for (int c : info.at(r).cone) excluded.insert(c);
    std::set<int> v1;
    for (int w : vs) {
      if (excluded.count(w)) continue;
      bool all = true;
      for (int r : R) all &= reach[w].count(r) != 0;
      if (all) v1.insert(w);
    }
    if (!v1.empty()) {
      std::set<int> v2;
      for (int w : vs)
        if (!v1.count(w)) v2.insert(w);
      auto [fl, ol] = formula_rec(restrict_arena(a, v1));
      auto [fr, orr] = formula_rec(restrict_arena(a, v2));
      ol.insert(ol.end(), orr.begin(), orr.end());
      return {mk_implies(fl, fr), ol};
    }
  }

  // sum: group roots that share an ⊸*-ancestor or are ↝-related, split off
  // the group of the smallest root, and partition by ⊸*-reachability
  std::map<int, int> uf;
  for (int r : R) uf[r] = r;
  std::function<int(int)> find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (int w : vs) {
    int first = -1;
    for (int r : R)
      if (reach[w].count(r)) {
        if (first == -1) first = r;
        else uf[find(r)] = find(first);
      }
  }
  for (auto& [x, y] : a.medges)
    if (R.count(x) && R.count(y)) uf[find(x)] = find(y);
  int lead = find(*R.begin());
  std::set<int> r1;
  for (int r : R)
    if (find(r) == lead) r1.insert(r);
  if (r1.size() == R.size()) throw std::runtime_error("roots do not split");
  std::set<int> v1, v2;
  for (int w : vs) {
    bool to1 = false;
    for (int r : r1) to1 |= reach[w].count(r) != 0;
    (to1 ? v1 : v2).insert(w);
  }
  auto [fl, ol] = formula_rec(restrict_arena(a, v1));
  auto [fr, orr] = formula_rec(restrict_arena(a, v2));
  ol.insert(ol.end(), orr.begin(), orr.end());
  return {mk_conj(fl, fr), ol};
}

}  // namespace

formula_of_result formula_of(const modal_arena& a) {
  auto [f, origs] = formula_rec(a);
  formula_tree t = build_tree(f);
  formula_of_result res;
  res.f = f;
  size_t k = 0;
  for (size_t i = 0; i < t.nodes.size(); i++) {
    const std::string& l = t.nodes[i].label;
    if (l == "->" || l == "/\\" || l == "bot") continue;
    res.to_preorder[origs[k++]] = (int)i;
  }
  if (k != origs.size()) throw std::runtime_error("vertex count mismatch");
  return res;
}

// ---- isomorphism ----------------------------------------------------------

bool arena_isomorphic(const modal_arena& a, const modal_arena& b) {
  std::vector<int> va = a.vertices(), vb = b.vertices();
  if (va.size() != vb.size() || a.iedges.size() != b.iedges.size() ||
      a.medges.size() != b.medges.size())
    return false;

  auto sig = [](const modal_arena& g) {
    auto info = vertex_info(g);
    std::map<int, std::array<int, 5>> s;
    for (auto& [v, _] : g.labels) s[v] = {info.at(v).depth, 0, 0, 0, 0};
    for (auto& [v, w] : g.iedges) s[v][1]++, s[w][2]++;
    for (auto& [v, w] : g.medges) s[v][3]++, s[w][4]++;
    return s;
  };
  auto sa = sig(a), sb = sig(b);

  std::map<int, int> m;       // a vertex -> b vertex
  std::set<int> used;
  std::function<bool(size_t)> go = [&](size_t i) {
    if (i == va.size()) {
      for (auto& [v, w] : a.iedges)
        if (!b.iedges.count({m[v], m[w]})) return false;
      for (auto& [v, w] : a.medges)
        if (!b.medges.count({m[v], m[w]})) return false;
      return true;
    }
    int v = va[i];
    for (int w : vb) {
      if (used.count(w) || a.labels.at(v) != b.labels.at(w) || sa[v] != sb[w]) continue;
      bool ok = true;  // check edges against already-mapped vertices
      for (auto& [x, y] : m) {
        if (a.ie(v, x) != b.ie(w, y) || a.ie(x, v) != b.ie(y, w) ||
            a.me(v, x) != b.me(w, y) || a.me(x, v) != b.me(y, w))
          ok = false;
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
