#include "cml/game.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace cml {
namespace {

constexpr long kenum_bound = 500000;

struct dsu {
  std::map<int, int> parent;
  int find(int x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    return parent[x] = find(it->second);
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  bool same(int a, int b) { return find(a) == find(b); }
};

std::vector<int> with(const std::vector<int>& p, int m) {
  auto q = p;
  q.push_back(m);
  return q;
}

std::string vname(const modal_arena& a, int v) {
  return a.labels.at(v) + "_" + std::to_string(v);
}

// legal answers to the pending last move of an odd-length view q: odd
// vertices of the same label, not yet played, justified by some move of q
std::vector<int> answers(const modal_arena& a,
                         const std::map<int, vertex_data>& info,
                         const std::vector<int>& q) {
  std::vector<int> out;
  std::set<int> used(q.begin(), q.end());
  const std::string& lab = a.labels.at(q.back());
  for (auto& [v, l] : a.labels) {
    if (l != lab || l == "box") continue;
    if (info.at(v).even || used.count(v)) continue;
    bool just = false;
    for (int x : q) just = just || a.ie(v, x);
    if (just) out.push_back(v);
  }
  return out;
}

// successors forced on an even-length view: every atom successor, and every
// diamond successor that has at least one legal answer
std::vector<int> forced_successors(const modal_arena& a,
                                   const std::map<int, vertex_data>& info,
                                   const std::set<int>& roots,
                                   const std::vector<int>& p) {
  std::vector<int> out;
  std::set<int> used(p.begin(), p.end());
  for (auto& [v, l] : a.labels) {
    if (l == "box" || !info.at(v).even || used.count(v)) continue;
    if (p.empty() ? !roots.count(v) : !a.ie(v, p.back())) continue;
    if (l == "dia" && answers(a, info, with(p, v)).empty()) continue;
    out.push_back(v);
  }
  return out;
}

// frame matrices of a well-framed strategy: global vertex equivalence, the
// per-view row pairs and the sets of played / involved vertices
struct frame_info {
  dsu eqv;
  std::set<int> moves, involved;
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> view_pairs;
};

frame_info build_frames(const std::map<int, vertex_data>& info,
                        const strategy& s) {
  frame_info fr;
  for (auto& p : s.views) {
    auto& pairs = fr.view_pairs[p];
    for (int v : p) {
      fr.moves.insert(v);
      fr.involved.insert(v);
      for (int m : address(info, v)) fr.involved.insert(m);
    }
    for (size_t k = 0; 2 * k + 1 < p.size(); k++) {
      int u = p[2 * k], w = p[2 * k + 1];
      pairs.push_back({u, w});
      fr.eqv.unite(u, w);
      auto au = address(info, u), aw = address(info, w);
      for (size_t r = 0; r < au.size() && r < aw.size(); r++) {
        pairs.push_back({au[r], aw[r]});
        fr.eqv.unite(au[r], aw[r]);
      }
    }
  }
  return fr;
}

// pre-view of p: the interleaving of p with the addresses of its moves,
// climbing only as far as the frames of the surrounding pairs agree
std::vector<int> pre_view(const modal_arena& a,
                          const std::map<int, vertex_data>& info, dsu& eqv,
                          const strategy& s, const std::vector<int>& p) {
  size_t n = p.size();
  std::vector<int> out;
  if (n == 0) return out;
  auto a0 = address(info, p[0]);
  out.insert(out.end(), a0.rbegin(), a0.rend());
  out.push_back(p[0]);
  for (size_t i = 1; 2 * i <= n - 1; i++) {
    size_t c1 = 2 * i - 1, c2 = 2 * i;
    // the climbing height is fixed by the next pair of moves; for an
    // odd-length view that pair is completed by the unique successor in s
    int u = p[c2], w = -1;
    if (c2 + 1 < n) {
      w = p[c2 + 1];
    } else {
      for (auto& q : s.views)
        if (q.size() == n + 1 && std::equal(p.begin(), p.end(), q.begin()))
          w = q.back();
      if (w < 0) throw std::runtime_error("view has no successor in strategy");
    }
    auto au = address(info, p[c1]), aw = address(info, p[c2]);
    size_t h = 0;
    if (address(info, u) != address(info, w)) {
      for (size_t r = std::min(au.size(), aw.size()); r >= 1; r--) {
        if (eqv.same(au[r - 1], aw[r - 1])) {
          h = r;
          break;
        }
      }
    }
    out.push_back(p[c1]);
    for (size_t r = 1; r <= h; r++) out.push_back(au[r - 1]);
    for (size_t r = h; r >= 1; r--) {
      if (r == h && au[r - 1] == aw[r - 1]) continue;
      out.push_back(aw[r - 1]);
    }
    out.push_back(p[c2]);
  }
  if (n % 2 == 0) {
    out.push_back(p[n - 1]);
    for (int m : address(info, p[n - 1])) out.push_back(m);
  }
  std::vector<int> dedup;
  for (int v : out)
    if (dedup.empty() || dedup.back() != v) dedup.push_back(v);
  (void)a;
  return dedup;
}

// unchecked part of a pre-view prefix: repeatedly cut the interior between
// the first vertex that is equivalent to a strictly later, non-adjacent one
std::vector<int> contract(std::vector<int> seq, dsu& eqv) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < seq.size() && !changed; i++) {
      for (size_t j = seq.size(); j-- > i + 2;) {
        if (eqv.same(seq[i], seq[j])) {
          seq.erase(seq.begin() + i + 1, seq.begin() + j);
          changed = true;
          break;
        }
      }
    }
    for (size_t i = 0; i + 1 < seq.size(); i++)
      if (seq[i] == seq[i + 1]) {
        seq.erase(seq.begin() + i + 1);
        changed = true;
      }
  }
  return seq;
}

bool has_diabot(const formula_ptr& f) {
  if (!f) return false;
  if (f->kind == fkind::diabot) return true;
  return has_diabot(f->left) || has_diabot(f->right);
}

}  // namespace

strategy strategy_of_maximal(const std::vector<std::vector<int>>& maximal) {
  strategy s;
  s.views.insert(std::vector<int>{});
  for (auto& p : maximal)
    for (size_t l = 1; l <= p.size(); l++)
      s.views.insert(std::vector<int>(p.begin(), p.begin() + l));
  return s;
}

std::vector<std::vector<int>> maximal_views(const strategy& s) {
  std::vector<std::vector<int>> out;
  for (auto& p : s.views) {
    if (p.empty()) continue;
    bool extended = false;
    for (auto& q : s.views)
      extended = extended || (q.size() == p.size() + 1 &&
                              std::equal(p.begin(), p.end(), q.begin()));
    if (!extended) out.push_back(p);
  }
  return out;
}

game_report is_view(const modal_arena& a, const std::vector<int>& seq) {
  for (int v : seq)
    if (!a.has(v))
      return {false, "play", seq, "unknown vertex " + std::to_string(v)};
  auto info = vertex_info(a);
  auto roots = iroots(a);
  std::set<int> seen;
  for (size_t i = 0; i < seq.size(); i++) {
    int v = seq[i];
    if (a.labels.at(v) == "box")
      return {false, "modal", seq, vname(a, v) + " is not a move"};
    if (!seen.insert(v).second)
      return {false, "distinct", seq, vname(a, v) + " played twice"};
    if (info.at(v).even != (i % 2 == 0))
      return {false, "alternating", seq,
              vname(a, v) + " has the wrong polarity at position " +
                  std::to_string(i)};
    if (i == 0) {
      if (!roots.count(v))
        return {false, "play", seq, vname(a, v) + " is not a root"};
      continue;
    }
    bool just = false;
    for (size_t j = 0; j < i; j++) just = just || a.ie(v, seq[j]);
    if (!just)
      return {false, "justified", seq, vname(a, v) + " has no justifier"};
    if (i % 2 == 0 && !a.ie(v, seq[i - 1]))
      return {false, "shortsighted", seq,
              vname(a, v) + " does not answer to " + vname(a, seq[i - 1])};
    if (i % 2 == 1 && a.labels.at(v) != a.labels.at(seq[i - 1]))
      return {false, "uniform", seq,
              vname(a, v) + " does not match " + vname(a, seq[i - 1])};
  }
  return {};
}

game_report check_wis(const modal_arena& a, const strategy& s) {
  if (!s.views.count({}))
    return {false, "prefix-closed", {}, "missing the empty view"};
  auto info = vertex_info(a);
  auto roots = iroots(a);
  for (auto& p : s.views) {
    auto vr = is_view(a, p);
    if (!vr.ok)
      return {false, "view", p,
              vr.clause + (vr.detail.empty() ? "" : ": " + vr.detail)};
    if (!p.empty() &&
        !s.views.count(std::vector<int>(p.begin(), p.end() - 1)))
      return {false, "prefix-closed", p, "immediate prefix is missing"};
  }
  for (auto& p : s.views) {
    if (p.size() % 2 == 0) {
      for (int m : forced_successors(a, info, roots, p))
        if (!s.views.count(with(p, m)))
          return {false,
                  a.labels.at(m) == "dia" ? "dia-complete" : "o-complete",
                  with(p, m), "forced view is missing"};
    } else {
      int succ = 0;
      for (auto& q : s.views)
        if (q.size() == p.size() + 1 &&
            std::equal(p.begin(), p.end(), q.begin()))
          succ++;
      if (succ == 0) return {false, "total", p, "no answer"};
      if (succ > 1) return {false, "deterministic", p, "two answers"};
    }
  }
  std::set<int> moves;
  for (auto& p : s.views) moves.insert(p.begin(), p.end());
  for (int v : moves) {
    if (a.labels.at(v) != "dia" || !info.at(v).even) continue;
    bool any = false;
    for (auto& [x, w] : a.medges) {
      if (x != v) continue;
      any = true;
      if (a.labels.at(w) != "box" && !moves.count(w))
        return {false, "dia-complete", {v, w},
                vname(a, w) + " under " + vname(a, v) + " is never played"};
    }
    if (!any)
      return {false, "dia-complete", {v}, vname(a, v) + " is empty"};
  }
  return {};
}

game_report check_framed(const modal_arena& a, const strategy& s,
                         const std::string& logic) {
  if (logic != "CK" && logic != "CD")
    return {false, "CK-framed", {}, "unknown logic " + logic};
  auto wr = check_wis(a, s);
  if (!wr.ok) return wr;
  auto info = vertex_info(a);
  for (auto& p : s.views)
    for (size_t k = 0; 2 * k + 1 < p.size(); k++)
      if (address(info, p[2 * k]).size() !=
          address(info, p[2 * k + 1]).size())
        return {false, "well-framed", p,
                vname(a, p[2 * k]) + " and " + vname(a, p[2 * k + 1]) +
                    " sit at different modal depths"};
  auto fr = build_frames(info, s);
  // each view carries its own frame classes; the modal conditions then read
  // the link relation accumulated over the whole strategy
  std::map<int, std::set<int>> linked;
  for (auto& [p, pairs] : fr.view_pairs) {
    dsu eqv;
    std::set<int> involved;
    for (int v : p) {
      involved.insert(v);
      for (int m : address(info, v)) involved.insert(m);
    }
    for (auto& [u, w] : pairs) eqv.unite(u, w);
    std::map<int, std::vector<int>> cls;
    for (int v : involved) cls[eqv.find(v)].push_back(v);
    for (auto& [root, members] : cls) {
      int even = -1, evens = 0;
      for (int v : members)
        if (info.at(v).even) {
          even = v;
          evens++;
        }
      if (evens != 1)
        return {false, "linked", members,
                evens == 0 ? "class with no even vertex"
                           : "class with two even vertices"};
      auto ref = address(info, even);
      for (int v : members) {
        auto av = address(info, v);
        bool fits = av.size() == ref.size();
        for (size_t r = 0; fits && r < av.size(); r++)
          fits = fr.eqv.same(av[r], ref[r]);
        if (!fits) return {false, "functoriality", members, vname(a, v)};
        if (v != even) linked[even].insert(v);
      }
    }
  }
  for (int w : fr.involved) {
    if (!a.modal(w) || !info.at(w).even) continue;
    int dias = 0;
    std::string bad;
    for (int v : linked[w]) {
      if (a.labels.at(v) == "dia") dias++;
      if (a.labels.at(w) == "box" && a.labels.at(v) != "box")
        bad = vname(a, v) + " linked to " + vname(a, w);
    }
    std::string clause = logic + "-framed";
    if (!bad.empty()) return {false, clause, {w}, bad};
    if (a.labels.at(w) == "dia") {
      if (logic == "CK" && dias != 1)
        return {false, clause, {w},
                vname(a, w) + " is linked to " + std::to_string(dias) +
                    " diamonds"};
      if (logic == "CD" && dias > 1)
        return {false, clause, {w},
                vname(a, w) + " is linked to two diamonds"};
    }
  }
  return {};
}

strategy wis_of_icp(const combinatorial_proof& c) {
  auto rep = check_icp(c);
  if (!rep.ok)
    throw std::runtime_error("invalid certificate: " + rep.layer + ": " +
                             rep.detail);
  const modal_arena& h = c.net.arena;
  auto link = linking_of(c.net);
  struct edge {
    int u;
    char t;
  };
  std::map<int, std::vector<edge>> in;
  for (auto& [v, w] : link.oedges) in[w].push_back({v, 'o'});
  for (auto& [v, w] : link.omedges) in[w].push_back({v, 'm'});
  for (auto& [v, w] : link.axlinks) in[w].push_back({v, 'a'});
  for (auto& [w, es] : in)
    std::sort(es.begin(), es.end(),
              [](const edge& x, const edge& y) { return x.u < y.u; });
  auto ir = iroots(h);
  auto mr = mroots(h);
  strategy s;
  s.views.insert(std::vector<int>{});
  long count = 0;
  std::set<int> onpath;
  std::vector<int> abs;
  auto record = [&] {
    std::vector<int> img;
    for (int x : abs) img.push_back(c.map.assign.at(x));
    s.views.insert(img);
  };
  std::function<void(int)> dfs = [&](int v) {
    if (++count > kenum_bound)
      throw std::runtime_error("view enumeration bound exceeded");
    record();
    for (auto& e : in[v]) {
      if (onpath.count(e.u)) continue;
      const std::string& lu = h.labels.at(e.u);
      if (e.t == 'a' && lu == "box") continue;
      if (e.t == 'a' && lu == "dia") {
        // a diamond answering a diamond ends the view
        if (h.labels.at(v) != "dia") continue;
        abs.push_back(v);
        abs.push_back(e.u);
        if (++count > kenum_bound)
          throw std::runtime_error("view enumeration bound exceeded");
        record();
        abs.pop_back();
        abs.pop_back();
        continue;
      }
      // a view enters the content of a modality at a root of its body
      if (e.t == 'm' && !h.me(v, e.u)) continue;
      bool keep = lu != "box" && lu != "dia";
      onpath.insert(e.u);
      if (keep) abs.push_back(e.u);
      dfs(e.u);
      if (keep) abs.pop_back();
      onpath.erase(e.u);
    }
  };
  for (int r : ir) {
    if (!mr.count(r)) continue;
    bool keep = !h.modal(r);
    onpath.insert(r);
    if (keep) abs.push_back(r);
    dfs(r);
    if (keep) abs.pop_back();
    onpath.erase(r);
  }
  std::vector<std::vector<int>> all(s.views.begin(), s.views.end());
  for (auto& p : all)
    for (size_t l = 1; l < p.size(); l++)
      s.views.insert(std::vector<int>(p.begin(), p.begin() + l));
  return s;
}

combinatorial_proof icp_of_wis(const formula_ptr& f, const strategy& s,
                               const std::string& logic) {
  if (has_diabot(f))
    throw std::runtime_error("conclusion contains dia bot");
  auto target = arena_of(f);
  auto fres = check_framed(target, s, logic);
  if (!fres.ok)
    throw std::runtime_error("strategy is not " + logic + "-winning: " +
                             fres.clause +
                             (fres.detail.empty() ? "" : ": " + fres.detail));
  auto info = vertex_info(target);
  auto fr = build_frames(info, s);

  // canonical unchecked prefixes of the pre-views and, per view, the path
  // they trace through the reconstructed arena
  std::set<std::vector<int>> canon;
  std::map<std::vector<int>, std::vector<std::vector<int>>> seq_paths;
  for (auto& p : s.views) {
    if (p.empty()) continue;
    auto pv = pre_view(target, info, fr.eqv, s, p);
    std::vector<std::vector<int>> path;
    for (size_t l = 1; l <= pv.size(); l++) {
      auto pre = contract(std::vector<int>(pv.begin(), pv.begin() + l),
                          fr.eqv);
      if (path.empty() || pre != path.back()) path.push_back(pre);
      canon.insert(pre);
    }
    seq_paths[p] = path;
  }
  std::vector<std::vector<int>> order(canon.begin(), canon.end());
  std::map<std::vector<int>, int> id;
  for (size_t i = 0; i < order.size(); i++) id[order[i]] = (int)i;
  auto img = [&](int v) { return order[v].back(); };

  modal_arena h;
  for (size_t i = 0; i < order.size(); i++)
    h.labels[(int)i] = target.labels.at(order[i].back());

  std::map<std::vector<int>, std::vector<int>> paths;
  std::map<int, std::set<int>> preds;
  std::map<int, std::set<int>> on_path;
  int pix = 0;
  for (auto& [view, path] : seq_paths) {
    std::vector<int> ids;
    for (auto& pre : path) ids.push_back(id.at(pre));
    for (size_t k = 0; k < ids.size(); k++) {
      on_path[ids[k]].insert(pix);
      for (size_t j = 0; j < k; j++) preds[ids[k]].insert(ids[j]);
    }
    paths[view] = ids;
    pix++;
  }

  // several copies of the same target vertex must not be confused: an edge
  // or link only forms between copies that agree on every shared instance
  std::map<int, std::vector<int>> pre_of;
  for (size_t i = 0; i < order.size(); i++)
    pre_of[img((int)i)].push_back((int)i);
  std::vector<int> dup;
  for (auto& [t, vs] : pre_of)
    if (vs.size() > 1) dup.push_back(t);
  auto inst = [&](int v, int t) -> std::optional<int> {
    if (img(v) == t) return v;
    std::set<int> cand;
    for (int u : preds[v])
      if (img(u) == t) cand.insert(u);
    // a vertex above several copies of t constrains neither of them
    if (cand.size() != 1) return std::nullopt;
    return *cand.begin();
  };
  int n = (int)order.size();
  for (int v = 0; v < n; v++)
    for (int w = 0; w < n; w++) {
      if (v == w || !target.ie(img(v), img(w))) continue;
      bool ok = true;
      for (int t : dup) {
        auto iv = inst(v, t), iw = inst(w, t);
        if (iv && iw && *iv != *iw) ok = false;
      }
      if (ok) h.iedges.insert({v, w});
    }
  for (int v = 0; v < n; v++)
    for (int w = 0; w < n; w++) {
      if (v == w || !target.me(img(v), img(w))) continue;
      for (int p : on_path[v])
        if (on_path[w].count(p)) {
          h.medges.insert({v, w});
          break;
        }
    }
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto& [v, w] : std::set<std::pair<int, int>>(h.medges))
      for (auto& [x, y] : std::set<std::pair<int, int>>(h.medges))
        if (w == x && !h.me(v, y)) {
          h.medges.insert({v, y});
          grew = true;
        }
  }

  // axiom classes: each frame pair of a view links the two copies that its
  // own path runs through
  dsu cd;
  for (auto& [view, ids] : paths) {
    std::map<int, int> by_img, cnt;
    for (int u : ids) {
      by_img[img(u)] = u;
      cnt[img(u)]++;
    }
    for (auto& [x, y] : fr.view_pairs[view]) {
      if (x == y) continue;
      if (cnt[x] == 1 && cnt[y] == 1) cd.unite(by_img[x], by_img[y]);
    }
  }
  std::map<int, std::vector<int>> by_root;
  for (int v = 0; v < n; v++) by_root[cd.find(v)].push_back(v);
  combinatorial_proof c;
  c.logic = logic;
  c.conclusion = f;
  c.net.arena = h;
  for (auto& [root, members] : by_root) {
    std::sort(members.begin(), members.end());
    c.net.classes.push_back(members);
  }
  std::sort(c.net.classes.begin(), c.net.classes.end());
  c.map.source = h;
  c.map.target = target;
  for (int v = 0; v < n; v++) c.map.assign[v] = img(v);
  auto rep = check_icp(c);
  if (!rep.ok)
    throw std::runtime_error("reconstruction is not a certificate: " +
                             rep.layer + ": " + rep.detail);
  return c;
}

std::optional<strategy> find_wis(const formula_ptr& f,
                                 const std::string& logic) {
  auto a = arena_of(f);
  auto info = vertex_info(a);
  auto roots = iroots(a);
  std::set<std::vector<int>> views = {{}};
  std::optional<strategy> res;
  long steps = 0;
  std::function<bool()> search = [&]() -> bool {
    if (++steps > kenum_bound)
      throw std::runtime_error("strategy search bound exceeded");
    for (auto& p : views) {
      if (p.size() % 2 != 0) continue;
      for (int m : forced_successors(a, info, roots, p)) {
        auto q = with(p, m);
        if (views.count(q)) continue;
        for (int m2 : answers(a, info, q)) {
          auto qa = with(q, m2);
          views.insert(q);
          views.insert(qa);
          if (search()) return true;
          views.erase(q);
          views.erase(qa);
        }
        return false;
      }
    }
    strategy st{views};
    if (!check_wis(a, st).ok) return false;
    if (!check_framed(a, st, logic).ok) return false;
    // framedness does not subsume the acyclicity of the reconstructed net,
    // so a strategy only wins if it decontracts to a valid certificate
    try {
      icp_of_wis(f, st, logic);
    } catch (const std::runtime_error&) {
      return false;
    }
    res = st;
    return true;
  };
  if (search()) return res;
  return std::nullopt;
}

}  // namespace cml
