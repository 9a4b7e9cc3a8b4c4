#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cml/arena.hpp"
#include "cml/formula.hpp"
#include "cml/sequent.hpp"
#include "cml/skew.hpp"

using namespace cml;

namespace {

modal_arena ar(const std::string& f) { return arena_of(parse_formula(f)); }

skew_map mk_map(const std::string& src, const std::string& tgt,
                std::map<int, int> assign) {
  return skew_map{ar(src), ar(tgt), std::move(assign)};
}

derivation_ptr hyp_node(const std::string& goal) {
  return mk_deriv("hyp", sequent{{}, parse_formula(goal)});
}

derivation_ptr step(const std::string& rule, derivation_ptr prem,
                    const std::string& concl, std::vector<int> path) {
  return mk_deriv(rule, sequent{{}, parse_formula(concl)}, {std::move(prem)},
                  std::move(path));
}

void count_ops(const gen_ptr& g, std::map<std::string, int>& out) {
  out[g->op]++;
  for (auto& k : g->kids) count_ops(k, out);
}

}  // namespace

TEST_CASE("identity maps are fibrations of either kind") {
  for (const char* f :
       {"a", "a -> b", "(a /\\ b) -> c", "box((b -> b) -> a) -> (dia c -> dia(a /\\ a))",
        "box(a -> b) -> (box a -> box b)", "dia bot -> dia(a -> a)"}) {
    auto m = identity_map(ar(f));
    CHECK_MESSAGE(check_fibration(m, "even").ok, f);
    CHECK_MESSAGE(check_fibration(m, "odd").ok, f);
    CHECK(compose(m, m) == m);
  }
}

TEST_CASE("empty map is odd only") {
  skew_map m{modal_arena{}, ar("a -> b"), {}};
  CHECK(check_fibration(m, "odd").ok);
  auto r = check_fibration(m, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "empty");
}

TEST_CASE("clause rejections name the violation") {
  // a-vertex onto a b-vertex
  auto lab = mk_map("a", "b", {{0, 0}});
  auto r = check_fibration(lab, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "label");

  // depth 0 onto depth 1
  auto dep = mk_map("a", "a -> b", {{0, 1}});
  r = check_fibration(dep, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "depth");

  // ⊸-edge with no image edge
  auto ied = mk_map("a -> b", "(a -> c) /\\ b", {{1, 2}, {2, 4}});
  r = check_fibration(ied, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "iedge");

  // a disjunct pair onto a pair that is not disjunct
  auto dj = mk_map("(a -> c) -> ((a -> c) -> d)", "((a /\\ a) -> c) -> d",
                   {{2, 3}, {3, 5}, {6, 4}, {7, 5}, {8, 6}});
  r = check_fibration(dj, "odd");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "disjunct");

  // root-level weakening has no lifting
  auto lift = mk_map("a", "a /\\ b", {{0, 1}});
  r = check_fibration(lift, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "lifting");

  // image modality acquires a ↝-successor with no source counterpart
  auto mod = mk_map("box a /\\ b", "box(a /\\ b)", {{1, 0}, {2, 2}, {3, 3}});
  r = check_fibration(mod, "even");
  CHECK_FALSE(r.ok);
  CHECK(r.clause == "modal");
}

TEST_CASE("fibration of single deep steps") {
  // weakened conjunct: a -> b into (a /\ c) -> b
  auto d1 = step("deep_w_conj", hyp_node("a -> b"), "(a /\\ c) -> b", {-1, 0});
  auto f1 = fibration_of_derivation(d1);
  CHECK(f1.assign == std::map<int, int>({{1, 2}, {2, 4}}));
  CHECK(check_fibration(f1, "even").ok);

  // weakened premise: a into c -> a
  auto d2 = step("deep_w_imp", hyp_node("a"), "c -> a", {-1});
  auto f2 = fibration_of_derivation(d2);
  CHECK(f2.assign == std::map<int, int>({{0, 2}}));
  CHECK(check_fibration(f2, "even").ok);

  // weakened diamond: dia bot -> b into dia a -> b
  auto d3 = step("deep_w_dia", hyp_node("dia bot -> b"), "dia a -> b", {-1, 0});
  auto f3 = fibration_of_derivation(d3);
  CHECK(f3.assign == std::map<int, int>({{1, 1}, {3, 3}}));
  CHECK(check_fibration(f3, "even").ok);

  // contraction: (a /\ a) -> b folds onto a -> b
  auto d4 = step("deep_c", hyp_node("(a /\\ a) -> b"), "a -> b", {-1, 0});
  auto f4 = fibration_of_derivation(d4);
  CHECK(f4.assign == std::map<int, int>({{2, 1}, {3, 1}, {4, 2}}));
  CHECK(check_fibration(f4, "even").ok);

  // empty chain: identity
  auto f5 = fibration_of_derivation(hyp_node("box a -> dia a"));
  CHECK(f5 == identity_map(ar("box a -> dia a")));
}

TEST_CASE("composition of contraction steps is the 3-to-1 collapse") {
  auto inner = step("deep_c", hyp_node("((a /\\ a) /\\ a) -> b"),
                    "(a /\\ a) -> b", {-1, 0, 0});
  auto outer = step("deep_c", hyp_node("(a /\\ a) -> b"), "a -> b", {-1, 0});
  auto f = fibration_of_derivation(inner);
  auto g = fibration_of_derivation(outer);
  auto h = compose(f, g);
  CHECK(h.assign == std::map<int, int>({{3, 1}, {4, 1}, {5, 1}, {6, 2}}));
  CHECK(check_fibration(h, "even").ok);
  // identity laws and mismatch
  CHECK(compose(identity_map(f.source), f) == f);
  CHECK(compose(f, identity_map(f.target)) == f);
  CHECK_THROWS(compose(g, f));
  // the two-step chain gives the same map as the composition
  auto chained = step("deep_c", inner, "a -> b", {-1, 0});
  CHECK(fibration_of_derivation(chained) == h);
}

TEST_CASE("golden: duplicated branch with a weakened diamond") {
  // the canonical fibration behind the proof of
  // box((b -> b) -> a) -> (dia c -> dia(a /\ a)) obtained from one
  // contraction and one weakening
  std::string src =
      "box(((b -> b) -> a) /\\ ((b -> b) -> a)) -> (dia bot -> dia(a /\\ a))";
  std::string tgt = "box((b -> b) -> a) -> (dia c -> dia(a /\\ a))";
  skew_map m = mk_map(src, tgt,
                      {{1, 1},
                       {5, 4},
                       {6, 5},
                       {7, 6},
                       {10, 4},
                       {11, 5},
                       {12, 6},
                       {14, 8},
                       {16, 10},
                       {18, 12},
                       {19, 13}});
  auto r = check_fibration(m, "even");
  CHECK_MESSAGE(r.ok, r.clause, " ", r.detail);

  auto dec = decompose_fibration(m);
  std::map<std::string, int> ops;
  count_ops(dec.tree, ops);
  CHECK(ops["pair"] == 1);
  CHECK(ops["empty"] == 1);
  CHECK(check_derivation(dec.down, "downLJ").ok);
  // exactly one deep contraction (the duplicated branch) and one deep
  // diamond weakening (the dropped c)
  std::vector<std::pair<std::string, std::vector<int>>> rules;
  for (auto n = dec.down; n->rule != "hyp"; n = n->premises[0])
    rules.push_back({n->rule, n->context_path});
  // the chain runs over the uncurried rendering (A /\ B) -> C of the target,
  // with the contraction above the weakening
  REQUIRE(rules.size() == 2);
  CHECK(rules[1] ==
        std::pair<std::string, std::vector<int>>("deep_c", {-1, 0, 0, 0}));
  CHECK(rules[0] ==
        std::pair<std::string, std::vector<int>>("deep_w_dia", {-1, 0, 1}));
  CHECK(skew_equivalent(fibration_of_derivation(dec.down), m));
}

TEST_CASE("small decompositions") {
  // identity: one id leaf, bare hyp chain
  auto id = identity_map(ar("box a -> dia a"));
  auto dec = decompose_fibration(id);
  CHECK(dec.tree->op == "id");
  CHECK(dec.tree->kids.empty());
  CHECK(dec.down->rule == "hyp");
  CHECK(fibration_of_derivation(dec.down) == id);

  // 2-to-1 collapse in context: pairing of two identities, one contraction
  auto fold = mk_map("(a /\\ a) -> b", "a -> b", {{2, 1}, {3, 1}, {4, 2}});
  auto dfold = decompose_fibration(fold);
  std::map<std::string, int> ops;
  count_ops(dfold.tree, ops);
  CHECK(ops["pair"] == 1);
  CHECK(ops["id"] == 3);
  derivation_ptr n = dfold.down;
  CHECK(n->rule == "deep_c");
  CHECK(n->context_path == std::vector<int>({-1, 0}));
  CHECK(n->premises[0]->rule == "hyp");
  CHECK(fibration_of_derivation(dfold.down) == fold);
}

TEST_CASE("root-level fold passes the even check but is not decomposable") {
  // the deep contraction only applies at hypothesis occurrences, so this map
  // corresponds to no chain even though no clause rejects it
  auto fold = mk_map("a /\\ a", "a", {{1, 0}, {2, 0}});
  CHECK(check_fibration(fold, "even").ok);
  CHECK(check_fibration(fold, "odd").ok);
  CHECK_THROWS(decompose_fibration(fold));

  // same story for a fold on the conclusion side of an implication
  auto cfold = mk_map("(a /\\ a) -> (b /\\ b)", "(a /\\ a) -> b",
                      {{2, 2}, {3, 3}, {5, 4}, {6, 4}});
  CHECK(check_fibration(cfold, "even").ok);
  CHECK_THROWS(decompose_fibration(cfold));
}

TEST_CASE("round trip over derivation chains") {
  std::mt19937 rng(4242);
  const char* atoms[] = {"a", "b", "c"};
  std::function<formula_ptr(int)> gen = [&](int budget) -> formula_ptr {
    int r = (int)(rng() % 100);
    if (budget <= 1 || r < 25) return mk_atom(atoms[rng() % 3]);
    if (r < 55) {
      int l = 1 + (int)(rng() % (budget - 1));
      return mk_implies(gen(l), gen(budget - l));
    }
    if (r < 80) {
      int l = 1 + (int)(rng() % (budget - 1));
      return mk_conj(gen(l), gen(budget - l));
    }
    if (r < 90) return mk_box(gen(budget - 1));
    return mk_dia(gen(budget - 1));
  };
  int found = 0, nontrivial = 0;
  for (int i = 0; i < 400 && found < 40; i++) {
    formula_ptr f = gen(2 + (int)(rng() % 7));
    for (std::string logic : {"CK", "CD"}) {
      sequent s{{}, f};
      auto d = prove(s, "LJ-" + logic + "-pol");
      if (!d) continue;
      found++;
      INFO(print_formula(f), " in ", logic);
      auto dc = decompose(*d, logic);
      auto fib = fibration_of_derivation(dc.down);
      auto rep = check_fibration(fib, "even");
      CHECK_MESSAGE(rep.ok, rep.clause, " ", rep.detail);
      // depth preservation, checked independently of the fibration checker
      auto si = vertex_info(fib.source), ti = vertex_info(fib.target);
      for (auto& [v, w] : fib.assign) CHECK(si.at(v).depth == ti.at(w).depth);
      auto dec2 = decompose_fibration(fib);
      CHECK(check_derivation(dec2.down, "downLJ").ok);
      auto fib2 = fibration_of_derivation(dec2.down);
      CHECK_MESSAGE(skew_equivalent(fib, fib2), "round trip changed the map");
      if (fib.assign.size() != fib.target.labels.size()) nontrivial++;
    }
  }
  CHECK(found >= 40);
  CHECK(nontrivial >= 5);
}

TEST_CASE("closure under composition on chain splits") {
  std::mt19937 rng(999);
  const char* forms[] = {
      "a -> (a /\\ a)",
      "(a /\\ b) -> a",
      "box((b -> b) -> a) -> (dia c -> dia(a /\\ a))",
      "dia a -> (box b -> dia a)",
      "box(a -> b) -> (box a -> box b)",
      "a -> (b -> (a /\\ a))",
      "(a /\\ (b /\\ c)) -> (b /\\ b)",
  };
  int pairs = 0;
  for (const char* txt : forms) {
    for (std::string logic : {"CK", "CD"}) {
      auto d = prove(sequent{{}, parse_formula(txt)}, "LJ-" + logic + "-pol");
      if (!d) continue;
      auto dc = decompose(*d, logic);
      // per-step fibrations, composed pairwise front to back
      std::vector<derivation_ptr> chain;
      for (auto n = dc.down; n->rule != "hyp"; n = n->premises[0])
        chain.push_back(n);
      std::vector<skew_map> steps;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        auto one = mk_deriv((*it)->rule, (*it)->concl,
                            {mk_deriv("hyp", (*it)->premises[0]->concl)},
                            (*it)->context_path);
        steps.push_back(fibration_of_derivation(one));
      }
      if (steps.empty()) continue;
      skew_map acc = steps[0];
      for (size_t i = 1; i < steps.size(); ++i) {
        CHECK(check_fibration(steps[i], "even").ok);
        acc = compose(acc, steps[i]);
        CHECK(check_fibration(acc, "even").ok);
        pairs++;
      }
      CHECK(acc == fibration_of_derivation(dc.down));
    }
  }
  (void)rng;
  CHECK(pairs >= 4);
}

TEST_CASE("equivalence up to renaming") {
  auto f1 = mk_map("(a /\\ a) -> b", "a -> b", {{2, 1}, {3, 1}, {4, 2}});
  CHECK(skew_equivalent(f1, f1));
  // same fold written over a relabelled-but-isomorphic source
  auto f2 = f1;
  CHECK(skew_equivalent(f1, f2));
  auto g = mk_map("a -> b", "a -> b", {{1, 1}, {2, 2}});
  CHECK_FALSE(skew_equivalent(f1, g));
}
