#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cml/arena.hpp"

using namespace cml;

static formula_ptr random_formula(std::mt19937& rng, int budget, int atoms,
                                  bool allow_diabot) {
  std::uniform_int_distribution<int> pick(0, 99);
  if (budget <= 1) {
    if (allow_diabot && pick(rng) < 10) return mk_diabot();
    return mk_atom(std::string(1, (char)('a' + (int)(rng() % atoms))));
  }
  int r = pick(rng);
  if (r < 30) {
    int l = 1 + (int)(rng() % (budget - 1));
    return mk_implies(random_formula(rng, l, atoms, allow_diabot),
                      random_formula(rng, budget - l, atoms, false));
  }
  if (r < 60) {
    int l = 1 + (int)(rng() % (budget - 1));
    return mk_conj(random_formula(rng, l, atoms, allow_diabot),
                   random_formula(rng, budget - l, atoms, allow_diabot));
  }
  if (r < 75) return mk_box(random_formula(rng, budget - 1, atoms, allow_diabot));
  if (r < 90) return mk_dia(random_formula(rng, budget - 1, atoms, allow_diabot));
  return mk_atom(std::string(1, (char)('a' + (int)(rng() % atoms))));
}

TEST_CASE("arena of ((b->b)->a)->(a/\\a)") {
  modal_arena a = arena_of(parse_formula("((b -> b) -> a) -> (a /\\ a)"));
  // preorder: 0 ->, 1 ->, 2 ->, 3 b, 4 b, 5 a, 6 /\, 7 a, 8 a
  CHECK(a.labels == std::map<int, std::string>{{3, "b"}, {4, "b"}, {5, "a"}, {7, "a"}, {8, "a"}});
  CHECK(a.iedges == std::set<std::pair<int, int>>{{3, 4}, {4, 5}, {5, 7}, {5, 8}});
  CHECK(a.medges.empty());
  CHECK(iroots(a) == std::set<int>{7, 8});
  auto info = vertex_info(a);
  CHECK(info.at(7).depth == 0);
  CHECK(info.at(8).depth == 0);
  CHECK(info.at(5).depth == 1);
  CHECK(info.at(4).depth == 2);
  CHECK(info.at(3).depth == 3);
  CHECK_FALSE(info.at(5).even);
}

TEST_CASE("arena of the modal example formula") {
  modal_arena a =
      arena_of(parse_formula("box((b -> b) -> a) -> (dia c -> dia(a /\\ a))"));
  // 0 ->, 1 box, 2 ->, 3 ->, 4 b, 5 b, 6 a, 7 ->, 8 dia, 9 c, 10 dia, 11 /\, 12 a, 13 a
  CHECK(a.labels == std::map<int, std::string>{{1, "box"}, {4, "b"}, {5, "b"}, {6, "a"},
                                               {8, "dia"}, {9, "c"}, {10, "dia"},
                                               {12, "a"}, {13, "a"}});
  std::set<std::pair<int, int>> ie{{4, 5}, {5, 6}};
  for (int u : {1, 6, 8, 9})
    for (int v : {10, 12, 13}) ie.insert({u, v});
  CHECK(a.iedges == ie);
  CHECK(a.medges == std::set<std::pair<int, int>>{{1, 6}, {8, 9}, {10, 12}, {10, 13}});
  CHECK(iroots(a) == std::set<int>{10, 12, 13});
  CHECK(is_modal_arena(a).ok);
}

TEST_CASE("cones and pmv on the worked example") {
  modal_arena a =
      arena_of(parse_formula("(a -> box(b /\\ (c -> dia d))) -> dia(e -> f)"));
  // 0 ->, 1 ->, 2 a, 3 box, 4 /\, 5 b, 6 ->, 7 c, 8 dia, 9 d, 10 dia, 11 ->, 12 e, 13 f
  REQUIRE(is_modal_arena(a).ok);
  auto info = vertex_info(a);
  CHECK(info.at(3).cone == std::set<int>{5, 7, 8, 9});
  CHECK(info.at(8).cone == std::set<int>{9});
  CHECK(info.at(10).cone == std::set<int>{12, 13});
  CHECK(info.at(2).pmv == 2);
  CHECK(info.at(5).pmv == 3);
  CHECK(info.at(7).pmv == 3);
  CHECK(info.at(8).pmv == 3);
  CHECK(info.at(9).pmv == 8);
  CHECK(info.at(12).pmv == 10);
  CHECK(info.at(13).pmv == 10);
  CHECK(address(info, 9) == std::vector<int>{8, 3});
  CHECK(address(info, 2).empty());
}

TEST_CASE("meeting depth and conjunct") {
  {
    modal_arena a = arena_of(parse_formula("(a /\\ b) -> c"));
    // 0 ->, 1 /\, 2 a, 3 b, 4 c
    CHECK(meeting_depth(a, 2, 3) == 0);
    CHECK_FALSE(conjunct(a, 2, 3));
  }
  {
    modal_arena a = arena_of(parse_formula("(a /\\ b) -> (a /\\ b)"));
    // 0 ->, 1 /\, 2 a, 3 b, 4 /\, 5 a, 6 b
    // the hypotheses meet on the root cluster {5, 6}, as they do when the
    // codomain is a single atom
    CHECK(meeting_depth(a, 2, 3) == 0);
    CHECK_FALSE(conjunct(a, 2, 3));
    CHECK(meeting_depth(a, 5, 6) == -1);
    CHECK(conjunct(a, 5, 6));
  }
  {
    modal_arena a = arena_of(parse_formula("a -> b"));
    CHECK(meeting_depth(a, 1, 2) == 0);
  }
}

TEST_CASE("is_modal_arena rejects corruptions") {
  modal_arena a = arena_of(parse_formula("box(a -> b) -> (dia a -> dia b)"));
  REQUIRE(is_modal_arena(a).ok);
  {
    modal_arena c = a;
    c.iedges.insert({9, 9});
    CHECK(is_modal_arena(c).violation == "cyclic");
  }
  {
    modal_arena c = a;
    c.labels[1] = "z";  // ↝-source must stay modal
    CHECK(is_modal_arena(c).violation == "labeling");
  }
  {
    modal_arena c = a;
    c.medges.erase({1, 4});  // box without successor
    CHECK(is_modal_arena(c).violation == "labeling");
  }
  {
    // ⊸ between the two ↝-targets of one source
    modal_arena c = arena_of(parse_formula("box(a /\\ b) -> c"));
    // 0 ->, 1 box, 2 /\, 3 a, 4 b, 5 c
    c.iedges.insert({3, 4});
    arena_report r = is_modal_arena(c);
    CHECK_FALSE(r.ok);
  }
  {
    modal_arena c;
    CHECK(is_modal_arena(c).violation == "empty");
  }
  {
    // the L shape itself
    modal_arena c;
    c.labels = {{0, "a"}, {1, "b"}, {2, "c"}, {3, "d"}};
    c.iedges = {{0, 1}, {0, 2}, {2, 3}};
    CHECK(is_modal_arena(c).violation == "L-shape");
  }
  {
    // the Σ shape
    modal_arena c;
    c.labels = {{0, "a"}, {1, "b"}, {2, "u"}, {3, "w"}, {4, "v"}};
    c.iedges = {{0, 4}, {0, 3}, {1, 3}, {1, 2}};
    CHECK(is_modal_arena(c).violation == "Sigma-shape");
  }
}

TEST_CASE("modal axiom violations are caught") {
  // start from ⟦box(a -> b)⟧ = 1↝... built by hand: 0 box, 1 a, 2 b
  modal_arena a;
  a.labels = {{0, "box"}, {1, "a"}, {2, "b"}};
  a.iedges = {{1, 2}};
  a.medges = {{0, 2}};
  REQUIRE(is_modal_arena(a).ok);
  {
    modal_arena c = a;  // v↝w and u⊸v need u⊸w
    c.labels[3] = "c";
    c.iedges.insert({3, 0});
    CHECK(is_modal_arena(c).violation == "modal-axiom-4");
  }
  {
    modal_arena c = a;  // v↝w and v⊸u need w⊸u
    c.labels[3] = "c";
    c.iedges.insert({0, 3});
    CHECK(is_modal_arena(c).violation == "modal-axiom-5");
  }
  {
    modal_arena c = a;  // v↝w and w⊸u need v⊸u
    REQUIRE(c.medges.count({0, 2}));
    c.medges.erase({0, 2});
    c.medges.insert({0, 1});
    CHECK(is_modal_arena(c).violation == "modal-axiom-6");
  }
  {
    // missing transitive ↝
    modal_arena c;
    c.labels = {{0, "box"}, {1, "box"}, {2, "a"}};
    c.medges = {{0, 1}, {1, 2}};
    CHECK(is_modal_arena(c).violation == "modal-axiom-1");
  }
  {
    // incomparable ↝-predecessors of a shared target
    modal_arena c;
    c.labels = {{0, "box"}, {1, "box"}, {2, "a"}};
    c.medges = {{0, 2}, {1, 2}};
    CHECK(is_modal_arena(c).violation == "modal-axiom-2");
  }
}

TEST_CASE("arena validity and reconstruction on random corpus") {
  std::mt19937 rng(2024);
  int done = 0;
  for (int i = 0; i < 400; i++) {
    formula_ptr f = random_formula(rng, 1 + (int)(rng() % 14), 3, true);
    modal_arena a = arena_of(f);
    arena_report r = is_modal_arena(a);
    CHECK(r.ok);
    if (!r.ok) continue;

    // reconstruction: same formula modulo ~f, and the vertex correspondence
    // transports the arena exactly
    formula_of_result fo = formula_of(a);
    CHECK(iso_equal(fo.f, f));
    modal_arena b = arena_of(fo.f);
    CHECK(b.labels.size() == a.labels.size());
    modal_arena moved;
    for (auto& [v, l] : a.labels) moved.labels[fo.to_preorder.at(v)] = l;
    for (auto& [v, w] : a.iedges)
      moved.iedges.insert({fo.to_preorder.at(v), fo.to_preorder.at(w)});
    for (auto& [v, w] : a.medges)
      moved.medges.insert({fo.to_preorder.at(v), fo.to_preorder.at(w)});
    CHECK(moved == b);
    done++;
  }
  CHECK(done == 400);
}

TEST_CASE("modality and cone lemmas on random corpus") {
  std::mt19937 rng(5150);
  for (int i = 0; i < 300; i++) {
    formula_ptr f = random_formula(rng, 1 + (int)(rng() % 12), 3, true);
    modal_arena a = arena_of(f);
    auto info = vertex_info(a);
    std::set<int> roots = iroots(a);
    // v↝w: same depth, same root status, same ⊸-successors, ⊸-predecessors of
    // v also reach w
    for (auto& [v, w] : a.medges) {
      CHECK(info.at(v).depth == info.at(w).depth);
      CHECK(roots.count(v) == roots.count(w));
      for (auto& [x, y] : a.iedges) {
        if (x == v) CHECK(a.ie(w, y));
        if (x == w) CHECK(a.ie(v, y));
        if (y == v) CHECK(a.ie(x, w));
      }
    }
    // cones sharing a vertex are nested
    std::vector<int> modals;
    for (auto& [v, l] : a.labels)
      if (a.modal(v)) modals.push_back(v);
    for (int m1 : modals)
      for (int m2 : modals) {
        if (m1 == m2) continue;
        const auto &c1 = info.at(m1).cone, &c2 = info.at(m2).cone;
        bool meet = false;
        for (int x : c1) meet |= c2.count(x) != 0;
        if (meet) {
          bool nested = std::includes(c1.begin(), c1.end(), c2.begin(), c2.end()) ||
                        std::includes(c2.begin(), c2.end(), c1.begin(), c1.end());
          CHECK(nested);
        }
      }
  }
}

TEST_CASE("formula_of rejects graphs that are not arenas of formulas") {
  modal_arena a;
  a.labels = {{0, "box"}};
  CHECK_THROWS_AS(formula_of(a), std::runtime_error);
}

TEST_CASE("arena isomorphism") {
  CHECK(arena_isomorphic(arena_of(parse_formula("a /\\ b")),
                         arena_of(parse_formula("b /\\ a"))));
  CHECK(arena_isomorphic(arena_of(parse_formula("(a /\\ b) -> c")),
                         arena_of(parse_formula("a -> (b -> c)"))));
  CHECK_FALSE(arena_isomorphic(arena_of(parse_formula("a -> b")),
                               arena_of(parse_formula("b -> b"))));
  CHECK_FALSE(arena_isomorphic(arena_of(parse_formula("box a")),
                               arena_of(parse_formula("dia a"))));
}
