#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "cml/formula.hpp"

using namespace cml;

TEST_CASE("parse basics") {
  CHECK(print_formula(parse_formula("a")) == "a");
  CHECK(print_formula(parse_formula("a -> b -> c")) == "a -> b -> c");
  CHECK(print_formula(parse_formula("(a -> b) -> c")) == "(a -> b) -> c");
  CHECK(print_formula(parse_formula("a /\\ b /\\ c")) == "a /\\ b /\\ c");
  CHECK(print_formula(parse_formula("a /\\ (b /\\ c)")) == "a /\\ (b /\\ c)");
  CHECK(print_formula(parse_formula("box a -> dia b")) == "box a -> dia b");
  CHECK(print_formula(parse_formula("dia bot")) == "dia bot");
  CHECK(print_formula(parse_formula("box(a /\\ b)")) == "box (a /\\ b)");
  CHECK(print_formula(parse_formula("a /\\ b -> c")) == "a /\\ b -> c");
}

TEST_CASE("unicode aliases") {
  CHECK(equal(parse_formula("□(a⊃b)⊃(◇a⊃◇b)"),
              parse_formula("box(a -> b) -> (dia a -> dia b)")));
  CHECK(equal(parse_formula("a∧b"), parse_formula("a /\\ b")));
  CHECK(equal(parse_formula("◇⊥"), parse_formula("dia bot")));
}

TEST_CASE("parse shapes") {
  formula_ptr f = parse_formula("((b -> b) -> a) -> (a /\\ a)");
  REQUIRE(f->kind == fkind::implies);
  CHECK(f->left->kind == fkind::implies);
  CHECK(f->left->left->kind == fkind::implies);
  CHECK(f->right->kind == fkind::conj);
  formula_ptr k2 = parse_formula("box(a -> b) -> (dia a -> dia b)");
  REQUIRE(k2->kind == fkind::implies);
  CHECK(k2->left->kind == fkind::box);
  CHECK(k2->right->left->kind == fkind::dia);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_formula("(a -> b"), parse_error);
  CHECK_THROWS_AS(parse_formula("a -> -> b"), parse_error);
  CHECK_THROWS_AS(parse_formula("a @ b"), parse_error);
  CHECK_THROWS_AS(parse_formula("bot"), parse_error);
  CHECK_THROWS_AS(parse_formula("box bot"), parse_error);
  CHECK_THROWS_AS(parse_formula("a b"), parse_error);
}

TEST_CASE("formula tree") {
  formula_ptr f = parse_formula("box(dia bot -> (a /\\ b)) -> ((c -> d) /\\ e)");
  formula_tree t = build_tree(f);
  CHECK((int)t.nodes.size() == tree_size(f));
  CHECK(t.nodes[0].label == "->");

  auto labels = [&](const std::vector<int>& ns) {
    std::multiset<std::string> s;
    for (int n : ns) s.insert(t.nodes[n].label);
    return s;
  };
  CHECK(labels(rightmost_descendants(t, 0)) == std::multiset<std::string>{"d", "e"});
  CHECK(labels(second_rightmost_descendants(t, 0)) ==
        std::multiset<std::string>{"box", "a", "b"});
}

TEST_CASE("tree of single atom") {
  formula_tree t = build_tree(parse_formula("a"));
  REQUIRE(t.nodes.size() == 1);
  CHECK(t.nodes[0].label == "a");
  CHECK(rightmost_descendants(t, 0) == std::vector<int>{0});
}

TEST_CASE("polarize") {
  {
    auto p = polarize(parse_formula("a -> b"), pol::out);
    // nodes: 0 ->, 1 a, 2 b
    CHECK(p[1] == pol::in);
    CHECK(p[2] == pol::out);
  }
  {
    // ((b->b)->a) at in: 0 ->, 1 -> (out), 2 b (in), 3 b (out), 4 a (in)
    auto p = polarize(parse_formula("(b -> b) -> a"), pol::in);
    CHECK(p[0] == pol::in);
    CHECK(p[1] == pol::out);
    CHECK(p[2] == pol::in);
    CHECK(p[3] == pol::out);
    CHECK(p[4] == pol::in);
  }
  {
    auto p = polarize(parse_formula("box a"), pol::out);
    CHECK(p[0] == pol::out);
    CHECK(p[1] == pol::out);
  }
  CHECK_THROWS_AS(polarize(parse_formula("dia bot"), pol::out), polarize_error);
  CHECK_THROWS_AS(polarize(parse_formula("a -> dia bot"), pol::out), polarize_error);
  CHECK_NOTHROW(polarize(parse_formula("dia bot -> a"), pol::out));
}

TEST_CASE("iso_equal examples") {
  auto iso = [](const char* a, const char* b) {
    return iso_equal(parse_formula(a), parse_formula(b));
  };
  CHECK(iso("(a /\\ b) -> c", "a -> (b -> c)"));
  CHECK(iso("a /\\ b", "b /\\ a"));
  CHECK(iso("(a /\\ b) /\\ c", "a /\\ (b /\\ c)"));
  CHECK(iso("(a /\\ b) -> c", "b -> (a -> c)"));
  CHECK_FALSE(iso("a -> b", "b -> a"));
  CHECK_FALSE(iso("box(a /\\ b)", "box a /\\ box b"));
  CHECK_FALSE(iso("a -> (b /\\ c)", "(a -> b) /\\ (a -> c)"));
  CHECK(iso("box a", "box a"));
}

// random formula generator shared by the property suites
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

TEST_CASE("parse/print round trip on random corpus") {
  std::mt19937 rng(12345);
  for (int i = 0; i < 10000; i++) {
    formula_ptr f = random_formula(rng, 1 + (int)(rng() % 30), 4, true);
    CHECK(equal(parse_formula(print_formula(f)), f));
  }
}

TEST_CASE("polarity forcing is stable") {
  std::mt19937 rng(999);
  for (int i = 0; i < 500; i++) {
    formula_ptr f = random_formula(rng, 1 + (int)(rng() % 20), 3, false);
    formula_tree t = build_tree(f);
    auto p = polarize(f, pol::out);
    // recompute each node's polarity by counting implication left-turns
    for (size_t v = 0; v < t.nodes.size(); v++) {
      int flips = 0;
      int cur = (int)v;
      while (t.nodes[cur].parent != -1) {
        int par = t.nodes[cur].parent;
        if (t.nodes[par].label == "->" && t.nodes[par].children[0] == cur) flips++;
        cur = par;
      }
      CHECK(p[v] == (flips % 2 == 0 ? pol::out : pol::in));
    }
  }
}

TEST_CASE("iso_equal is an equivalence relation implied by equality") {
  std::mt19937 rng(777);
  std::vector<formula_ptr> fs;
  for (int i = 0; i < 60; i++)
    fs.push_back(random_formula(rng, 1 + (int)(rng() % 10), 2, false));
  for (auto& f : fs) CHECK(iso_equal(f, f));
  for (auto& f : fs)
    for (auto& g : fs) {
      if (equal(f, g)) CHECK(iso_equal(f, g));
      CHECK(iso_equal(f, g) == iso_equal(g, f));
    }
  for (auto& f : fs)
    for (auto& g : fs)
      for (auto& h : fs)
        if (iso_equal(f, g) && iso_equal(g, h)) CHECK(iso_equal(f, h));
}
