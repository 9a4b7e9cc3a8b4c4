#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "cml/json_io.hpp"
#include "doctest.h"

using namespace cml;
namespace fs = std::filesystem;

namespace {

struct run_result {
  int code;
  std::string out;
};

run_result run(const std::string& args) {
  const char* bin = std::getenv("CMLC_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "CMLC_BIN is not set");
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WEXITSTATUS(status), out};
}

fs::path scratch() {
  auto d = fs::temp_directory_path() / "cmlc_test";
  fs::create_directories(d);
  return d;
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

combinatorial_proof pipeline(const std::string& f, const std::string& logic) {
  auto d = prove(parse_sequent("|- " + f), "LJ-" + logic + "-pol");
  REQUIRE(d.has_value());
  auto dec = decompose(*d, logic);
  return icp_of_factorised_proof(dec.linear, dec.down, logic);
}

}  // namespace

TEST_CASE("json round trips") {
  auto c = pipeline("box ((b -> b) -> a) -> (dia c -> dia (a /\\ a))", "CK");
  auto c2 = icp_from_json(icp_to_json(c));
  CHECK(c2.net == c.net);
  CHECK(c2.map == c.map);
  CHECK(c2.logic == c.logic);
  CHECK(equal(c2.conclusion, c.conclusion));
  auto c3 = icp_from_json(icp_to_json(c, true));  // pretty form parses the same
  CHECK(c3.net == c.net);

  auto a = arena_of(parse_formula("box a -> dia a"));
  CHECK(arena_from_json(arena_to_json(a)) == a);
  CHECK(map_from_json(map_to_json(c.map)) == c.map);

  auto s = wis_of_icp(c);
  auto [f2, s2] = strategy_from_json(strategy_to_json(c.conclusion, s));
  CHECK(equal(f2, c.conclusion));
  CHECK(s2 == s);

  auto d = prove(parse_sequent("|- a -> a /\\ a"), "LJ-CK-pol");
  auto d2 = derivation_from_json(derivation_to_json(*d));
  CHECK(check_derivation(d2, "LJ-CK-pol").ok);
  CHECK(derivation_to_json(d2) == derivation_to_json(*d));

  CHECK_THROWS_AS(arena_from_json("{"), std::runtime_error);
  CHECK_THROWS_AS(icp_from_json("{\"net\":{}}"), std::runtime_error);
}

TEST_CASE("certificate checking and conversion through the binary") {
  auto dir = scratch();
  auto c = pipeline("box ((b -> b) -> a) -> (dia c -> dia (a /\\ a))", "CK");
  put(dir / "fig1.icp.json", icp_to_json(c));

  CHECK(run("check-icp " + (dir / "fig1.icp.json").string()).code == 0);

  auto wis = run("to-wis " + (dir / "fig1.icp.json").string());
  CHECK(wis.code == 0);
  auto [f, s] = strategy_from_json(wis.out);
  CHECK(maximal_views(s) ==
        std::vector<std::vector<int>>{{10, 8}, {12, 6, 5, 4}, {13, 6, 5, 4}});

  // a corrupted class is rejected at the net layer
  auto bad = c;
  bad.net.classes.push_back({bad.net.classes.back().back()});
  bad.net.classes[bad.net.classes.size() - 2].pop_back();
  put(dir / "bad.icp.json", icp_to_json(bad));
  auto r = run("check-icp " + (dir / "bad.icp.json").string());
  CHECK(r.code == 1);
  CHECK(r.out.find("\"layer\":\"net\"") != std::string::npos);

  put(dir / "fig1.net.json", net_to_json(c.net));
  CHECK(run("check-net " + (dir / "fig1.net.json").string() + " --logic CK").code == 0);
}

TEST_CASE("strategies through the binary") {
  auto dir = scratch();
  auto f = parse_formula("box a -> dia a");
  put(dir / "d.wis.json",
      strategy_to_json(f, strategy_of_maximal({{4, 2}})));

  CHECK(run("check-wis " + (dir / "d.wis.json").string() + " --logic CD").code == 0);
  auto r = run("check-wis " + (dir / "d.wis.json").string() + " --logic CK");
  CHECK(r.code == 1);
  CHECK(r.out.find("CK-framed") != std::string::npos);

  auto icp = run("to-icp " + (dir / "d.wis.json").string() + " --logic CD");
  CHECK(icp.code == 0);
  auto c = icp_from_json(icp.out);
  CHECK(check_icp(c).ok);
  CHECK(c.logic == "CD");
}

TEST_CASE("prover and proof checking through the binary") {
  auto dir = scratch();
  auto k1 = run("prove \"box (a -> b) -> (box a -> box b)\" --logic CK --out " +
                (dir / "k1.deriv.json").string());
  CHECK(k1.code == 0);
  CHECK(run("check-proof " + (dir / "k1.deriv.json").string() + " --system LJ-CK-pol").code == 0);

  auto dec = run("decompose " + (dir / "k1.deriv.json").string() + " --logic CK");
  CHECK(dec.code == 0);
  CHECK(dec.out.find("\"linear\"") != std::string::npos);
  CHECK(dec.out.find("\"down\"") != std::string::npos);

  auto no = run("prove \"box a -> a\" --logic CK");
  CHECK(no.code == 1);
  CHECK(no.out.find("unproven at bounds") != std::string::npos);
  CHECK(run("prove \"box a -> dia a\" --logic CD").code == 0);
  CHECK(run("prove \"box a -> dia a\" --logic CK").code == 1);
  CHECK(run("prove \"a |- a\" --system LJ-CK-pol").code == 0);
}

TEST_CASE("dot emission and error codes") {
  auto dir = scratch();
  auto arena = run("to-arena \"box (a -> b) -> (box a -> box b)\"");
  CHECK(arena.code == 0);
  put(dir / "k1.arena.json", arena.out);

  auto dot = run("emit-dot " + (dir / "k1.arena.json").string());
  CHECK(dot.code == 0);
  CHECK(dot.out.find("digraph arena") != std::string::npos);
  CHECK(dot.out.find("style=dashed") != std::string::npos);
  CHECK(dot.out.find("shape=box") != std::string::npos);

  auto c = pipeline("box (a -> b) -> (box a -> box b)", "CK");
  put(dir / "k1.icp.json", icp_to_json(c));
  auto ndot = run("emit-dot " + (dir / "k1.icp.json").string());
  CHECK(ndot.code == 0);
  CHECK(ndot.out.find("color=blue") != std::string::npos);

  put(dir / "k1.wis.json", strategy_to_json(c.conclusion, wis_of_icp(c)));
  auto sdot = run("emit-dot " + (dir / "k1.wis.json").string());
  CHECK(sdot.code == 0);
  CHECK(sdot.out.find("cluster_view0") != std::string::npos);

  put(dir / "broken.json", "{not json");
  CHECK(run("check-icp " + (dir / "broken.json").string()).code == 2);
  CHECK(run("check-icp " + (dir / "missing.json").string()).code == 2);
  CHECK(run("frobnicate x").code == 2);
}

TEST_CASE("batch mode over a directory") {
  auto dir = scratch() / "batch";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto c = pipeline("dia a -> dia a", "CK");
  put(dir / "good.icp.json", icp_to_json(c));
  auto bad = c;
  bad.net.classes.pop_back();
  put(dir / "bad.icp.json", icp_to_json(bad));

  auto r = run("check-icp --dir " + dir.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("good.icp.json: {\"ok\":true}") != std::string::npos);
  CHECK(r.out.find("bad.icp.json: {") != std::string::npos);
  CHECK(r.out.find("\"ok\":false") != std::string::npos);
}
