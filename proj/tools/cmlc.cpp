#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cml/dot.hpp"
#include "cml/json_io.hpp"

using namespace cml;
namespace fs = std::filesystem;

namespace {

struct options {
  std::string verb, input, logic = "CK", system, dir, out;
  int depth = 0, contraction_budget = 2;
  bool pretty = false;
};

struct outcome {
  int code;          // 0 accepted/produced, 1 rejected, 2 parse/IO error
  std::string text;  // report or produced document
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// json-verb inputs are files; formula verbs accept inline text as well
std::string payload(const options& o, const std::string& path) {
  if (fs::exists(path)) return slurp(path);
  if (o.verb == "to-arena" || o.verb == "prove") return path;
  throw std::invalid_argument("no such file: " + path);
}

sequent goal_of(const std::string& text) {
  if (text.find("|-") != std::string::npos) return parse_sequent(text);
  return sequent{{}, parse_formula(text)};
}

outcome run_verb(const options& o, const std::string& text) {
  bool pp = o.pretty;
  if (o.verb == "check-icp") {
    auto r = check_icp(icp_from_json(text));
    return {r.ok ? 0 : 1, report_json(r.ok, r.layer, r.detail, {}, pp)};
  }
  if (o.verb == "check-net") {
    auto r = check_net(net_from_json(text), o.logic);
    return {r.ok ? 0 : 1, report_json(r.ok, r.condition, r.detail, r.witness, pp)};
  }
  if (o.verb == "check-wis") {
    auto [f, s] = strategy_from_json(text);
    auto a = arena_of(f);
    auto r = check_wis(a, s);
    if (r.ok) r = check_framed(a, s, o.logic);
    return {r.ok ? 0 : 1, report_json(r.ok, r.clause, r.detail, r.view, pp)};
  }
  if (o.verb == "check-proof") {
    auto sys = o.system.empty() ? "LJ-" + o.logic + "-pol" : o.system;
    auto r = check_derivation(derivation_from_json(text), sys);
    return {r.ok ? 0 : 1, report_json(r.ok, r.error, r.where, {}, pp)};
  }
  if (o.verb == "to-arena")
    return {0, arena_to_json(arena_of(parse_formula(text)), pp)};
  if (o.verb == "to-wis") {
    auto c = icp_from_json(text);
    auto r = check_icp(c);
    if (!r.ok) return {1, report_json(false, r.layer, r.detail, {}, pp)};
    return {0, strategy_to_json(c.conclusion, wis_of_icp(c), pp)};
  }
  if (o.verb == "to-icp") {
    auto [f, s] = strategy_from_json(text);
    try {
      return {0, icp_to_json(icp_of_wis(f, s, o.logic), pp)};
    } catch (const std::runtime_error& e) {
      return {1, report_json(false, "strategy", e.what(), {}, pp)};
    }
  }
  if (o.verb == "decompose") {
    auto d = derivation_from_json(text);
    try {
      auto dec = decompose(d, o.logic);
      std::string j = "{\"linear\":" + derivation_to_json(dec.linear, pp) +
                      ",\"down\":" + derivation_to_json(dec.down, pp) + "}";
      return {0, j};
    } catch (const std::runtime_error& e) {
      return {1, report_json(false, "decompose", e.what(), {}, pp)};
    }
  }
  if (o.verb == "prove") {
    auto sys = o.system.empty() ? "LJ-" + o.logic + "-pol" : o.system;
    auto d = prove(goal_of(text), sys, {o.depth, o.contraction_budget});
    if (!d) return {1, report_json(false, "prover", "unproven at bounds", {}, pp)};
    return {0, derivation_to_json(*d, pp)};
  }
  if (o.verb == "emit-dot") {
    if (text.find("\"maximal_views\"") != std::string::npos) {
      auto [f, s] = strategy_from_json(text);
      return {0, strategy_dot(arena_of(f), s)};
    }
    if (text.find("\"conclusion\"") != std::string::npos)
      return {0, net_dot(icp_from_json(text).net)};
    if (text.find("\"assign\"") != std::string::npos)
      return {0, map_dot(map_from_json(text))};
    if (text.find("\"classes\"") != std::string::npos)
      return {0, net_dot(net_from_json(text))};
    return {0, arena_dot(arena_from_json(text))};
  }
  throw std::invalid_argument("unknown verb " + o.verb);
}

outcome run_one(const options& o, const std::string& path) {
  try {
    return run_verb(o, payload(o, path));
  } catch (const std::exception& e) {
    return {2, report_json(false, "input", e.what(), {}, o.pretty)};
  }
}

}  // namespace

int main(int argc, char** argv) {
  options o;
  CLI::App app{"combinatorial proofs and winning strategies for CK and CD"};
  app.add_option("verb", o.verb, "check-icp | check-wis | check-net | check-proof | "
                                 "to-arena | to-wis | to-icp | decompose | prove | emit-dot")
      ->required();
  app.add_option("input", o.input, "input file, formula or sequent");
  app.add_option("--logic", o.logic, "CK or CD")->check(CLI::IsMember({"CK", "CD"}));
  app.add_option("--system", o.system, "proof system for prove/check-proof");
  app.add_option("--depth", o.depth, "search depth bound (0 = default)");
  app.add_option("--contraction-budget", o.contraction_budget, "contractions per formula per branch");
  app.add_option("--dir", o.dir, "process every regular file in a directory");
  app.add_option("--out", o.out, "write the output to a file instead of stdout");
  app.add_flag("--pretty", o.pretty, "indent JSON output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::vector<std::pair<std::string, outcome>> results;
  if (!o.dir.empty()) {
    std::vector<std::string> files;
    try {
      for (const auto& entry : fs::directory_iterator(o.dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    } catch (const std::exception& e) {
      std::cout << report_json(false, "input", e.what(), {}, o.pretty) << "\n";
      return 2;
    }
    std::sort(files.begin(), files.end());
    results.resize(files.size());
    std::mutex mu;
    size_t next = 0;
    auto worker = [&] {
      while (true) {
        size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= files.size()) return;
          i = next++;
        }
        results[i] = {files[i], run_one(o, files[i])};
      }
    };
    unsigned n = std::min<unsigned>(std::thread::hardware_concurrency(), (unsigned)files.size());
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < std::max(1u, n); i++) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    if (o.input.empty()) {
      std::cout << report_json(false, "input", "missing input", {}, o.pretty) << "\n";
      return 2;
    }
    results.push_back({"", run_one(o, o.input)});
  }

  int code = 0;
  std::ostringstream body;
  for (const auto& [name, r] : results) {
    if (!name.empty()) body << name << ": ";
    body << r.text << "\n";
    code = std::max(code, r.code);
  }
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) {
      std::cout << report_json(false, "input", "cannot write " + o.out, {}, o.pretty) << "\n";
      return 2;
    }
    out << body.str();
  } else {
    std::cout << body.str();
  }
  return code;
}
