#include "cml/json_io.hpp"

#include <stdexcept>

#include "json.hpp"

namespace cml {

using nlohmann::json;

namespace {

std::string dump(const json& j, bool pretty) { return pretty ? j.dump(2) : j.dump(); }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("json: ") + e.what());
  }
}

template <typename F>
auto guarded(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("json: ") + e.what());
  }
}

json arena_json(const modal_arena& a) {
  json vs = json::array(), ie = json::array(), me = json::array();
  for (const auto& [v, l] : a.labels) vs.push_back({{"id", v}, {"label", l}});
  for (const auto& [v, w] : a.iedges) ie.push_back({v, w});
  for (const auto& [v, w] : a.medges) me.push_back({v, w});
  return {{"vertices", vs}, {"iedges", ie}, {"medges", me}};
}

modal_arena arena_value(const json& j) {
  modal_arena a;
  for (const auto& v : j.at("vertices"))
    a.labels[v.at("id").get<int>()] = v.at("label").get<std::string>();
  for (const auto& e : j.at("iedges")) a.iedges.insert({e.at(0).get<int>(), e.at(1).get<int>()});
  for (const auto& e : j.at("medges")) a.medges.insert({e.at(0).get<int>(), e.at(1).get<int>()});
  return a;
}

json net_json(const arena_net& p) {
  json j = arena_json(p.arena);
  j["classes"] = p.classes;
  return j;
}

arena_net net_value(const json& j) {
  arena_net p;
  p.arena = arena_value(j);
  for (const auto& c : j.at("classes")) p.classes.push_back(c.get<std::vector<int>>());
  return p;
}

json map_json(const skew_map& m) {
  json as = json::array();
  for (const auto& [v, w] : m.assign) as.push_back({v, w});
  return {{"source", arena_json(m.source)}, {"target", arena_json(m.target)}, {"assign", as}};
}

skew_map map_value(const json& j) {
  skew_map m;
  m.source = arena_value(j.at("source"));
  m.target = arena_value(j.at("target"));
  for (const auto& e : j.at("assign")) m.assign[e.at(0).get<int>()] = e.at(1).get<int>();
  return m;
}

json deriv_json(const derivation_ptr& d) {
  json j = {{"rule", d->rule}, {"sequent", print_sequent(d->concl)}};
  if (!d->context_path.empty()) j["context_path"] = d->context_path;
  json ps = json::array();
  for (const auto& p : d->premises) ps.push_back(deriv_json(p));
  j["premises"] = ps;
  return j;
}

derivation_ptr deriv_value(const json& j) {
  auto d = mk_deriv(j.at("rule").get<std::string>(),
                    parse_sequent(j.at("sequent").get<std::string>()));
  if (j.contains("context_path")) d->context_path = j.at("context_path").get<std::vector<int>>();
  for (const auto& p : j.at("premises")) d->premises.push_back(deriv_value(p));
  return d;
}

}  // namespace

std::string arena_to_json(const modal_arena& a, bool pretty) {
  return dump(arena_json(a), pretty);
}

modal_arena arena_from_json(const std::string& text) {
  return guarded([&] { return arena_value(parse(text)); });
}

std::string net_to_json(const arena_net& p, bool pretty) { return dump(net_json(p), pretty); }

arena_net net_from_json(const std::string& text) {
  return guarded([&] { return net_value(parse(text)); });
}

std::string map_to_json(const skew_map& m, bool pretty) { return dump(map_json(m), pretty); }

skew_map map_from_json(const std::string& text) {
  return guarded([&] { return map_value(parse(text)); });
}

std::string icp_to_json(const combinatorial_proof& c, bool pretty) {
  json j = {{"net", net_json(c.net)},
            {"map", map_json(c.map)},
            {"conclusion", print_formula(c.conclusion)},
            {"logic", c.logic}};
  return dump(j, pretty);
}

combinatorial_proof icp_from_json(const std::string& text) {
  return guarded([&] {
    auto j = parse(text);
    combinatorial_proof c;
    c.net = net_value(j.at("net"));
    c.map = map_value(j.at("map"));
    c.conclusion = parse_formula(j.at("conclusion").get<std::string>());
    c.logic = j.at("logic").get<std::string>();
    if (c.logic != "CK" && c.logic != "CD")
      throw std::runtime_error("json: unknown logic " + c.logic);
    return c;
  });
}

std::string strategy_to_json(const formula_ptr& f, const strategy& s, bool pretty) {
  json j = {{"arena", print_formula(f)}, {"maximal_views", maximal_views(s)}};
  return dump(j, pretty);
}

std::pair<formula_ptr, strategy> strategy_from_json(const std::string& text) {
  return guarded([&] {
    auto j = parse(text);
    auto f = parse_formula(j.at("arena").get<std::string>());
    std::vector<std::vector<int>> mx;
    for (const auto& v : j.at("maximal_views")) mx.push_back(v.get<std::vector<int>>());
    return std::pair{f, strategy_of_maximal(mx)};
  });
}

std::string derivation_to_json(const derivation_ptr& d, bool pretty) {
  return dump(deriv_json(d), pretty);
}

derivation_ptr derivation_from_json(const std::string& text) {
  return guarded([&] { return deriv_value(parse(text)); });
}

std::string report_json(bool ok, const std::string& layer, const std::string& detail,
                        const std::vector<int>& witness, bool pretty) {
  json j = {{"ok", ok}};
  if (!layer.empty()) j["layer"] = layer;
  if (!witness.empty()) j["witness"] = witness;
  if (!detail.empty()) j["detail"] = detail;
  return dump(j, pretty);
}

}  // namespace cml
