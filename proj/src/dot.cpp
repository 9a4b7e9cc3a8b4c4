#include "cml/dot.hpp"

#include <sstream>

namespace cml {

namespace {

std::string vname(const modal_arena& a, int v) {
  return a.labels.at(v) + "_" + std::to_string(v);
}

void nodes_and_edges(std::ostream& os, const modal_arena& a, const std::string& prefix) {
  for (const auto& [v, l] : a.labels)
    os << "  " << prefix << v << " [label=\"" << vname(a, v) << "\""
       << (a.modal(v) ? ", shape=box" : ", shape=ellipse") << "];\n";
  for (const auto& [v, w] : a.iedges)
    os << "  " << prefix << v << " -> " << prefix << w << ";\n";
  for (const auto& [v, w] : a.medges) {
    bool direct = true;  // skip the transitive fill-in
    for (const auto& [x, y] : a.medges)
      if (x == v && y != w && a.me(y, w)) direct = false;
    if (direct)
      os << "  " << prefix << v << " -> " << prefix << w << " [style=dashed];\n";
  }
}

}  // namespace

std::string arena_dot(const modal_arena& a) {
  std::ostringstream os;
  os << "digraph arena {\n";
  nodes_and_edges(os, a, "v");
  os << "}\n";
  return os.str();
}

std::string net_dot(const arena_net& p) {
  std::ostringstream os;
  os << "digraph net {\n";
  nodes_and_edges(os, p.arena, "v");
  for (const auto& c : p.classes)
    for (size_t i = 0; i + 1 < c.size(); i++)
      os << "  v" << c[i] << " -> v" << c[i + 1]
         << " [style=dashed, color=blue, dir=none, constraint=false];\n";
  os << "}\n";
  return os.str();
}

std::string map_dot(const skew_map& m) {
  std::ostringstream os;
  os << "digraph map {\n";
  os << "  subgraph cluster_source {\n  label=\"source\";\n";
  nodes_and_edges(os, m.source, "s");
  os << "  }\n";
  os << "  subgraph cluster_target {\n  label=\"target\";\n";
  nodes_and_edges(os, m.target, "t");
  os << "  }\n";
  for (const auto& [v, w] : m.assign)
    os << "  s" << v << " -> t" << w << " [style=dotted, constraint=false];\n";
  os << "}\n";
  return os.str();
}

std::string strategy_dot(const modal_arena& a, const strategy& s) {
  std::ostringstream os;
  os << "digraph strategy {\n  rankdir=LR;\n  node [shape=plaintext];\n";
  auto mx = maximal_views(s);
  for (size_t r = 0; r < mx.size(); r++) {
    os << "  subgraph cluster_view" << r << " {\n  label=\"view " << r << "\";\n";
    for (size_t i = 0; i < mx[r].size(); i++)
      os << "  g" << r << "_" << i << " [label=\"" << vname(a, mx[r][i]) << "\"];\n";
    for (size_t i = 0; i + 1 < mx[r].size(); i++)
      os << "  g" << r << "_" << i << " -> g" << r << "_" << i + 1 << ";\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cml
