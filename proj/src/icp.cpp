#include "cml/icp.hpp"

#include <stdexcept>

namespace cml {
namespace {

bool has_diabot(const formula_ptr& f) {
  if (!f) return false;
  if (f->kind == fkind::diabot) return true;
  return has_diabot(f->left) || has_diabot(f->right);
}

}  // namespace

icp_report check_icp(const combinatorial_proof& c) {
  if (!c.conclusion) return {false, "arena", "missing conclusion"};
  if (c.logic != "CK" && c.logic != "CD")
    return {false, "arena", "unknown logic " + c.logic};
  if (has_diabot(c.conclusion))
    return {false, "diabot", "conclusion contains dia bot"};
  if (!(c.map.target == arena_of(c.conclusion)))
    return {false, "arena", "map target is not the arena of the conclusion"};
  if (!(c.map.source == c.net.arena))
    return {false, "arena", "map source is not the net arena"};
  auto nr = check_net(c.net, c.logic);
  if (!nr.ok)
    return {false, "net",
            nr.condition + (nr.detail.empty() ? "" : ": " + nr.detail)};
  auto fr = check_fibration(c.map, "even");
  if (!fr.ok)
    return {false, "fibration",
            fr.clause + (fr.detail.empty() ? "" : ": " + fr.detail)};
  return {};
}

combinatorial_proof icp_of_factorised_proof(const derivation_ptr& linear,
                                            const derivation_ptr& down,
                                            const std::string& logic) {
  auto lr = check_derivation(linear, "IMLL-" + logic + "-pol");
  if (!lr.ok) throw std::runtime_error("linear part: " + lr.error);
  auto dr = check_derivation(down, "downLJ");
  if (!dr.ok) throw std::runtime_error("down part: " + dr.error);
  if (!down->concl.hyps.empty())
    throw std::runtime_error("down part must end at a single-formula sequent");

  combinatorial_proof c;
  c.logic = logic;
  c.net = net_of_proof(linear, logic);
  c.map = fibration_of_derivation(down);
  c.conclusion = down->concl.goal;
  auto rep = check_icp(c);
  if (!rep.ok)
    throw std::runtime_error("factorised parts do not assemble: " + rep.layer +
                             ": " + rep.detail);
  return c;
}

}  // namespace cml
