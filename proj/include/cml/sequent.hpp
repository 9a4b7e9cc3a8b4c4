#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cml/formula.hpp"

namespace cml {

struct sequent {
  std::vector<formula_ptr> hyps;  // multiset, order irrelevant for matching
  formula_ptr goal;
};

std::string print_sequent(const sequent& s);
sequent parse_sequent(const std::string& text);  // "A, B |- C"
bool sequent_equal(const sequent& a, const sequent& b);  // modulo hyp order

struct derivation;
using derivation_ptr = std::shared_ptr<derivation>;

// rule names: ax imp_r imp_l conj_r conj_l weak contr k_box k_dia k_diabot d
// deep rules: deep_w_dia deep_w_conj deep_w_imp deep_c   (one premise each;
// context_path = [hyp index | -1 for the goal, then 0/1 child steps])
// hyp: open premise (allowed in downLJ chains)
struct derivation {
  std::string rule;
  sequent concl;
  std::vector<derivation_ptr> premises;
  std::vector<int> context_path;
};

derivation_ptr mk_deriv(std::string rule, sequent concl,
                        std::vector<derivation_ptr> premises = {},
                        std::vector<int> context_path = {});

struct proof_report {
  bool ok = true;
  std::string error;
  std::string where;  // printed sequent of the offending node
};

// systems: IMLL, LI, IMLL-CK, IMLL-CD, LCK, LCD, the polarized renderings
// IMLL-CK-pol, IMLL-CD-pol, LJ-CK-pol, LJ-CD-pol, and downLJ
proof_report check_derivation(const derivation_ptr& d, const std::string& system);

struct search_bounds {
  int depth = 0;             // 0 = 2 × formula size
  int contraction_budget = 2;  // per formula per branch
};

// bounded backward proof search; for IMLL systems absence is a refutation
std::optional<derivation_ptr> prove(const sequent& s, const std::string& system,
                                    search_bounds b = {});

struct decomposition {
  derivation_ptr linear;  // IMLL-X-pol proof of the de-contracted sequent
  derivation_ptr down;    // chain of deep rules ending at the input conclusion,
                          // topped by a "hyp" node holding the linear conclusion
};

// factorisation of an LJ-X-pol proof of a single-formula sequent
decomposition decompose(const derivation_ptr& d, const std::string& logic);

// one local permutation step: premise `i` of the linear-rule node `d`
// is a weak or deep node; returns the equivalent node with that step pushed
// below (or excised)
derivation_ptr permute_down(const derivation_ptr& d, size_t i, const std::string& logic);

}  // namespace cml
