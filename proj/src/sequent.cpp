#include "cml/sequent.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cml/formula.hpp"

namespace cml {

namespace {

std::string fkey(const formula_ptr& f) { return print_formula(f); }

using fmset = std::map<std::string, int>;

fmset ms(const std::vector<formula_ptr>& v) {
  fmset m;
  for (auto& f : v) m[fkey(f)]++;
  return m;
}

void ms_add(fmset& m, const formula_ptr& f) { m[fkey(f)]++; }

bool ms_sub(fmset& m, const formula_ptr& f) {
  auto it = m.find(fkey(f));
  if (it == m.end() || it->second == 0) return false;
  if (--it->second == 0) m.erase(it);
  return true;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\n\r");
  return s.substr(a, b - a + 1);
}

// child of a formula along one step: 0 = left / modal body, 1 = right
formula_ptr child(const formula_ptr& f, int step) {
  switch (f->kind) {
    case fkind::implies:
    case fkind::conj:
      return step == 0 ? f->left : f->right;
    case fkind::box:
    case fkind::dia:
      return step == 0 ? f->left : nullptr;
    default:
      return nullptr;
  }
}

formula_ptr get_at(const formula_ptr& f, const std::vector<int>& steps, size_t from = 0) {
  formula_ptr cur = f;
  for (size_t k = from; k < steps.size(); k++) {
    if (!cur || steps[k] < 0 || steps[k] > 1) return nullptr;
    cur = child(cur, steps[k]);
  }
  return cur;
}

formula_ptr replace_at(const formula_ptr& f, const std::vector<int>& steps,
                       const formula_ptr& sub, size_t from = 0) {
  if (from == steps.size()) return sub;
  int s = steps[from];
  switch (f->kind) {
    case fkind::implies:
      return s == 0 ? mk_implies(replace_at(f->left, steps, sub, from + 1), f->right)
                    : mk_implies(f->left, replace_at(f->right, steps, sub, from + 1));
    case fkind::conj:
      return s == 0 ? mk_conj(replace_at(f->left, steps, sub, from + 1), f->right)
                    : mk_conj(f->left, replace_at(f->right, steps, sub, from + 1));
    case fkind::box:
      return mk_box(replace_at(f->left, steps, sub, from + 1));
    case fkind::dia:
      return mk_dia(replace_at(f->left, steps, sub, from + 1));
    default:
      throw std::runtime_error("replace_at: bad path");
  }
}

// polarity of the occurrence addressed by (slot, steps): hypotheses start at
// in, the goal at out; descending left of an implication flips
pol occurrence_pol(int slot, const std::vector<int>& steps, const formula_ptr& root) {
  pol p = slot == -1 ? pol::out : pol::in;
  formula_ptr cur = root;
  for (int s : steps) {
    if (cur->kind == fkind::implies && s == 0) p = flip(p);
    cur = child(cur, s);
  }
  return p;
}

std::vector<formula_ptr> erase_one(const std::vector<formula_ptr>& v, const formula_ptr& f) {
  std::vector<formula_ptr> out = v;
  for (size_t i = 0; i < out.size(); i++)
    if (equal(out[i], f)) {
      out.erase(out.begin() + (long)i);
      return out;
    }
  throw std::runtime_error("erase_one: formula not present");
}

const std::set<std::string> kImll = {"ax", "imp_r", "imp_l", "conj_r", "conj_l"};
const std::set<std::string> kStruct = {"weak", "contr"};
const std::set<std::string> kDeep = {"deep_w_dia", "deep_w_conj", "deep_w_imp", "deep_c"};

std::set<std::string> allowed_rules(const std::string& system) {
  auto base = [&](std::set<std::string> s, std::initializer_list<const char*> extra) {
    for (auto* e : extra) s.insert(e);
    return s;
  };
  std::string sys = system;
  // polarized systems share the rule content of their two-sided counterparts
  if (sys == "IMLL-CK-pol") sys = "IMLL-CK";
  if (sys == "IMLL-CD-pol") sys = "IMLL-CD";
  if (sys == "LJ-CK-pol") sys = "LCK";
  if (sys == "LJ-CD-pol") sys = "LCD";
  if (sys == "IMLL") return kImll;
  if (sys == "LI") return base(kImll, {"weak", "contr"});
  if (sys == "IMLL-CK") return base(kImll, {"k_box", "k_dia", "k_diabot"});
  if (sys == "IMLL-CD") return base(kImll, {"k_box", "k_dia", "d"});
  if (sys == "LCK") return base(kImll, {"weak", "contr", "k_box", "k_dia"});
  if (sys == "LCD") return base(kImll, {"weak", "contr", "k_box", "k_dia", "d"});
  if (sys == "downLJ") return base(kDeep, {"hyp"});
  throw std::runtime_error("unknown system: " + system);
}

}  // namespace

std::string print_sequent(const sequent& s) {
  std::ostringstream out;
  for (size_t i = 0; i < s.hyps.size(); i++) {
    if (i) out << ", ";
    out << print_formula(s.hyps[i]);
  }
  if (!s.hyps.empty()) out << " ";
  out << "|- " << print_formula(s.goal);
  return out.str();
}

sequent parse_sequent(const std::string& text) {
  size_t t = text.find("|-");
  if (t == std::string::npos) throw parse_error("missing |-", 0);
  sequent s;
  std::string left = text.substr(0, t);
  if (!trim(left).empty()) {
    size_t start = 0;
    while (true) {
      size_t c = left.find(',', start);
      std::string part = left.substr(start, c == std::string::npos ? c : c - start);
      s.hyps.push_back(parse_formula(trim(part)));
      if (c == std::string::npos) break;
      start = c + 1;
    }
  }
  s.goal = parse_formula(trim(text.substr(t + 2)));
  return s;
}

bool sequent_equal(const sequent& a, const sequent& b) {
  return ms(a.hyps) == ms(b.hyps) && equal(a.goal, b.goal);
}

derivation_ptr mk_deriv(std::string rule, sequent concl,
                        std::vector<derivation_ptr> premises,
                        std::vector<int> context_path) {
  auto d = std::make_shared<derivation>();
  d->rule = std::move(rule);
  d->concl = std::move(concl);
  d->premises = std::move(premises);
  d->context_path = std::move(context_path);
  return d;
}

// ---- checking -------------------------------------------------------------

namespace {

struct check_fail {
  std::string msg;
  sequent at;
};

void expect(bool ok, const std::string& msg, const sequent& at) {
  if (!ok) throw check_fail{msg, at};
}

// multiset of concl.hyps equals the multiset union of the given vectors
void expect_split(const sequent& concl, const std::vector<std::vector<formula_ptr>>& parts,
                  const std::vector<formula_ptr>& minus,
                  const std::vector<formula_ptr>& plus, const std::string& rule) {
  fmset want = ms(concl.hyps);
  for (auto& f : minus)
    expect(ms_sub(want, f), rule + ": conclusion lacks " + fkey(f), concl);
  for (auto& f : plus) ms_add(want, f);
  fmset got;
  for (auto& p : parts)
    for (auto& f : p) ms_add(got, f);
  expect(want == got, rule + ": context mismatch", concl);
}

void check_deep(const derivation& d) {
  const sequent& c = d.concl;
  expect(d.premises.size() == 1, d.rule + ": one premise expected", c);
  const sequent& p = d.premises[0]->concl;
  expect(!d.context_path.empty(), d.rule + ": missing context path", c);
  int slot = d.context_path[0];
  expect(slot >= -1 && slot < (int)c.hyps.size(), d.rule + ": bad context slot", c);

  formula_ptr croot = slot == -1 ? c.goal : c.hyps[(size_t)slot];
  std::vector<int> steps(d.context_path.begin() + 1, d.context_path.end());
  formula_ptr cocc = get_at(croot, steps);
  expect(cocc != nullptr, d.rule + ": bad context path", c);
  pol occ = occurrence_pol(slot, steps, croot);

  // the premise substitutes one of these for the occurrence
  std::vector<formula_ptr> candidates;
  if (d.rule == "deep_w_dia") {
    expect(occ == pol::in, "deep_w_dia: needs a hypothesis occurrence", c);
    expect(cocc->kind == fkind::dia, "deep_w_dia: occurrence is not a diamond", c);
    candidates = {mk_diabot()};
  } else if (d.rule == "deep_w_conj") {
    expect(occ == pol::in, "deep_w_conj: needs a hypothesis occurrence", c);
    expect(cocc->kind == fkind::conj, "deep_w_conj: occurrence is not a conjunction", c);
    candidates = {cocc->left, cocc->right};
  } else if (d.rule == "deep_w_imp") {
    expect(occ == pol::out, "deep_w_imp: needs a conclusion occurrence", c);
    expect(cocc->kind == fkind::implies, "deep_w_imp: occurrence is not an implication", c);
    candidates = {cocc->right};
  } else {  // deep_c
    expect(occ == pol::in, "deep_c: needs a hypothesis occurrence", c);
    candidates = {mk_conj(cocc, cocc)};
  }

  // hypotheses are matched as multisets; the rewritten root replaces croot
  bool matched = false;
  for (auto& x : candidates) {
    formula_ptr want = replace_at(croot, steps, x);
    if (slot == -1) {
      if (equal(p.goal, want) && ms(p.hyps) == ms(c.hyps)) matched = true;
    } else {
      if (!equal(p.goal, c.goal)) continue;
      fmset hs = ms(c.hyps);
      ms_sub(hs, croot);
      ms_add(hs, want);
      if (hs == ms(p.hyps)) matched = true;
    }
    if (matched) break;
  }
  expect(matched, d.rule + ": premise does not match the rewritten conclusion", c);
}

void check_node(const derivation& d, const std::set<std::string>& rules) {
  const sequent& c = d.concl;
  expect(rules.count(d.rule) != 0, "rule not in system: " + d.rule, c);
  auto prem = [&](size_t n) {
    expect(d.premises.size() == n,
           d.rule + ": expected " + std::to_string(n) + " premises", c);
  };

  if (d.rule == "ax") {
    prem(0);
    expect(c.goal->kind == fkind::atom, "ax: goal must be an atom", c);
    expect(c.hyps.size() == 1 && equal(c.hyps[0], c.goal),
           "ax: hypotheses must be exactly the goal atom", c);
  } else if (d.rule == "hyp") {
    prem(0);
  } else if (d.rule == "imp_r") {
    prem(1);
    expect(c.goal->kind == fkind::implies, "imp_r: goal is not an implication", c);
    const sequent& p = d.premises[0]->concl;
    expect(equal(p.goal, c.goal->right), "imp_r: premise goal mismatch", c);
    expect_split(c, {p.hyps}, {}, {c.goal->left}, "imp_r");
  } else if (d.rule == "imp_l") {
    prem(2);
    const sequent& p0 = d.premises[0]->concl;
    const sequent& p1 = d.premises[1]->concl;
    expect(equal(p1.goal, c.goal), "imp_l: right premise goal mismatch", c);
    bool found = false;
    for (auto& h : c.hyps) {
      if (h->kind != fkind::implies || !equal(h->left, p0.goal)) continue;
      // candidate principal formula h = A -> B
      fmset want = ms(c.hyps);
      if (!ms_sub(want, h)) continue;
      ms_add(want, h->right);
      fmset got = ms(p0.hyps);
      for (auto& f : p1.hyps) ms_add(got, f);
      if (want == got) {
        found = true;
        break;
      }
    }
    expect(found, "imp_l: no principal implication matches the premises", c);
  } else if (d.rule == "conj_r") {
    prem(2);
    expect(c.goal->kind == fkind::conj, "conj_r: goal is not a conjunction", c);
    const sequent& p0 = d.premises[0]->concl;
    const sequent& p1 = d.premises[1]->concl;
    expect(equal(p0.goal, c.goal->left) && equal(p1.goal, c.goal->right),
           "conj_r: premise goals mismatch", c);
    expect_split(c, {p0.hyps, p1.hyps}, {}, {}, "conj_r");
  } else if (d.rule == "conj_l") {
    prem(1);
    const sequent& p = d.premises[0]->concl;
    expect(equal(p.goal, c.goal), "conj_l: goal mismatch", c);
    bool found = false;
    for (auto& h : c.hyps) {
      if (h->kind != fkind::conj) continue;
      fmset want = ms(c.hyps);
      if (!ms_sub(want, h)) continue;
      ms_add(want, h->left);
      ms_add(want, h->right);
      if (want == ms(p.hyps)) {
        found = true;
        break;
      }
    }
    expect(found, "conj_l: no principal conjunction matches the premise", c);
  } else if (d.rule == "weak") {
    prem(1);
    const sequent& p = d.premises[0]->concl;
    expect(equal(p.goal, c.goal), "weak: goal mismatch", c);
    fmset want = ms(c.hyps), got = ms(p.hyps);
    for (auto& [k, n] : got)
      expect(want.count(k) && want[k] >= n,
             "weak: premise has hypotheses the conclusion lacks", c);
    expect((int)c.hyps.size() == (int)p.hyps.size() + 1,
           "weak: exactly one hypothesis must be introduced", c);
  } else if (d.rule == "contr") {
    prem(1);
    const sequent& p = d.premises[0]->concl;
    expect(equal(p.goal, c.goal), "contr: goal mismatch", c);
    bool found = false;
    for (auto& h : c.hyps) {
      fmset want = ms(c.hyps);
      ms_add(want, h);
      if (want == ms(p.hyps)) {
        found = true;
        break;
      }
    }
    expect(found, "contr: premise must duplicate one hypothesis", c);
  } else if (d.rule == "k_box" || d.rule == "d") {
    prem(1);
    const sequent& p = d.premises[0]->concl;
    fkind gk = d.rule == "k_box" ? fkind::box : fkind::dia;
    expect(c.goal->kind == gk, d.rule + ": goal modality mismatch", c);
    expect(equal(p.goal, c.goal->left), d.rule + ": premise goal mismatch", c);
    expect(c.hyps.size() == p.hyps.size(), d.rule + ": hypothesis count mismatch", c);
    fmset want, got = ms(p.hyps);
    for (auto& h : c.hyps) {
      expect(h->kind == fkind::box, d.rule + ": hypotheses must all be boxed", c);
      ms_add(want, h->left);
    }
    expect(want == got, d.rule + ": unboxed hypotheses mismatch", c);
  } else if (d.rule == "k_dia" || d.rule == "k_diabot") {
    prem(1);
    const sequent& p = d.premises[0]->concl;
    expect(c.goal->kind == fkind::dia, d.rule + ": goal must be a diamond", c);
    expect(equal(p.goal, c.goal->left), d.rule + ": premise goal mismatch", c);
    fmset boxes;
    formula_ptr principal;
    fkind pk = d.rule == "k_dia" ? fkind::dia : fkind::diabot;
    for (auto& h : c.hyps) {
      if (h->kind == fkind::box) {
        ms_add(boxes, h->left);
      } else {
        expect(h->kind == pk && !principal,
               d.rule + ": hypotheses must be boxes plus one principal modality", c);
        principal = h;
      }
    }
    expect(principal != nullptr, d.rule + ": missing principal hypothesis", c);
    if (d.rule == "k_dia") ms_add(boxes, principal->left);
    expect(boxes == ms(p.hyps), d.rule + ": premise hypotheses mismatch", c);
  } else if (kDeep.count(d.rule)) {
    check_deep(d);
  } else {
    expect(false, "unhandled rule: " + d.rule, c);
  }

  for (auto& p : d.premises) check_node(*p, rules);
}

}  // namespace

proof_report check_derivation(const derivation_ptr& d, const std::string& system) {
  proof_report r;
  if (!d) {
    r.ok = false;
    r.error = "empty derivation";
    return r;
  }
  try {
    check_node(*d, allowed_rules(system));
  } catch (const check_fail& f) {
    r.ok = false;
    r.error = f.msg;
    r.where = print_sequent(f.at);
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

// ---- proof search ---------------------------------------------------------

namespace {

struct prover {
  bool has_weak = false, has_k = false, has_diabot = false, has_d = false;
  int contraction_budget = 2;
  std::map<std::string, int> failed;  // sequent+budget key -> highest failed depth

  std::string state_key(const sequent& s, const std::map<std::string, int>& budget) {
    std::vector<std::string> keys;
    for (auto& h : s.hyps) keys.push_back(fkey(h));
    std::sort(keys.begin(), keys.end());
    std::ostringstream out;
    for (auto& k : keys) out << k << ";";
    out << "|-" << fkey(s.goal) << "#";
    for (auto& [k, n] : budget) out << k << "=" << n << ";";
    return out.str();
  }

  // wrap `base` in weak steps reintroducing each formula of `extra`
  derivation_ptr weak_chain(derivation_ptr base, const std::vector<formula_ptr>& extra) {
    for (auto& w : extra) {
      sequent c = base->concl;
      c.hyps.push_back(w);
      base = mk_deriv("weak", c, {base});
    }
    return base;
  }

  // wrap `base` in contr steps removing one copy of each formula in `dups`
  derivation_ptr contr_chain(derivation_ptr base, const std::vector<formula_ptr>& dups) {
    for (auto& f : dups) {
      sequent c = base->concl;
      c.hyps = erase_one(c.hyps, f);
      base = mk_deriv("contr", c, {base});
    }
    return base;
  }

  derivation_ptr search(const sequent& s, int depth, std::map<std::string, int> budget) {
    if (depth < 0) return nullptr;
    std::string key = state_key(s, budget);
    auto it = failed.find(key);
    if (it != failed.end() && depth <= it->second) return nullptr;
    derivation_ptr r = attempt(s, depth, budget);
    if (!r) {
      int& best = failed[key];
      best = std::max(best, depth);
    }
    return r;
  }

  derivation_ptr attempt(const sequent& s, int depth, std::map<std::string, int>& budget) {
    // invertible: implication right
    if (s.goal->kind == fkind::implies) {
      sequent p = s;
      p.hyps.push_back(s.goal->left);
      p.goal = s.goal->right;
      auto r = search(p, depth - 1, budget);
      return r ? mk_deriv("imp_r", s, {r}) : nullptr;
    }
    // invertible: conjunction left
    for (size_t j = 0; j < s.hyps.size(); j++) {
      if (s.hyps[j]->kind != fkind::conj) continue;
      sequent p = s;
      p.hyps.erase(p.hyps.begin() + (long)j);
      p.hyps.push_back(s.hyps[j]->left);
      p.hyps.push_back(s.hyps[j]->right);
      auto r = search(p, depth - 1, budget);
      return r ? mk_deriv("conj_l", s, {r}) : nullptr;
    }
    // axiom
    if (s.goal->kind == fkind::atom) {
      if (s.hyps.size() == 1 && equal(s.hyps[0], s.goal))
        return mk_deriv("ax", s);
      if (has_weak) {
        for (auto& h : s.hyps)
          if (equal(h, s.goal)) {
            sequent axc{{s.goal}, s.goal};
            return weak_chain(mk_deriv("ax", axc), erase_one(s.hyps, s.goal));
          }
      }
    }
    // modal rules, on (possibly weakened-to) fully modal-prefixed sequents
    if (has_k && (s.goal->kind == fkind::box || s.goal->kind == fkind::dia)) {
      if (auto r = attempt_k(s, depth, budget)) return r;
    }
    // conjunction right: split the context
    if (s.goal->kind == fkind::conj) {
      if (auto r = attempt_split(s, depth, budget, -1)) return r;
    }
    // implication left
    for (size_t h = 0; h < s.hyps.size(); h++) {
      if (s.hyps[h]->kind != fkind::implies) continue;
      if (auto r = attempt_split(s, depth, budget, (int)h)) return r;
    }
    return nullptr;
  }

  derivation_ptr attempt_k(const sequent& s, int depth, std::map<std::string, int>& budget) {
    std::vector<formula_ptr> boxes, dias, diabots, other;
    for (auto& h : s.hyps) {
      if (h->kind == fkind::box)
        boxes.push_back(h);
      else if (h->kind == fkind::dia)
        dias.push_back(h);
      else if (h->kind == fkind::diabot)
        diabots.push_back(h);
      else
        other.push_back(h);
    }
    if (!has_weak && !other.empty()) return nullptr;
    std::vector<formula_ptr> stripped;
    for (auto& b : boxes) stripped.push_back(b->left);

    auto finish = [&](derivation_ptr core, const std::vector<formula_ptr>& dropped) {
      return weak_chain(core, dropped);
    };
    auto drop_ok = [&](size_t n) { return has_weak || n == 0; };

    if (s.goal->kind == fkind::box) {
      if (!drop_ok(dias.size() + diabots.size())) return nullptr;
      sequent p{stripped, s.goal->left};
      if (auto r = search(p, depth - 1, budget)) {
        sequent c{boxes, s.goal};
        std::vector<formula_ptr> dropped = other;
        dropped.insert(dropped.end(), dias.begin(), dias.end());
        dropped.insert(dropped.end(), diabots.begin(), diabots.end());
        return finish(mk_deriv("k_box", c, {r}), dropped);
      }
      return nullptr;
    }

    // goal is a diamond
    for (size_t j = 0; j < dias.size(); j++) {
      if (!drop_ok(dias.size() - 1 + diabots.size())) break;
      sequent p;
      p.hyps.push_back(dias[j]->left);
      p.hyps.insert(p.hyps.end(), stripped.begin(), stripped.end());
      p.goal = s.goal->left;
      if (auto r = search(p, depth - 1, budget)) {
        sequent c;
        c.hyps.push_back(dias[j]);
        c.hyps.insert(c.hyps.end(), boxes.begin(), boxes.end());
        c.goal = s.goal;
        std::vector<formula_ptr> dropped = other;
        for (size_t k = 0; k < dias.size(); k++)
          if (k != j) dropped.push_back(dias[k]);
        dropped.insert(dropped.end(), diabots.begin(), diabots.end());
        return finish(mk_deriv("k_dia", c, {r}), dropped);
      }
    }
    if (has_diabot && !diabots.empty() &&
        drop_ok(dias.size() + diabots.size() - 1)) {
      sequent p{stripped, s.goal->left};
      if (auto r = search(p, depth - 1, budget)) {
        sequent c;
        c.hyps.push_back(diabots[0]);
        c.hyps.insert(c.hyps.end(), boxes.begin(), boxes.end());
        c.goal = s.goal;
        std::vector<formula_ptr> dropped = other;
        dropped.insert(dropped.end(), dias.begin(), dias.end());
        for (size_t k = 1; k < diabots.size(); k++) dropped.push_back(diabots[k]);
        return finish(mk_deriv("k_diabot", c, {r}), dropped);
      }
    }
    if (has_d && drop_ok(dias.size() + diabots.size())) {
      sequent p{stripped, s.goal->left};
      if (auto r = search(p, depth - 1, budget)) {
        sequent c{boxes, s.goal};
        std::vector<formula_ptr> dropped = other;
        dropped.insert(dropped.end(), dias.begin(), dias.end());
        dropped.insert(dropped.end(), diabots.begin(), diabots.end());
        return finish(mk_deriv("d", c, {r}), dropped);
      }
    }
    return nullptr;
  }

  // two-premise rules: conj_r when h == -1, else imp_l on hypothesis h.
  // each remaining hypothesis goes left, right, or (spending contraction
  // budget) both ways; the principal implication may additionally be copied.
  derivation_ptr attempt_split(const sequent& s, int depth,
                               std::map<std::string, int>& budget, int h) {
    std::vector<formula_ptr> rest;
    for (size_t j = 0; j < s.hyps.size(); j++)
      if ((int)j != h) rest.push_back(s.hyps[j]);
    size_t n = rest.size();

    std::vector<int> assign(n, 0);  // 0 = left, 1 = right, 2 = both
    int hextra = 0;                 // principal extra copy: 0 none, 1 left, 2 right
    while (true) {
      bool viable = true;
      std::map<std::string, int> b = budget;
      std::vector<formula_ptr> dups;
      auto spend = [&](const formula_ptr& f) {
        int& left = b.count(fkey(f)) ? b[fkey(f)] : (b[fkey(f)] = contraction_budget);
        if (left == 0) return false;
        left--;
        dups.push_back(f);
        return true;
      };
      std::vector<formula_ptr> gl, gr;
      for (size_t j = 0; j < n && viable; j++) {
        if (assign[j] != 1) gl.push_back(rest[j]);
        if (assign[j] != 0) gr.push_back(rest[j]);
        if (assign[j] == 2) viable = spend(rest[j]);
      }
      if (viable && h >= 0 && hextra != 0) {
        viable = spend(s.hyps[h]);
        if (viable) (hextra == 1 ? gl : gr).push_back(s.hyps[h]);
      }
      if (viable) {
        sequent p0, p1;
        if (h == -1) {
          p0 = {gl, s.goal->left};
          p1 = {gr, s.goal->right};
        } else {
          p0 = {gl, s.hyps[h]->left};
          p1 = {gr, s.goal};
          p1.hyps.push_back(s.hyps[h]->right);
        }
        if (auto r0 = search(p0, depth - 1, b)) {
          if (auto r1 = search(p1, depth - 1, b)) {
            sequent c = s;
            for (auto& f : dups) c.hyps.push_back(f);
            auto core =
                mk_deriv(h == -1 ? "conj_r" : "imp_l", c, {r0, r1});
            return contr_chain(core, dups);
          }
        }
      }
      // advance the assignment counter
      size_t j = 0;
      int maxv = contraction_budget > 0 ? 2 : 1;
      for (; j < n; j++) {
        if (assign[j] < maxv) {
          assign[j]++;
          break;
        }
        assign[j] = 0;
      }
      if (j == n) {
        if (h >= 0 && contraction_budget > 0 && hextra < 2) {
          hextra++;
          std::fill(assign.begin(), assign.end(), 0);
        } else {
          return nullptr;
        }
      }
    }
  }
};

}  // namespace

std::optional<derivation_ptr> prove(const sequent& s, const std::string& system,
                                    search_bounds b) {
  auto rules = allowed_rules(system);
  if (rules.count("hyp")) throw std::runtime_error("prove: not a proof system: " + system);
  prover p;
  p.has_weak = rules.count("weak") != 0;
  p.has_k = rules.count("k_box") != 0;
  p.has_diabot = rules.count("k_diabot") != 0;
  p.has_d = rules.count("d") != 0;
  p.contraction_budget = rules.count("contr") ? b.contraction_budget : 0;
  int size = tree_size(s.goal);
  for (auto& h : s.hyps) size += tree_size(h);
  int depth = b.depth > 0 ? b.depth : 2 * size;
  auto r = p.search(s, depth, {});
  if (!r) return std::nullopt;
  return r;
}

// ---- decomposition --------------------------------------------------------

namespace {

bool chain_rule(const std::string& r) { return r == "weak" || kDeep.count(r) != 0; }

// the formula introduced by a weak node: multiset difference concl - premise
formula_ptr weakened_formula(const derivation& n) {
  fmset prem = ms(n.premises[0]->concl.hyps);
  for (auto& h : n.concl.hyps)
    if (!ms_sub(prem, h)) return h;
  throw std::runtime_error("weak node introduces nothing");
}

int find_hyp(const std::vector<formula_ptr>& hyps, const formula_ptr& f,
             int avoid = -1) {
  for (size_t j = 0; j < hyps.size(); j++)
    if ((int)j != avoid && equal(hyps[j], f)) return (int)j;
  throw std::runtime_error("hypothesis not found: " + fkey(f));
}

// position of premise-occurrence (slot, steps) of premise i of linear rule m
// inside m's conclusion; any formula-equal alignment is sound
std::pair<int, std::vector<int>> translate_pos(const derivation& m, size_t i,
                                               int slot,
                                               const std::vector<int>& steps) {
  const sequent& c = m.concl;
  const sequent& p = m.premises[i]->concl;
  auto at = [&](int tslot, std::vector<int> prefix) {
    prefix.insert(prefix.end(), steps.begin(), steps.end());
    return std::make_pair(tslot, prefix);
  };
  auto context = [&](const std::vector<int>& principal_prem,
                     const std::vector<int>& principal_concl) {
    // slot is a context hypothesis: map to an equal unused conclusion position
    std::set<int> used(principal_concl.begin(), principal_concl.end());
    std::set<int> taken(principal_prem.begin(), principal_prem.end());
    for (int j = 0; j <= slot; j++) {
      if (taken.count(j)) continue;
      if (j == slot) {
        for (size_t k = 0; k < c.hyps.size(); k++)
          if (!used.count((int)k) && equal(c.hyps[(size_t)k], p.hyps[(size_t)j]))
            return at((int)k, {});
        throw std::runtime_error("translate_pos: no context image");
      }
      // reserve images for earlier context hypotheses to stay injective
      for (size_t k = 0; k < c.hyps.size(); k++)
        if (!used.count((int)k) && equal(c.hyps[(size_t)k], p.hyps[(size_t)j])) {
          used.insert((int)k);
          break;
        }
    }
    throw std::runtime_error("translate_pos: bad slot");
  };

  if (m.rule == "imp_r") {
    if (slot == -1) return at(-1, {1});
    // principal hypothesis: a premise position holding A whose removal
    // restores the conclusion context
    int a = -1;
    for (size_t j = 0; j < p.hyps.size(); j++) {
      if (!equal(p.hyps[j], c.goal->left)) continue;
      fmset rest = ms(p.hyps);
      ms_sub(rest, p.hyps[j]);
      if (rest == ms(c.hyps)) {
        a = (int)j;
        break;
      }
    }
    if (slot == a) return at(-1, {0});
    return context({a}, {});
  }
  if (m.rule == "conj_l") {
    if (slot == -1) return at(-1, {});
    for (size_t ci = 0; ci < c.hyps.size(); ci++) {
      auto& h = c.hyps[ci];
      if (h->kind != fkind::conj) continue;
      fmset want = ms(c.hyps);
      ms_sub(want, h);
      ms_add(want, h->left);
      ms_add(want, h->right);
      if (want != ms(p.hyps)) continue;
      int a = find_hyp(p.hyps, h->left);
      int b = find_hyp(p.hyps, h->right, a);
      if (slot == a) return at((int)ci, {0});
      if (slot == b) return at((int)ci, {1});
      return context({a, b}, {(int)ci});
    }
    throw std::runtime_error("translate_pos: conj_l principal not found");
  }
  if (m.rule == "conj_r") {
    if (slot == -1) return at(-1, {(int)i});
    return context({}, {});
  }
  if (m.rule == "imp_l") {
    const sequent& p0 = m.premises[0]->concl;
    const sequent& p1 = m.premises[1]->concl;
    for (size_t hi = 0; hi < c.hyps.size(); hi++) {
      auto& h = c.hyps[hi];
      if (h->kind != fkind::implies || !equal(h->left, p0.goal)) continue;
      fmset want = ms(c.hyps);
      ms_sub(want, h);
      ms_add(want, h->right);
      fmset got = ms(p0.hyps);
      for (auto& f : p1.hyps) ms_add(got, f);
      if (want != got) continue;
      if (i == 0) {
        if (slot == -1) return at((int)hi, {0});
        return context({}, {(int)hi});
      }
      if (slot == -1) return at(-1, {});
      int b = find_hyp(p1.hyps, h->right);
      if (slot == b) return at((int)hi, {1});
      return context({b}, {(int)hi});
    }
    throw std::runtime_error("translate_pos: imp_l principal not found");
  }
  if (m.rule == "k_box" || m.rule == "d" || m.rule == "k_diabot" ||
      m.rule == "k_dia") {
    if (slot == -1) return at(-1, {0});
    formula_ptr target = p.hyps[(size_t)slot];
    // conclusion positions able to host this premise formula: the diamond
    // (for k_dia, when its body matches) followed by the matching boxes;
    // equal premise positions are assigned to them injectively in order
    std::vector<int> hosts;
    for (size_t k = 0; k < c.hyps.size(); k++) {
      if (m.rule == "k_dia" && c.hyps[k]->kind == fkind::dia &&
          equal(c.hyps[k]->left, target))
        hosts.push_back((int)k);
      if (c.hyps[k]->kind == fkind::box && equal(c.hyps[k]->left, target))
        hosts.push_back((int)k);
    }
    int before = 0;
    for (int j = 0; j < slot; j++)
      if (equal(p.hyps[(size_t)j], target)) before++;
    if (before >= (int)hosts.size())
      throw std::runtime_error("translate_pos: modal context image");
    return at(hosts[(size_t)before], {0});
  }
  throw std::runtime_error("translate_pos: unhandled rule " + m.rule);
}

derivation_ptr rebuild_premise(const derivation_ptr& m, size_t i,
                               derivation_ptr np, sequent nc) {
  auto prem = m->premises;
  prem[i] = std::move(np);
  return mk_deriv(m->rule, std::move(nc), std::move(prem), m->context_path);
}

}  // namespace

derivation_ptr permute_down(const derivation_ptr& m, size_t i,
                            const std::string& logic) {
  const derivation_ptr n = m->premises[i];
  const derivation_ptr q = n->premises[0];

  if (kDeep.count(n->rule)) {
    // a deep step always permutes below: translate its occurrence through m
    int slot = n->context_path[0];
    std::vector<int> steps(n->context_path.begin() + 1, n->context_path.end());
    auto [tslot, tpath] = translate_pos(*m, i, slot, steps);
    // the premise-side occurrence is determined by the rule
    formula_ptr croot = slot == -1 ? n->concl.goal : n->concl.hyps[(size_t)slot];
    formula_ptr cocc = get_at(croot, steps);
    formula_ptr pocc;
    if (n->rule == "deep_w_dia") {
      pocc = mk_diabot();
    } else if (n->rule == "deep_w_imp") {
      pocc = cocc->right;
    } else if (n->rule == "deep_c") {
      pocc = mk_conj(cocc, cocc);
    } else {  // deep_w_conj: disambiguate by the premise multiset
      fmset qh = ms(q->concl.hyps);
      fmset base = ms(n->concl.hyps);
      auto fits = [&](const formula_ptr& x) {
        formula_ptr want = replace_at(croot, steps, x);
        if (slot == -1) return equal(q->concl.goal, want) && qh == base;
        fmset hs = base;
        ms_sub(hs, croot);
        ms_add(hs, want);
        return hs == qh;
      };
      pocc = fits(cocc->left) ? cocc->left : cocc->right;
    }
    sequent mid = m->concl;
    if (tslot == -1)
      mid.goal = replace_at(mid.goal, tpath, pocc);
    else
      mid.hyps[(size_t)tslot] = replace_at(mid.hyps[(size_t)tslot], tpath, pocc);
    derivation_ptr core = rebuild_premise(m, i, q, mid);
    std::vector<int> path{tslot};
    path.insert(path.end(), tpath.begin(), tpath.end());
    return mk_deriv(n->rule, m->concl, {core}, path);
  }

  // n is a weak step introducing W
  formula_ptr w = weakened_formula(*n);
  const std::string& r = m->rule;

  if (r == "imp_r" && equal(w, m->concl.goal->left)) {
    // the introduced hypothesis was weakened: absorb into the implication
    return mk_deriv("deep_w_imp", m->concl, {q}, {-1});
  }
  if (r == "conj_l") {
    // find the principal conjunction; a weakened conjunct becomes deep_w_conj
    for (size_t ci = 0; ci < m->concl.hyps.size(); ci++) {
      auto& h = m->concl.hyps[ci];
      if (h->kind != fkind::conj) continue;
      fmset want = ms(m->concl.hyps);
      ms_sub(want, h);
      ms_add(want, h->left);
      ms_add(want, h->right);
      if (want != ms(n->concl.hyps)) continue;
      if (equal(w, h->left) || equal(w, h->right))
        return mk_deriv("deep_w_conj", m->concl, {q}, {(int)ci});
      break;
    }
  }
  if (r == "imp_l" && i == 1) {
    const sequent& p0 = m->premises[0]->concl;
    for (auto& h : m->concl.hyps) {
      if (h->kind != fkind::implies || !equal(h->left, p0.goal)) continue;
      fmset want = ms(m->concl.hyps);
      ms_sub(want, h);
      ms_add(want, h->right);
      fmset got = ms(p0.hyps);
      for (auto& f : n->concl.hyps) ms_add(got, f);
      if (want != got) continue;
      if (equal(w, h->right)) {
        // is another copy of B available in q to feed the rule?
        bool spare = false;
        for (auto& f : q->concl.hyps)
          if (equal(f, h->right)) spare = true;
        if (!spare) {
          // excise: the left subproof is discarded and its context together
          // with the implication is reintroduced by weakening
          derivation_ptr out = q;
          for (auto& f : p0.hyps) {
            sequent c = out->concl;
            c.hyps.push_back(f);
            out = mk_deriv("weak", c, {out});
          }
          // the final step restores the conclusion vector exactly
          return mk_deriv("weak", m->concl, {out});
        }
      }
      break;
    }
  }
  if (r == "k_box" || r == "d" || r == "k_diabot") {
    sequent mid = m->concl;
    mid.hyps = erase_one(mid.hyps, mk_box(w));
    derivation_ptr core = rebuild_premise(m, i, q, mid);
    return mk_deriv("weak", m->concl, {core});
  }
  if (r == "k_dia") {
    int di = -1;
    for (size_t k = 0; k < m->concl.hyps.size(); k++)
      if (m->concl.hyps[k]->kind == fkind::dia) di = (int)k;
    formula_ptr body = m->concl.hyps[(size_t)di]->left;
    // prefer reading W as a boxed context member when possible
    bool boxed = false;
    for (auto& h : m->concl.hyps)
      if (equal(h, mk_box(w))) boxed = true;
    if (!boxed) {
      if (!equal(w, body))
        throw std::runtime_error("permute_down: k_dia weakening mismatch");
      // the diamond's own hypothesis was weakened: fork on the logic
      std::vector<formula_ptr> boxes;
      for (size_t k = 0; k < m->concl.hyps.size(); k++)
        if ((int)k != di) boxes.push_back(m->concl.hyps[k]);
      if (logic == "CD") {
        sequent mid{boxes, m->concl.goal};
        derivation_ptr core = mk_deriv("d", mid, {q});
        return mk_deriv("weak", m->concl, {core});
      }
      sequent mid = m->concl;
      mid.hyps[(size_t)di] = mk_diabot();
      derivation_ptr core = mk_deriv("k_diabot", mid, {q});
      return mk_deriv("deep_w_dia", m->concl, {core}, {di});
    }
    sequent mid = m->concl;
    mid.hyps = erase_one(mid.hyps, mk_box(w));
    derivation_ptr core = rebuild_premise(m, i, q, mid);
    return mk_deriv("weak", m->concl, {core});
  }

  // independent: apply m without W, weaken below
  sequent mid = m->concl;
  mid.hyps = erase_one(mid.hyps, w);
  derivation_ptr core = rebuild_premise(m, i, q, mid);
  return mk_deriv("weak", m->concl, {core});
}

namespace {

// contr nodes become conj_l followed by a deep contraction
derivation_ptr elim_contr(const derivation_ptr& d) {
  std::vector<derivation_ptr> prem;
  for (auto& p : d->premises) prem.push_back(elim_contr(p));
  if (d->rule != "contr")
    return mk_deriv(d->rule, d->concl, prem, d->context_path);
  formula_ptr a;
  for (auto& h : d->concl.hyps) {
    fmset want = ms(d->concl.hyps);
    ms_add(want, h);
    if (want == ms(prem[0]->concl.hyps)) {
      a = h;
      break;
    }
  }
  if (!a) throw std::runtime_error("contr node does not duplicate a hypothesis");
  int j = find_hyp(d->concl.hyps, a);
  sequent mid = d->concl;
  mid.hyps[(size_t)j] = mk_conj(a, a);
  auto cl = mk_deriv("conj_l", mid, {prem[0]});
  return mk_deriv("deep_c", d->concl, {cl}, {j});
}

derivation_ptr push_down_logic(const derivation_ptr& d, const std::string& logic) {
  if (chain_rule(d->rule)) {
    auto p = push_down_logic(d->premises[0], logic);
    return mk_deriv(d->rule, d->concl, {p}, d->context_path);
  }
  std::vector<derivation_ptr> prem;
  for (auto& p : d->premises) prem.push_back(push_down_logic(p, logic));
  auto node = mk_deriv(d->rule, d->concl, prem, d->context_path);
  for (size_t i = 0; i < node->premises.size(); i++)
    if (chain_rule(node->premises[i]->rule))
      return push_down_logic(permute_down(node, i, logic), logic);
  return node;
}

}  // namespace

decomposition decompose(const derivation_ptr& d, const std::string& logic) {
  if (logic != "CK" && logic != "CD")
    throw std::runtime_error("decompose: logic must be CK or CD");
  auto pre = check_derivation(d, logic == "CK" ? "LJ-CK-pol" : "LJ-CD-pol");
  if (!pre.ok)
    throw std::runtime_error("decompose: input derivation invalid: " + pre.error);
  if (!d->concl.hyps.empty())
    throw std::runtime_error("decompose: conclusion must have no hypotheses");

  auto normalized = push_down_logic(elim_contr(d), logic);

  // the root is now a chain of deep steps over a linear derivation
  std::vector<derivation_ptr> chain;
  derivation_ptr cur = normalized;
  while (kDeep.count(cur->rule)) {
    chain.push_back(cur);
    cur = cur->premises[0];
  }
  if (chain_rule(cur->rule))
    throw std::runtime_error("decompose: weakening survived normalization");

  decomposition out;
  out.linear = cur;
  derivation_ptr top = mk_deriv("hyp", cur->concl);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    top = mk_deriv((*it)->rule, (*it)->concl, {top}, (*it)->context_path);
  out.down = top;
  return out;
}

}  // namespace cml
