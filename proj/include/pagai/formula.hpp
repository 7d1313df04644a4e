#pragma once

// Quantifier-free linear integer arithmetic formulas over named symbols.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pagai/linear.hpp"

namespace pagai {

struct SemanticsFormula;
class AbstractValue;

/// `sum coeff * name + constant op 0`.
struct Atom {
  std::vector<std::pair<std::string, Integer>> terms;
  Integer constant = 0;
  CmpOp op = CmpOp::Le;
};

enum class FKind { True, False, Bool, Atom, Not, And, Or, Implies, Iff, Rho };

struct FNode;
using Formula = std::shared_ptr<const FNode>;

struct FNode {
  FKind kind = FKind::True;
  std::string name;  // Bool
  Atom atom;         // Atom
  std::vector<Formula> kids;
  std::shared_ptr<const SemanticsFormula> rho;  // Rho: stands for rho->rho
};

Formula f_true();
Formula f_false();
Formula f_bool(const std::string& name);
Formula f_atom(Atom a);
/// Atom over program-variable indices, renamed through `names`.
Formula f_atom(const LinCons& c, const std::vector<std::string>& names);
Formula f_not(Formula f);
Formula f_and(std::vector<Formula> fs);
Formula f_or(std::vector<Formula> fs);
Formula f_implies(Formula a, Formula b);
Formula f_iff(Formula a, Formula b);
Formula f_rho(std::shared_ptr<const SemanticsFormula> sf);

/// Conjunction of the value's constraints, with program variable `v` renamed
/// to `names[v]`; bottom is `false`, top is `true`.
Formula to_formula(const AbstractValue& a, const std::vector<std::string>& names);

struct Model {
  std::map<std::string, bool> bools;
  std::map<std::string, Integer> ints;

  bool boolean(const std::string& n) const;
  Integer integer(const std::string& n) const;
};

/// Direct interpreter; absent symbols read as false / 0.
bool evaluate(const Formula& f, const Model& m);

/// Collects Bool and Int symbols (expanding Rho leaves).
void collect_symbols(const Formula& f, std::set<std::string>& bools, std::set<std::string>& ints);

/// Number of nodes, counting shared subterms once per occurrence; Rho counts 1.
size_t formula_size(const Formula& f);

/// SMT-LIB2 term.
std::string to_smtlib(const Formula& f);

}  // namespace pagai
