#include <sstream>

#include "pagai/domains.hpp"
#include "pagai/formula.hpp"
#include "pagai/smt.hpp"

namespace pagai {

namespace {

Formula node(FKind k) {
  auto n = std::make_shared<FNode>();
  n->kind = k;
  return n;
}

const Formula& shared_true() {
  static const Formula t = node(FKind::True);
  return t;
}

const Formula& shared_false() {
  static const Formula f = node(FKind::False);
  return f;
}

}  // namespace

Formula f_true() { return shared_true(); }
Formula f_false() { return shared_false(); }

Formula f_bool(const std::string& name) {
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Bool;
  n->name = name;
  return n;
}

Formula f_atom(Atom a) {
  if (a.terms.empty()) {
    LinCons c{LinExpr::constant_expr(a.constant), a.op};
    return holds(c, {}) ? f_true() : f_false();
  }
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Atom;
  n->atom = std::move(a);
  return n;
}

Formula f_atom(const LinCons& c, const std::vector<std::string>& names) {
  Atom a;
  for (auto [v, k] : c.expr.terms) a.terms.push_back({names.at(v), k});
  a.constant = c.expr.constant;
  a.op = c.op;
  return f_atom(std::move(a));
}

Formula f_not(Formula f) {
  if (f->kind == FKind::True) return f_false();
  if (f->kind == FKind::False) return f_true();
  if (f->kind == FKind::Not) return f->kids[0];
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Not;
  n->kids.push_back(std::move(f));
  return n;
}

Formula f_and(std::vector<Formula> fs) {
  std::vector<Formula> kids;
  for (auto& f : fs) {
    if (f->kind == FKind::True) continue;
    if (f->kind == FKind::False) return f_false();
    if (f->kind == FKind::And) {
      for (const auto& k : f->kids) kids.push_back(k);
      continue;
    }
    kids.push_back(std::move(f));
  }
  if (kids.empty()) return f_true();
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<FNode>();
  n->kind = FKind::And;
  n->kids = std::move(kids);
  return n;
}

Formula f_or(std::vector<Formula> fs) {
  std::vector<Formula> kids;
  for (auto& f : fs) {
    if (f->kind == FKind::False) continue;
    if (f->kind == FKind::True) return f_true();
    if (f->kind == FKind::Or) {
      for (const auto& k : f->kids) kids.push_back(k);
      continue;
    }
    kids.push_back(std::move(f));
  }
  if (kids.empty()) return f_false();
  if (kids.size() == 1) return kids[0];
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Or;
  n->kids = std::move(kids);
  return n;
}

Formula f_implies(Formula a, Formula b) {
  if (a->kind == FKind::False || b->kind == FKind::True) return f_true();
  if (a->kind == FKind::True) return b;
  if (b->kind == FKind::False) return f_not(a);
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Implies;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

Formula f_iff(Formula a, Formula b) {
  if (a->kind == FKind::True) return b;
  if (b->kind == FKind::True) return a;
  if (a->kind == FKind::False) return f_not(b);
  if (b->kind == FKind::False) return f_not(a);
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Iff;
  n->kids = {std::move(a), std::move(b)};
  return n;
}

Formula f_rho(std::shared_ptr<const SemanticsFormula> sf) {
  auto n = std::make_shared<FNode>();
  n->kind = FKind::Rho;
  n->rho = std::move(sf);
  return n;
}

Formula to_formula(const AbstractValue& a, const std::vector<std::string>& names) {
  if (a.is_bottom()) return f_false();
  std::vector<Formula> parts;
  for (const auto& c : a.to_constraints()) parts.push_back(f_atom(c, names));
  return f_and(std::move(parts));
}

bool Model::boolean(const std::string& n) const {
  auto it = bools.find(n);
  return it != bools.end() && it->second;
}

Integer Model::integer(const std::string& n) const {
  auto it = ints.find(n);
  return it == ints.end() ? 0 : it->second;
}

bool evaluate(const Formula& f, const Model& m) {
  switch (f->kind) {
    case FKind::True: return true;
    case FKind::False: return false;
    case FKind::Bool: return m.boolean(f->name);
    case FKind::Atom: {
      Integer v = f->atom.constant;
      for (const auto& [n, k] : f->atom.terms) v = checked_add(v, checked_mul(k, m.integer(n)));
      return holds(LinCons{LinExpr::constant_expr(v), f->atom.op}, {});
    }
    case FKind::Not: return !evaluate(f->kids[0], m);
    case FKind::And:
      for (const auto& k : f->kids)
        if (!evaluate(k, m)) return false;
      return true;
    case FKind::Or:
      for (const auto& k : f->kids)
        if (evaluate(k, m)) return true;
      return false;
    case FKind::Implies: return !evaluate(f->kids[0], m) || evaluate(f->kids[1], m);
    case FKind::Iff: return evaluate(f->kids[0], m) == evaluate(f->kids[1], m);
    case FKind::Rho: return evaluate(f->rho->rho, m);
  }
  return false;
}

void collect_symbols(const Formula& f, std::set<std::string>& bools, std::set<std::string>& ints) {
  switch (f->kind) {
    case FKind::Bool: bools.insert(f->name); return;
    case FKind::Atom:
      for (const auto& t : f->atom.terms) ints.insert(t.first);
      return;
    case FKind::Rho: collect_symbols(f->rho->rho, bools, ints); return;
    default:
      for (const auto& k : f->kids) collect_symbols(k, bools, ints);
  }
}

size_t formula_size(const Formula& f) {
  size_t n = 1;
  for (const auto& k : f->kids) n += formula_size(k);
  return n;
}

namespace {

void smt_int(std::ostream& os, Integer v) {
  if (v < 0)
    os << "(- " << (v == INT64_MIN ? std::string("9223372036854775808") : std::to_string(-v)) << ")";
  else
    os << v;
}

void print(std::ostream& os, const Formula& f) {
  switch (f->kind) {
    case FKind::True: os << "true"; return;
    case FKind::False: os << "false"; return;
    case FKind::Bool: os << f->name; return;
    case FKind::Atom: {
      const Atom& a = f->atom;
      auto lhs = [&] {
        os << "(+";
        for (const auto& [n, k] : a.terms) {
          os << " ";
          if (k == 1) {
            os << n;
          } else {
            os << "(* ";
            smt_int(os, k);
            os << " " << n << ")";
          }
        }
        os << " 0)";
      };
      Integer rhs = -a.constant;
      const char* op = "<=";
      switch (a.op) {
        case CmpOp::Eq: op = "="; break;
        case CmpOp::Ne: op = "="; break;
        case CmpOp::Lt: op = "<"; break;
        case CmpOp::Le: op = "<="; break;
        case CmpOp::Gt: op = ">"; break;
        case CmpOp::Ge: op = ">="; break;
      }
      if (a.op == CmpOp::Ne) os << "(not ";
      os << "(" << op << " ";
      lhs();
      os << " ";
      smt_int(os, rhs);
      os << ")";
      if (a.op == CmpOp::Ne) os << ")";
      return;
    }
    case FKind::Not: os << "(not "; print(os, f->kids[0]); os << ")"; return;
    case FKind::And:
    case FKind::Or:
      os << (f->kind == FKind::And ? "(and" : "(or");
      for (const auto& k : f->kids) {
        os << " ";
        print(os, k);
      }
      os << ")";
      return;
    case FKind::Implies:
    case FKind::Iff:
      os << (f->kind == FKind::Implies ? "(=> " : "(= ");
      print(os, f->kids[0]);
      os << " ";
      print(os, f->kids[1]);
      os << ")";
      return;
    case FKind::Rho: print(os, f->rho->rho); return;
  }
}

}  // namespace

std::string to_smtlib(const Formula& f) {
  std::ostringstream os;
  print(os, f);
  return os.str();
}

}  // namespace pagai
