#include "pagai/linear.hpp"

#include <sstream>

namespace pagai {

Integer checked_add(Integer a, Integer b) {
  Integer r;
  if (__builtin_add_overflow(a, b, &r)) throw error("integer overflow in bound arithmetic");
  return r;
}

Integer checked_mul(Integer a, Integer b) {
  Integer r;
  if (__builtin_mul_overflow(a, b, &r)) throw error("integer overflow in bound arithmetic");
  return r;
}

Integer floor_div(Integer a, Integer b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Integer ceil_div(Integer a, Integer b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

LinExpr LinExpr::var(int v, Integer coeff) {
  LinExpr e;
  e.add_term(v, coeff);
  return e;
}

LinExpr LinExpr::constant_expr(Integer c) {
  LinExpr e;
  e.constant = c;
  return e;
}

Integer LinExpr::coeff(int v) const {
  auto it = terms.find(v);
  return it == terms.end() ? 0 : it->second;
}

void LinExpr::add_term(int v, Integer c) {
  if (c == 0) return;
  Integer n = checked_add(coeff(v), c);
  if (n == 0)
    terms.erase(v);
  else
    terms[v] = n;
}

LinExpr LinExpr::operator+(const LinExpr& o) const {
  LinExpr r = *this;
  for (auto [v, c] : o.terms) r.add_term(v, c);
  r.constant = checked_add(r.constant, o.constant);
  return r;
}

LinExpr LinExpr::operator-(const LinExpr& o) const { return *this + (-o); }

LinExpr LinExpr::operator-() const { return scaled(-1); }

LinExpr LinExpr::scaled(Integer k) const {
  LinExpr r;
  if (k == 0) return r;
  for (auto [v, c] : terms) r.terms[v] = checked_mul(c, k);
  r.constant = checked_mul(constant, k);
  return r;
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return op;
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

LinCons LinCons::make(const LinExpr& lhs, CmpOp op, const LinExpr& rhs) { return {lhs - rhs, op}; }

LinCons LinCons::tightened() const {
  switch (op) {
    case CmpOp::Eq:
    case CmpOp::Ne:
    case CmpOp::Le: return *this;
    case CmpOp::Lt: return {expr + LinExpr::constant_expr(1), CmpOp::Le};
    case CmpOp::Ge: return {-expr, CmpOp::Le};
    case CmpOp::Gt: return {-expr + LinExpr::constant_expr(1), CmpOp::Le};
  }
  return *this;
}

std::string render(const LinExpr& e, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (auto [v, c] : e.terms) {
    Integer mag = c < 0 ? -c : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (mag != 1) os << mag << "*";
    os << (v >= 0 && v < static_cast<int>(names.size()) ? names[v] : "?" + std::to_string(v));
    first = false;
  }
  if (first) {
    os << e.constant;
  } else if (e.constant != 0) {
    os << (e.constant < 0 ? " - " : " + ") << (e.constant < 0 ? -e.constant : e.constant);
  }
  return os.str();
}

std::string render(const LinCons& c, const std::vector<std::string>& names) {
  LinExpr lhs = c.expr;
  Integer rhs = -lhs.constant;
  lhs.constant = 0;
  return render(lhs, names) + " " + to_string(c.op) + " " + std::to_string(rhs);
}

Integer evaluate(const LinExpr& e, const std::vector<Integer>& values) {
  Integer r = e.constant;
  for (auto [v, c] : e.terms) r = checked_add(r, checked_mul(c, values.at(v)));
  return r;
}

bool holds(const LinCons& c, const std::vector<Integer>& values) {
  Integer v = evaluate(c.expr, values);
  switch (c.op) {
    case CmpOp::Eq: return v == 0;
    case CmpOp::Ne: return v != 0;
    case CmpOp::Lt: return v < 0;
    case CmpOp::Le: return v <= 0;
    case CmpOp::Gt: return v > 0;
    case CmpOp::Ge: return v >= 0;
  }
  return false;
}

}  // namespace pagai
