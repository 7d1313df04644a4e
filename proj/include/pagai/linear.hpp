#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pagai {

using Integer = std::int64_t;

/// Base class of every error raised by the analyzer.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Integer arithmetic that throws instead of silently wrapping.
Integer checked_add(Integer a, Integer b);
Integer checked_mul(Integer a, Integer b);
Integer floor_div(Integer a, Integer b);
Integer ceil_div(Integer a, Integer b);

/// Sparse linear expression `sum coeff_i * v_i + constant` over integer-indexed
/// variables. Zero coefficients are never stored.
struct LinExpr {
  std::map<int, Integer> terms;
  Integer constant = 0;

  static LinExpr var(int v, Integer coeff = 1);
  static LinExpr constant_expr(Integer c);

  Integer coeff(int v) const;
  bool is_constant() const { return terms.empty(); }
  void add_term(int v, Integer c);

  LinExpr operator+(const LinExpr& o) const;
  LinExpr operator-(const LinExpr& o) const;
  LinExpr operator-() const;
  LinExpr scaled(Integer k) const;

  bool operator==(const LinExpr& o) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

CmpOp negate(CmpOp op);
const char* to_string(CmpOp op);

/// `expr op 0`.
struct LinCons {
  LinExpr expr;
  CmpOp op = CmpOp::Le;

  /// Builds `lhs op rhs` as `(lhs - rhs) op 0`.
  static LinCons make(const LinExpr& lhs, CmpOp op, const LinExpr& rhs);
  LinCons negated() const { return {expr, negate(op)}; }

  /// Integer-tightened, non-strict equivalent (`e < 0` becomes `e + 1 <= 0`,
  /// `>`/`>=` are flipped to `<=`). Ne is returned unchanged.
  LinCons tightened() const;

  bool operator==(const LinCons& o) const = default;
};

/// Renders an expression with the given variable names, e.g. `x - 2*y + 3`.
std::string render(const LinExpr& e, const std::vector<std::string>& names);
/// Renders `lhs op rhs` with variables on the left, constant on the right.
std::string render(const LinCons& c, const std::vector<std::string>& names);

Integer evaluate(const LinExpr& e, const std::vector<Integer>& values);
bool holds(const LinCons& c, const std::vector<Integer>& values);

}  // namespace pagai
