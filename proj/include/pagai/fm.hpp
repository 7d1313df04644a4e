#pragma once

// Fourier-Motzkin elimination over exact rationals, with an integer
// branch-and-bound layer on top.

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pagai/linear.hpp"

namespace pagai {

using Rational = boost::multiprecision::cpp_rational;

/// `sum coeffs[v] * x_v + constant op 0` with op in {Eq, Lt, Le}.
struct RatCons {
  std::vector<Rational> coeffs;
  Rational constant;
  CmpOp op = CmpOp::Le;
};

struct FmResult {
  bool feasible = false;
  std::vector<Rational> point;  // a rational solution when feasible
};

/// Decides the rational relaxation and returns a witness. Ne is rejected.
FmResult fm_solve(const std::vector<RatCons>& cs, size_t num_vars);

/// Rational feasibility of a conjunction of linear constraints (Ne rejected).
bool fm_feasible(const std::vector<LinCons>& cs);

enum class IntVerdict { Sat, Unsat, Unknown };

struct IntResult {
  IntVerdict verdict = IntVerdict::Unsat;
  std::vector<Integer> point;  // Sat only
};

/// Integer feasibility: strict atoms are tightened, Ne atoms are split, and
/// branch-and-bound runs from FM sample points up to `max_depth`.
IntResult int_solve(const std::vector<LinCons>& cs, size_t num_vars, int max_depth = 32);

}  // namespace pagai
