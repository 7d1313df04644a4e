#include "pagai/fm.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace pagai {

namespace {

using boost::multiprecision::cpp_int;

Rational rat_floor(const Rational& r) {
  cpp_int n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
  cpp_int q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return Rational(q);
}

Rational rat_ceil(const Rational& r) {
  Rational f = rat_floor(r);
  return f == r ? f : f + 1;
}

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

bool satisfied_constant(const Rational& c, CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    default: return false;
  }
}

// Normalizes so that the first nonzero coefficient has magnitude 1.
void normalize(RatCons& c) {
  for (const auto& a : c.coeffs) {
    if (a == 0) continue;
    Rational s = a < 0 ? Rational(-a) : a;
    if (c.op == CmpOp::Eq && a < 0) s = -s;
    for (auto& b : c.coeffs) b /= s;
    c.constant /= s;
    return;
  }
}

bool all_zero(const RatCons& c) {
  return std::all_of(c.coeffs.begin(), c.coeffs.end(), [](const Rational& a) { return a == 0; });
}

struct Stage {
  size_t var;
  std::vector<RatCons> cons;
};

struct Subst {
  size_t var;
  std::vector<Rational> coeffs;  // x_var = coeffs . x + constant
  Rational constant;
};

// Keeps the strongest inequality per coefficient vector; false on a
// violated constant constraint.
bool prune(std::vector<RatCons>& cs) {
  std::map<std::vector<Rational>, RatCons> best;
  for (auto& c : cs) {
    if (all_zero(c)) {
      if (!satisfied_constant(c.constant, c.op)) return false;
      continue;
    }
    normalize(c);
    auto it = best.find(c.coeffs);
    if (it == best.end()) {
      best.emplace(c.coeffs, c);
      continue;
    }
    RatCons& b = it->second;
    if (c.constant > b.constant || (c.constant == b.constant && c.op == CmpOp::Lt)) b = c;
  }
  cs.clear();
  for (auto& [k, c] : best) cs.push_back(std::move(c));
  return true;
}

}  // namespace

FmResult fm_solve(const std::vector<RatCons>& input, size_t n) {
  std::vector<RatCons> cs;
  for (auto c : input) {
    c.coeffs.resize(n);
    if (c.op == CmpOp::Ge || c.op == CmpOp::Gt) {
      for (auto& a : c.coeffs) a = -a;
      c.constant = -c.constant;
      c.op = c.op == CmpOp::Ge ? CmpOp::Le : CmpOp::Lt;
    }
    if (c.op == CmpOp::Ne) throw error("fm_solve: disequalities must be split by the caller");
    cs.push_back(std::move(c));
  }

  std::vector<Subst> substs;
  for (;;) {
    auto eq = std::find_if(cs.begin(), cs.end(), [](const RatCons& c) { return c.op == CmpOp::Eq && !all_zero(c); });
    if (eq == cs.end()) break;
    RatCons e = *eq;
    cs.erase(eq);
    size_t v = 0;
    while (e.coeffs[v] == 0) ++v;
    Rational a = e.coeffs[v];
    Subst s{v, std::vector<Rational>(n), -e.constant / a};
    for (size_t j = 0; j < n; ++j)
      if (j != v) s.coeffs[j] = -e.coeffs[j] / a;
    for (auto& c : cs) {
      Rational k = c.coeffs[v];
      if (k == 0) continue;
      c.coeffs[v] = 0;
      for (size_t j = 0; j < n; ++j) c.coeffs[j] += k * s.coeffs[j];
      c.constant += k * s.constant;
    }
    substs.push_back(std::move(s));
  }
  for (const auto& c : cs)
    if (c.op == CmpOp::Eq && !satisfied_constant(c.constant, CmpOp::Eq)) return {};
  cs.erase(std::remove_if(cs.begin(), cs.end(), [](const RatCons& c) { return c.op == CmpOp::Eq; }), cs.end());
  if (!prune(cs)) return {};

  std::vector<Stage> stages;
  for (;;) {
    size_t best_var = n;
    long best_cost = 0;
    for (size_t v = 0; v < n; ++v) {
      long pos = 0, neg = 0;
      for (const auto& c : cs) {
        if (c.coeffs[v] > 0) ++pos;
        if (c.coeffs[v] < 0) ++neg;
      }
      if (pos + neg == 0) continue;
      long cost = pos * neg - pos - neg;
      if (best_var == n || cost < best_cost) {
        best_var = v;
        best_cost = cost;
      }
    }
    if (best_var == n) break;
    size_t v = best_var;
    Stage st{v, {}};
    std::vector<RatCons> keep, pos, neg;
    for (auto& c : cs) {
      if (c.coeffs[v] > 0)
        pos.push_back(c);
      else if (c.coeffs[v] < 0)
        neg.push_back(c);
      else
        keep.push_back(c);
    }
    for (const auto& p : pos) st.cons.push_back(p);
    for (const auto& q : neg) st.cons.push_back(q);
    for (const auto& p : pos)
      for (const auto& q : neg) {
        Rational a = p.coeffs[v], b = -q.coeffs[v];
        RatCons r;
        r.coeffs.resize(n);
        for (size_t j = 0; j < n; ++j) r.coeffs[j] = p.coeffs[j] * b + q.coeffs[j] * a;
        r.coeffs[v] = 0;
        r.constant = p.constant * b + q.constant * a;
        r.op = (p.op == CmpOp::Lt || q.op == CmpOp::Lt) ? CmpOp::Lt : CmpOp::Le;
        keep.push_back(std::move(r));
      }
    cs = std::move(keep);
    stages.push_back(std::move(st));
    if (!prune(cs)) return {};
  }

  FmResult res;
  res.feasible = true;
  res.point.assign(n, Rational(0));
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    size_t v = it->var;
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& c : it->cons) {
      Rational rest = c.constant;
      for (size_t j = 0; j < n; ++j)
        if (j != v) rest += c.coeffs[j] * res.point[j];
      Rational a = c.coeffs[v];
      Rational b = -rest / a;  // a*x + rest op 0
      bool strict = c.op == CmpOp::Lt;
      if (a > 0) {
        if (!hi || b < *hi || (b == *hi && strict)) {
          hi = b;
          hi_strict = strict;
        }
      } else {
        if (!lo || b > *lo || (b == *lo && strict)) {
          lo = b;
          lo_strict = strict;
        }
      }
    }
    auto fits = [&](const Rational& x) {
      if (lo && (x < *lo || (lo_strict && x == *lo))) return false;
      if (hi && (x > *hi || (hi_strict && x == *hi))) return false;
      return true;
    };
    Rational cand = 0;
    if (lo)
      cand = lo_strict && is_integer(*lo) ? *lo + 1 : rat_ceil(*lo);
    else if (hi)
      cand = hi_strict && is_integer(*hi) ? *hi - 1 : rat_floor(*hi);
    if (!fits(cand)) {
      if (lo && hi)
        cand = (*lo + *hi) / 2;
      else if (lo)
        cand = *lo + 1;
      else if (hi)
        cand = *hi - 1;
    }
    res.point[v] = cand;
  }
  for (auto it = substs.rbegin(); it != substs.rend(); ++it) {
    Rational x = it->constant;
    for (size_t j = 0; j < n; ++j) x += it->coeffs[j] * res.point[j];
    res.point[it->var] = x;
  }
  return res;
}

namespace {

RatCons to_rat(const LinCons& c, size_t n) {
  RatCons r;
  r.coeffs.assign(n, Rational(0));
  for (auto [v, a] : c.expr.terms) r.coeffs.at(v) = a;
  r.constant = c.expr.constant;
  r.op = c.op;
  return r;
}

size_t var_count(const std::vector<LinCons>& cs) {
  size_t n = 0;
  for (const auto& c : cs)
    for (auto [v, a] : c.expr.terms) n = std::max(n, static_cast<size_t>(v) + 1);
  return n;
}

// Integer tightening: divide by the coefficient gcd and round the constant.
std::optional<LinCons> gcd_tighten(const LinCons& c) {
  Integer g = 0;
  for (auto [v, a] : c.expr.terms) g = std::gcd(g, a < 0 ? -a : a);
  if (g <= 1) return c;
  LinCons r;
  r.op = c.op;
  for (auto [v, a] : c.expr.terms) r.expr.terms[v] = a / g;
  if (c.op == CmpOp::Eq) {
    if (c.expr.constant % g != 0) return std::nullopt;
    r.expr.constant = c.expr.constant / g;
    return r;
  }
  // sum a x + k <= 0  <=>  sum (a/g) x <= floor(-k / g)
  r.expr.constant = -floor_div(-c.expr.constant, g);
  return r;
}

struct BranchAndBound {
  size_t n;
  long budget = 4000;

  IntResult run(std::vector<RatCons> cs, int depth) {
    if (--budget < 0) return {IntVerdict::Unknown, {}};
    FmResult r = fm_solve(cs, n);
    if (!r.feasible) return {IntVerdict::Unsat, {}};
    size_t frac = n;
    for (size_t v = 0; v < n; ++v)
      if (!is_integer(r.point[v])) {
        frac = v;
        break;
      }
    if (frac == n) {
      IntResult out{IntVerdict::Sat, {}};
      for (const auto& x : r.point) out.point.push_back(static_cast<Integer>(boost::multiprecision::numerator(x)));
      return out;
    }
    if (depth == 0) return {IntVerdict::Unknown, {}};
    Rational f = r.point[frac];
    RatCons le;
    le.coeffs.assign(n, Rational(0));
    le.coeffs[frac] = 1;
    le.constant = -rat_floor(f);
    le.op = CmpOp::Le;
    RatCons ge;
    ge.coeffs.assign(n, Rational(0));
    ge.coeffs[frac] = -1;
    ge.constant = rat_ceil(f);
    ge.op = CmpOp::Le;
    bool unknown = false;
    for (auto& extra : {le, ge}) {
      auto next = cs;
      next.push_back(extra);
      IntResult sub = run(std::move(next), depth - 1);
      if (sub.verdict == IntVerdict::Sat) return sub;
      if (sub.verdict == IntVerdict::Unknown) unknown = true;
    }
    return {unknown ? IntVerdict::Unknown : IntVerdict::Unsat, {}};
  }
};

}  // namespace

bool fm_feasible(const std::vector<LinCons>& cs) {
  size_t n = var_count(cs);
  std::vector<RatCons> rs;
  for (const auto& c : cs) rs.push_back(to_rat(c, n));
  return fm_solve(rs, n).feasible;
}

IntResult int_solve(const std::vector<LinCons>& cs, size_t n, int max_depth) {
  n = std::max(n, var_count(cs));
  std::vector<LinCons> base;
  std::vector<LinExpr> ne;
  for (const auto& c : cs) {
    if (c.op == CmpOp::Ne) {
      ne.push_back(c.expr);
      continue;
    }
    auto t = gcd_tighten(c.op == CmpOp::Eq ? c : c.tightened());
    if (!t) return {IntVerdict::Unsat, {}};
    base.push_back(*t);
  }
  // Each disequality e != 0 becomes e <= -1 or e >= 1.
  bool unknown = false;
  size_t combos = size_t{1} << std::min<size_t>(ne.size(), 20);
  BranchAndBound bb{n};
  for (size_t mask = 0; mask < combos; ++mask) {
    std::vector<RatCons> rs;
    bool dead = false;
    for (const auto& c : base) rs.push_back(to_rat(c, n));
    for (size_t k = 0; k < ne.size(); ++k) {
      LinExpr e = (mask >> k) & 1 ? -ne[k] : ne[k];
      auto t = gcd_tighten(LinCons{e + LinExpr::constant_expr(1), CmpOp::Le});
      if (!t) {
        dead = true;
        break;
      }
      rs.push_back(to_rat(*t, n));
    }
    if (dead) continue;
    IntResult r = bb.run(std::move(rs), max_depth);
    if (r.verdict == IntVerdict::Sat) return r;
    if (r.verdict == IntVerdict::Unknown) unknown = true;
  }
  return {unknown ? IntVerdict::Unknown : IntVerdict::Unsat, {}};
}

}  // namespace pagai
