#include "pagai/domains.hpp"

namespace pagai {

Bound bound_add(Bound a, Bound b) {
  if (!a || !b) return std::nullopt;
  return checked_add(*a, *b);
}

Bound bound_min(Bound a, Bound b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

Bound bound_max(Bound a, Bound b) {
  if (!a || !b) return std::nullopt;
  return std::max(*a, *b);
}

bool bound_le(Bound a, Bound b) {
  if (!b) return true;
  if (!a) return false;
  return *a <= *b;
}

namespace {

// Lower bounds: nullopt is -infinity.
Bound lo_max(Bound a, Bound b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

Bound lo_min(Bound a, Bound b) {
  if (!a || !b) return std::nullopt;
  return std::min(*a, *b);
}

bool lo_le(Bound a, Bound b) {
  if (!a) return true;
  if (!b) return false;
  return *a <= *b;
}

}  // namespace

Interval interval_join(const Interval& a, const Interval& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {lo_min(a.lo, b.lo), bound_max(a.hi, b.hi)};
}

Interval interval_meet(const Interval& a, const Interval& b) { return {lo_max(a.lo, b.lo), bound_min(a.hi, b.hi)}; }

Interval interval_add(const Interval& a, const Interval& b) { return {bound_add(a.lo, b.lo), bound_add(a.hi, b.hi)}; }

Interval interval_scale(const Interval& a, Integer k) {
  if (k == 0) return Interval::point(0);
  Bound lo = a.lo ? Bound(checked_mul(*a.lo, k)) : std::nullopt;
  Bound hi = a.hi ? Bound(checked_mul(*a.hi, k)) : std::nullopt;
  if (k > 0) return {lo, hi};
  return {hi, lo};
}

Box Box::bottom(size_t n) {
  Box b(n);
  b.bottom_ = true;
  return b;
}

bool Box::is_top() const {
  if (bottom_) return false;
  for (const auto& i : itv_)
    if (i.lo || i.hi) return false;
  return true;
}

void Box::set(size_t v, const Interval& i) {
  if (bottom_) return;
  if (i.empty()) {
    *this = bottom(itv_.size());
    return;
  }
  itv_[v] = i;
}

Interval Box::eval(const LinExpr& e) const {
  Interval r = Interval::point(e.constant);
  for (auto [v, c] : e.terms) r = interval_add(r, interval_scale(itv_[v], c));
  return r;
}

bool Box::leq(const Box& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  for (size_t v = 0; v < itv_.size(); ++v) {
    if (!lo_le(o.itv_[v].lo, itv_[v].lo)) return false;
    if (!bound_le(itv_[v].hi, o.itv_[v].hi)) return false;
  }
  return true;
}

Box Box::join(const Box& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  Box r(itv_.size());
  for (size_t v = 0; v < itv_.size(); ++v) r.itv_[v] = interval_join(itv_[v], o.itv_[v]);
  return r;
}

Box Box::meet(const Box& o) const {
  if (bottom_ || o.bottom_) return bottom(itv_.size());
  Box r(itv_.size());
  for (size_t v = 0; v < itv_.size(); ++v) {
    r.set(v, interval_meet(itv_[v], o.itv_[v]));
    if (r.bottom_) return r;
  }
  return r;
}

Box Box::widen(const Box& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  Box r(itv_.size());
  for (size_t v = 0; v < itv_.size(); ++v) {
    const Interval &a = itv_[v], &b = o.itv_[v];
    r.itv_[v].lo = lo_le(a.lo, b.lo) ? a.lo : std::nullopt;
    r.itv_[v].hi = bound_le(b.hi, a.hi) ? a.hi : std::nullopt;
  }
  return r;
}

Box Box::meet_constraints(const std::vector<LinCons>& cs) const {
  if (bottom_) return *this;
  std::vector<LinExpr> les;  // each `e <= 0`
  for (const auto& c0 : cs) {
    if (c0.op == CmpOp::Ne) continue;
    if (c0.op == CmpOp::Eq) {
      les.push_back(c0.expr);
      les.push_back(-c0.expr);
      continue;
    }
    les.push_back(c0.tightened().expr);
  }
  Box r = *this;
  for (int round = 0; round < 16; ++round) {
    bool changed = false;
    for (const auto& e : les) {
      Interval all = r.eval(e);
      if (all.lo && *all.lo > 0) return bottom(itv_.size());
      for (auto [v, a] : e.terms) {
        // a*x_v <= -(e - a*x_v)
        LinExpr others = e;
        others.terms.erase(v);
        Interval rest = r.eval(others);
        if (!rest.lo) continue;
        Integer rhs = -*rest.lo;
        Interval cur = r.itv_[v];
        Interval nb = cur;
        if (a > 0)
          nb.hi = bound_min(cur.hi, floor_div(rhs, a));
        else
          nb.lo = lo_max(cur.lo, ceil_div(rhs, a));
        if (!(nb == cur)) {
          r.set(v, nb);
          if (r.bottom_) return r;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return r;
}

Box Box::assign(int var, const LinExpr& rhs) const {
  if (bottom_) return *this;
  return assign_interval(var, eval(rhs));
}

Box Box::assign_interval(int var, const Interval& i) const {
  if (bottom_) return *this;
  Box r = *this;
  r.set(var, i);
  return r;
}

bool Box::contains(const std::vector<Integer>& point) const {
  if (bottom_) return false;
  for (size_t v = 0; v < itv_.size(); ++v)
    if (!itv_[v].contains(point[v])) return false;
  return true;
}

std::vector<LinCons> Box::to_constraints() const {
  std::vector<LinCons> out;
  if (bottom_) return out;
  for (size_t v = 0; v < itv_.size(); ++v) {
    const Interval& i = itv_[v];
    LinExpr x = LinExpr::var(static_cast<int>(v));
    if (i.lo && i.hi && *i.lo == *i.hi) {
      out.push_back(LinCons::make(x, CmpOp::Eq, LinExpr::constant_expr(*i.lo)));
      continue;
    }
    if (i.lo) out.push_back(LinCons::make(x, CmpOp::Ge, LinExpr::constant_expr(*i.lo)));
    if (i.hi) out.push_back(LinCons::make(x, CmpOp::Le, LinExpr::constant_expr(*i.hi)));
  }
  return out;
}

}  // namespace pagai
