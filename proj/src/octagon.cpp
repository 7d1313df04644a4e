#include <algorithm>
#include <cstdlib>
#include <tuple>

#include "pagai/domains.hpp"

namespace pagai {

namespace {

size_t bar(size_t k) { return k ^ 1U; }
// Index of the DBM variable standing for `s * x_v`, s = +-1.
size_t signed_index(int v, Integer s) { return 2 * static_cast<size_t>(v) + (s < 0 ? 1 : 0); }

}  // namespace

Octagon::Octagon(size_t n) : n_(n), m_(4 * n * n) {
  for (size_t k = 0; k < 2 * n; ++k) ref(k, k) = 0;
}

Octagon Octagon::bottom(size_t n) {
  Octagon o(n);
  o.bottom_ = true;
  return o;
}

bool Octagon::close_matrix(std::vector<Bound>& m, size_t n) {
  size_t N = 2 * n;
  auto at = [&](size_t i, size_t j) -> Bound& { return m[i * N + j]; };
  for (size_t k = 0; k < N; ++k)
    for (size_t i = 0; i < N; ++i) {
      if (!at(i, k)) continue;
      for (size_t j = 0; j < N; ++j) {
        if (!at(k, j)) continue;
        Integer via = checked_add(*at(i, k), *at(k, j));
        if (!at(i, j) || via < *at(i, j)) at(i, j) = via;
      }
    }
  for (size_t i = 0; i < N; ++i) {
    if (*at(i, i) < 0) return false;
    at(i, i) = 0;
  }
  for (size_t i = 0; i < N; ++i)
    if (at(i, bar(i))) at(i, bar(i)) = 2 * floor_div(*at(i, bar(i)), 2);
  for (size_t i = 0; i < N; ++i)
    for (size_t j = 0; j < N; ++j) {
      if (!at(i, bar(i)) || !at(bar(j), j)) continue;
      Integer s = checked_add(*at(i, bar(i)), *at(bar(j), j)) / 2;
      if (!at(i, j) || s < *at(i, j)) at(i, j) = s;
    }
  for (size_t i = 0; i < N; ++i) {
    if (at(i, bar(i)) && at(bar(i), i) && *at(i, bar(i)) + *at(bar(i), i) < 0) return false;
    if (*at(i, i) < 0) return false;
  }
  return true;
}

const Octagon::Closure& Octagon::closure() const {
  if (!cache_) {
    auto c = std::make_shared<Closure>();
    if (bottom_) {
      c->bottom = true;
    } else {
      c->m = m_;
      c->bottom = !close_matrix(c->m, n_);
    }
    cache_ = std::move(c);
  }
  return *cache_;
}

void Octagon::set_closed(std::vector<Bound> m) {
  m_ = std::move(m);
  auto c = std::make_shared<Closure>();
  c->m = m_;
  cache_ = std::move(c);
}

bool Octagon::is_bottom() const { return closure().bottom; }

bool Octagon::is_top() const {
  if (is_bottom()) return false;
  const auto& m = closure().m;
  for (size_t i = 0; i < 2 * n_; ++i)
    for (size_t j = 0; j < 2 * n_; ++j)
      if (i != j && m[i * 2 * n_ + j]) return false;
  return true;
}

Bound Octagon::at(size_t k, size_t l) const {
  const auto& c = closure();
  if (c.bottom) return std::nullopt;
  return c.m[k * 2 * n_ + l];
}

Interval Octagon::interval(size_t v) const {
  Interval r;
  Bound up = at(2 * v + 1, 2 * v);
  Bound down = at(2 * v, 2 * v + 1);
  if (up) r.hi = floor_div(*up, 2);
  if (down) r.lo = -floor_div(*down, 2);
  return r;
}

Bound Octagon::upper(const LinExpr& e) const {
  if (is_bottom()) return std::nullopt;
  Interval sum = Interval::point(e.constant);
  for (auto [v, c] : e.terms) sum = interval_add(sum, interval_scale(interval(v), c));
  Bound best = sum.hi;
  if (e.terms.size() == 2) {
    auto it = e.terms.begin();
    auto [u, a] = *it++;
    auto [v, b] = *it;
    if (std::llabs(a) == std::llabs(b)) {
      Bound c = at(bar(signed_index(v, b)), signed_index(u, a));
      if (c) best = bound_min(best, checked_add(checked_mul(std::llabs(a), *c), e.constant));
    }
  }
  return best;
}

void Octagon::add_entry(size_t k, size_t l, Integer c) {
  touch();
  Bound& a = ref(k, l);
  if (!a || c < *a) a = c;
  Bound& b = ref(bar(l), bar(k));
  if (!b || c < *b) b = c;
}

bool Octagon::add_octagonal(const LinExpr& e) {
  if (e.terms.empty()) {
    if (e.constant > 0) {
      bottom_ = true;
      touch();
    }
    return true;
  }
  if (e.terms.size() == 1) {
    auto [v, a] = *e.terms.begin();
    Integer bound = floor_div(-e.constant, std::llabs(a));
    size_t i = signed_index(v, a);
    add_entry(bar(i), i, checked_mul(2, bound));
    return true;
  }
  if (e.terms.size() == 2) {
    auto it = e.terms.begin();
    auto [u, a] = *it++;
    auto [v, b] = *it;
    if (std::llabs(a) != std::llabs(b)) return false;
    Integer bound = floor_div(-e.constant, std::llabs(a));
    add_entry(bar(signed_index(v, b)), signed_index(u, a), bound);
    return true;
  }
  return false;
}

bool Octagon::leq(const Octagon& o) const {
  if (is_bottom()) return true;
  if (o.is_bottom()) return false;
  const auto& a = closure().m;
  for (size_t i = 0; i < a.size(); ++i) {
    const Bound& b = o.m_[i];
    if (b && (!a[i] || *a[i] > *b)) return false;
  }
  return true;
}

Octagon Octagon::join(const Octagon& o) const {
  if (is_bottom()) return o;
  if (o.is_bottom()) return *this;
  const auto& a = closure().m;
  const auto& b = o.closure().m;
  std::vector<Bound> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = bound_max(a[i], b[i]);
  Octagon out(n_);
  out.set_closed(std::move(r));
  return out;
}

Octagon Octagon::meet(const Octagon& o) const {
  if (bottom_ || o.bottom_) return bottom(n_);
  Octagon out(n_);
  for (size_t i = 0; i < m_.size(); ++i) out.m_[i] = bound_min(m_[i], o.m_[i]);
  return out;
}

Octagon Octagon::widen(const Octagon& o) const {
  if (is_bottom()) return o;
  if (o.is_bottom()) return *this;
  const auto& a = widened_ ? m_ : closure().m;
  const auto& b = o.closure().m;
  Octagon out(n_);
  for (size_t i = 0; i < m_.size(); ++i) out.m_[i] = bound_le(b[i], a[i]) ? a[i] : std::nullopt;
  for (size_t k = 0; k < 2 * n_; ++k) out.ref(k, k) = 0;
  out.widened_ = true;
  return out;
}

Octagon Octagon::forgotten(int var) const {
  if (is_bottom()) return bottom(n_);
  std::vector<Bound> m = closure().m;
  size_t N = 2 * n_;
  for (size_t k : {2 * static_cast<size_t>(var), 2 * static_cast<size_t>(var) + 1})
    for (size_t j = 0; j < N; ++j) {
      if (j == k) continue;
      m[k * N + j] = std::nullopt;
      m[j * N + k] = std::nullopt;
    }
  Octagon out(n_);
  out.set_closed(std::move(m));
  return out;
}

Octagon Octagon::meet_constraints(const std::vector<LinCons>& cs) const {
  Octagon r = *this;
  if (r.bottom_) return r;
  std::vector<LinExpr> rest;
  for (const auto& c : cs) {
    std::vector<LinExpr> les;
    if (c.op == CmpOp::Ne) continue;
    if (c.op == CmpOp::Eq) {
      les = {c.expr, -c.expr};
    } else {
      les = {c.tightened().expr};
    }
    for (auto& e : les)
      if (!r.add_octagonal(e)) rest.push_back(e);
  }
  // Non-octagonal `e <= 0`: keep the unary and +-pair consequences.
  for (int round = 0; round < 2 && !rest.empty(); ++round) {
    if (r.is_bottom()) return bottom(n_);
    Octagon base = r;
    for (const auto& e : rest) {
      for (auto [v, a] : e.terms) {
        LinExpr others = e;
        others.terms.erase(v);
        // a*x_v <= -others <= -min(others) = upper(-others)
        Bound ub = base.upper(-others);
        if (ub) r.add_octagonal(LinExpr::var(v, a) - LinExpr::constant_expr(*ub));
      }
      for (auto i = e.terms.begin(); i != e.terms.end(); ++i)
        for (auto j = std::next(i); j != e.terms.end(); ++j) {
          if (std::llabs(i->second) != std::llabs(j->second)) continue;
          LinExpr pair = LinExpr::var(i->first, i->second) + LinExpr::var(j->first, j->second);
          LinExpr others = e - pair;
          Bound ub = base.upper(-others);
          if (ub) r.add_octagonal(pair - LinExpr::constant_expr(*ub));
        }
    }
  }
  return r;
}

Octagon Octagon::assign(int var, const LinExpr& rhs) const {
  if (is_bottom()) return bottom(n_);
  Integer self = rhs.coeff(var);
  size_t N = 2 * n_;
  if (rhs.terms.size() == 1 && std::llabs(self) == 1) {
    std::vector<Bound> m = closure().m;
    size_t p = 2 * static_cast<size_t>(var), q = p + 1;
    if (self == -1) {
      std::vector<Bound> s(m.size());
      auto perm = [&](size_t k) { return k == p ? q : (k == q ? p : k); };
      for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j) s[perm(i) * N + perm(j)] = m[i * N + j];
      m = std::move(s);
    }
    Integer c = rhs.constant;
    for (size_t i = 0; i < N; ++i)
      for (size_t j = 0; j < N; ++j) {
        Bound& b = m[i * N + j];
        if (!b) continue;
        Integer d = 0;
        if (j == p) d += c;
        if (j == q) d -= c;
        if (i == p) d -= c;
        if (i == q) d += c;
        b = checked_add(*b, d);
      }
    Octagon out(n_);
    out.set_closed(std::move(m));
    return out;
  }
  if (rhs.terms.size() == 1 && self == 0 && std::llabs(rhs.terms.begin()->second) == 1) {
    Octagon out = forgotten(var);
    LinExpr diff = LinExpr::var(var) - rhs;  // x - (+-y) - c = 0
    out.add_octagonal(diff);
    out.add_octagonal(-diff);
    return out;
  }
  std::vector<LinExpr> les;
  auto bound_expr = [&](const LinExpr& lhs_new, const LinExpr& old_value) {
    // lhs_new - x stands for old_value; bound: lhs_new <= upper(old_value)
    Bound ub = upper(old_value);
    if (ub) les.push_back(lhs_new - LinExpr::constant_expr(*ub));
  };
  LinExpr x = LinExpr::var(var);
  bound_expr(x, rhs);
  bound_expr(-x, -rhs);
  for (size_t y = 0; y < n_; ++y) {
    if (static_cast<int>(y) == var) continue;
    LinExpr yv = LinExpr::var(static_cast<int>(y));
    bound_expr(x - yv, rhs - yv);
    bound_expr(yv - x, yv - rhs);
    bound_expr(x + yv, rhs + yv);
    bound_expr(-x - yv, -rhs - yv);
  }
  Octagon out = forgotten(var);
  for (const auto& e : les) out.add_octagonal(e);
  return out;
}

Octagon Octagon::assign_interval(int var, const Interval& i) const {
  if (is_bottom()) return bottom(n_);
  Octagon out = forgotten(var);
  LinExpr x = LinExpr::var(var);
  if (i.hi) out.add_octagonal(x - LinExpr::constant_expr(*i.hi));
  if (i.lo) out.add_octagonal(LinExpr::constant_expr(*i.lo) - x);
  return out;
}

bool Octagon::contains(const std::vector<Integer>& point) const {
  if (bottom_) return false;
  size_t N = 2 * n_;
  auto val = [&](size_t k) { return k % 2 == 0 ? point[k / 2] : -point[k / 2]; };
  for (size_t i = 0; i < N; ++i)
    for (size_t j = 0; j < N; ++j) {
      const Bound& b = m_[i * N + j];
      if (b && val(j) - val(i) > *b) return false;
    }
  return true;
}

std::vector<LinCons> Octagon::to_constraints() const {
  std::vector<LinCons> out;
  if (is_bottom()) return out;
  const auto& full = closure().m;
  size_t N = 2 * n_;
  // One representative (k, l) per coherent pair, in removal-trial order:
  // binary first, then unary from the last variable backwards, so that
  // bounds survive on the earliest variables.
  std::vector<std::pair<size_t, size_t>> cand;
  for (size_t k = 0; k < N; ++k)
    for (size_t l = 0; l < N; ++l) {
      if (k == l || l == bar(k) || !full[k * N + l]) continue;
      if (std::make_pair(k, l) > std::make_pair(bar(l), bar(k))) continue;
      cand.push_back({k, l});
    }
  for (size_t v = n_; v-- > 0;)
    for (size_t k : {2 * v + 1, 2 * v})
      if (full[k * N + bar(k)]) cand.push_back({k, bar(k)});
  std::vector<bool> keep(cand.size(), true);
  auto build = [&](size_t skip) {
    std::vector<Bound> m(N * N);
    for (size_t i = 0; i < N; ++i) m[i * N + i] = 0;
    for (size_t c = 0; c < cand.size(); ++c) {
      if (!keep[c] || c == skip) continue;
      auto [k, l] = cand[c];
      m[k * N + l] = full[k * N + l];
      m[bar(l) * N + bar(k)] = full[k * N + l];
    }
    close_matrix(m, n_);
    return m;
  };
  for (size_t c = 0; c < cand.size(); ++c)
    if (build(c) == full) keep[c] = false;

  // entry (k, l) with bound b: s_l x_{l/2} - s_k x_{k/2} <= b
  struct Item {
    size_t a, b;
    int kind;
    LinCons cons;
  };
  std::vector<Item> items;
  for (size_t c = 0; c < cand.size(); ++c) {
    if (!keep[c]) continue;
    auto [k, l] = cand[c];
    Integer b = *full[k * N + l];
    int vl = static_cast<int>(l / 2), vk = static_cast<int>(k / 2);
    Integer sl = l % 2 == 0 ? 1 : -1, sk = k % 2 == 0 ? 1 : -1;
    if (l == bar(k)) {
      Integer bound = floor_div(b, 2);
      LinExpr x = LinExpr::var(vl);
      LinCons lc = sl > 0 ? LinCons::make(x, CmpOp::Le, LinExpr::constant_expr(bound))
                          : LinCons::make(x, CmpOp::Ge, LinExpr::constant_expr(-bound));
      items.push_back({static_cast<size_t>(vl), static_cast<size_t>(vl), sl > 0 ? 1 : 0, lc});
      continue;
    }
    // sl*x_vl - sk*x_vk <= b, oriented so the lower-index variable is positive
    int u = std::min(vl, vk), w = std::max(vl, vk);
    Integer su = u == vl ? sl : -sk, sw = u == vl ? -sk : sl;
    LinExpr lhs = LinExpr::var(u, su) + LinExpr::var(w, sw);
    LinCons lc = LinCons::make(lhs, CmpOp::Le, LinExpr::constant_expr(b));
    if (su < 0) lc = LinCons::make(-lhs, CmpOp::Ge, LinExpr::constant_expr(-b));
    items.push_back({static_cast<size_t>(u), static_cast<size_t>(w), 2 + (lc.expr.coeff(w) > 0 ? 1 : 0), lc});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& x, const Item& y) { return std::tie(x.a, x.b, x.kind) < std::tie(y.a, y.b, y.kind); });
  for (const auto& it : items) out.push_back(it.cons);
  // Turn `e >= c` and `e <= c` over the same e into `e = c`.
  std::vector<LinCons> merged;
  std::vector<bool> used(out.size(), false);
  for (size_t i = 0; i < out.size(); ++i) {
    if (used[i]) continue;
    LinCons c = out[i];
    for (size_t j = i + 1; j < out.size(); ++j) {
      if (used[j]) continue;
      LinExpr a = out[i].expr, b = out[j].expr;
      Integer ca = a.constant, cb = b.constant;
      a.constant = b.constant = 0;
      if (!(a == b) || ca != cb) continue;
      bool opposite = (out[i].op == CmpOp::Le && out[j].op == CmpOp::Ge) ||
                      (out[i].op == CmpOp::Ge && out[j].op == CmpOp::Le);
      if (!opposite) continue;
      c.op = CmpOp::Eq;
      used[j] = true;
      break;
    }
    merged.push_back(c);
  }
  return merged;
}

}  // namespace pagai
