#pragma once

// Numerical abstract domains over a fixed list of integer program variables:
// interval boxes and octagons, wrapped in a tagged AbstractValue.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pagai/ir.hpp"
#include "pagai/linear.hpp"

namespace pagai {

/// Upper bound; nullopt is +infinity.
using Bound = std::optional<Integer>;

Bound bound_add(Bound a, Bound b);
Bound bound_min(Bound a, Bound b);
Bound bound_max(Bound a, Bound b);
bool bound_le(Bound a, Bound b);

struct Interval {
  Bound lo;  // nullopt is -infinity
  Bound hi;  // nullopt is +infinity

  static Interval top() { return {}; }
  static Interval point(Integer v) { return {v, v}; }
  bool empty() const { return lo && hi && *lo > *hi; }
  bool contains(Integer v) const { return (!lo || *lo <= v) && (!hi || v <= *hi); }
  bool operator==(const Interval&) const = default;
};

Interval interval_join(const Interval& a, const Interval& b);
Interval interval_meet(const Interval& a, const Interval& b);
Interval interval_add(const Interval& a, const Interval& b);
Interval interval_scale(const Interval& a, Integer k);

class Box {
public:
  explicit Box(size_t n = 0) : itv_(n) {}
  static Box bottom(size_t n);

  size_t size() const { return itv_.size(); }
  bool is_bottom() const { return bottom_; }
  bool is_top() const;
  const Interval& get(size_t v) const { return itv_[v]; }
  void set(size_t v, const Interval& i);

  Interval eval(const LinExpr& e) const;
  bool leq(const Box& o) const;
  Box join(const Box& o) const;
  Box meet(const Box& o) const;
  Box widen(const Box& o) const;
  Box meet_constraints(const std::vector<LinCons>& cs) const;
  Box assign(int var, const LinExpr& rhs) const;
  Box assign_interval(int var, const Interval& i) const;
  bool contains(const std::vector<Integer>& point) const;

  std::vector<LinCons> to_constraints() const;
  bool operator==(const Box& o) const { return bottom_ == o.bottom_ && (bottom_ || itv_ == o.itv_); }

private:
  std::vector<Interval> itv_;
  bool bottom_ = false;
};

/// Difference-bound matrix over V_{2i} = +x_i, V_{2i+1} = -x_i; entry (k, l)
/// bounds V_l - V_k. The stored matrix is kept as built; its tight closure is
/// computed on demand and cached. Widening reads the stored matrix.
class Octagon {
public:
  explicit Octagon(size_t n = 0);
  static Octagon bottom(size_t n);

  size_t size() const { return n_; }
  bool is_bottom() const;
  bool is_top() const;

  /// Closed entry; +infinity when the value is bottom.
  Bound at(size_t k, size_t l) const;
  Bound raw(size_t k, size_t l) const { return m_[k * 2 * n_ + l]; }

  Interval interval(size_t v) const;
  /// Upper bound of a linear expression, exact when it is octagonal.
  Bound upper(const LinExpr& e) const;

  bool leq(const Octagon& o) const;
  Octagon join(const Octagon& o) const;
  Octagon meet(const Octagon& o) const;
  Octagon widen(const Octagon& o) const;
  Octagon meet_constraints(const std::vector<LinCons>& cs) const;
  Octagon assign(int var, const LinExpr& rhs) const;
  Octagon assign_interval(int var, const Interval& i) const;
  bool contains(const std::vector<Integer>& point) const;

  /// Non-redundant constraints with the same concretization.
  std::vector<LinCons> to_constraints() const;
  bool equals(const Octagon& o) const { return leq(o) && o.leq(*this); }

  /// Tight integer strong closure of a (2n)^2 matrix; false when empty.
  static bool close_matrix(std::vector<Bound>& m, size_t n);

private:
  struct Closure {
    std::vector<Bound> m;
    bool bottom = false;
  };

  const Closure& closure() const;
  Bound& ref(size_t k, size_t l) { return m_[k * 2 * n_ + l]; }
  /// Adds `V_l - V_k <= c` together with its coherent twin.
  void add_entry(size_t k, size_t l, Integer c);
  /// Adds `e <= 0` when it is octagonal; returns false otherwise.
  bool add_octagonal(const LinExpr& e);
  /// Closed copy with every constraint on `var` removed.
  Octagon forgotten(int var) const;
  void set_closed(std::vector<Bound> m);
  void touch() {
    cache_.reset();
    widened_ = false;
  }

  size_t n_ = 0;
  std::vector<Bound> m_;
  bool bottom_ = false;
  // Set on widening results, whose raw matrix must stay the left operand of
  // the next widening for the sequence to stabilize.
  bool widened_ = false;
  mutable std::shared_ptr<const Closure> cache_;
};

enum class DomainKind { Intervals, Octagons };

DomainKind parse_domain(const std::string& name);
const char* to_string(DomainKind d);

/// Element of the chosen domain over a shared variable environment.
class AbstractValue {
public:
  using Env = std::shared_ptr<const std::vector<std::string>>;

  static AbstractValue top(DomainKind d, Env env);
  static AbstractValue bottom(DomainKind d, Env env);

  DomainKind domain() const { return domain_; }
  const Env& env() const { return env_; }
  const std::vector<std::string>& names() const { return *env_; }

  bool is_bottom() const;
  bool is_top() const;
  bool leq(const AbstractValue& o) const;
  bool equals(const AbstractValue& o) const { return leq(o) && o.leq(*this); }
  AbstractValue join(const AbstractValue& o) const;
  AbstractValue meet(const AbstractValue& o) const;
  AbstractValue widen(const AbstractValue& o) const;
  AbstractValue meet_constraints(const std::vector<LinCons>& cs) const;
  AbstractValue assign(int var, const LinExpr& rhs) const;
  AbstractValue input(int var, Integer lo, Integer hi) const;
  bool contains(const std::vector<Integer>& point) const;
  Interval interval(int var) const;

  /// Conjunction with the same concretization; empty means true. Bottom is
  /// reported through is_bottom(), not through the list.
  std::vector<LinCons> to_constraints() const;
  /// Deterministic text, e.g. `-100000 <= x_old <= 100000`, `true`, `false`.
  std::string render() const;

  const Box* box() const { return std::get_if<Box>(&v_); }
  const Octagon* octagon() const { return std::get_if<Octagon>(&v_); }

private:
  AbstractValue(DomainKind d, Env env, std::variant<Box, Octagon> v)
      : domain_(d), env_(std::move(env)), v_(std::move(v)) {}
  void check_env(const AbstractValue& o) const;

  DomainKind domain_ = DomainKind::Intervals;
  Env env_;
  std::variant<Box, Octagon> v_;
};

/// Renders a conjunction in the domain's display order.
std::string render_constraints(const std::vector<LinCons>& cs, const std::vector<std::string>& names);

AbstractValue apply_edge(const Edge& e, const AbstractValue& a);
/// Image of `a` along a path of the CFG (guards then actions, edge by edge).
AbstractValue transform(const Cfg& cfg, const Path& p, const AbstractValue& a);
/// Entry value: top restricted by the declared initializers.
AbstractValue initial_value(const Cfg& cfg, DomainKind d, const AbstractValue::Env& env);

}  // namespace pagai
