#include <map>

#include "pagai/domains.hpp"

namespace pagai {

DomainKind parse_domain(const std::string& name) {
  if (name == "intervals" || name == "box" || name == "boxes") return DomainKind::Intervals;
  if (name == "octagons" || name == "octagon") return DomainKind::Octagons;
  throw error("unknown domain '" + name + "'");
}

const char* to_string(DomainKind d) { return d == DomainKind::Intervals ? "intervals" : "octagons"; }

AbstractValue AbstractValue::top(DomainKind d, Env env) {
  size_t n = env->size();
  if (d == DomainKind::Intervals) return {d, std::move(env), Box(n)};
  return {d, std::move(env), Octagon(n)};
}

AbstractValue AbstractValue::bottom(DomainKind d, Env env) {
  size_t n = env->size();
  if (d == DomainKind::Intervals) return {d, std::move(env), Box::bottom(n)};
  return {d, std::move(env), Octagon::bottom(n)};
}

void AbstractValue::check_env(const AbstractValue& o) const {
  if (domain_ != o.domain_) throw error("abstract values from different domains");
  if (env_ != o.env_ && *env_ != *o.env_) throw error("abstract values over different environments");
}

bool AbstractValue::is_bottom() const {
  return std::visit([](const auto& v) { return v.is_bottom(); }, v_);
}

bool AbstractValue::is_top() const {
  return std::visit([](const auto& v) { return v.is_top(); }, v_);
}

bool AbstractValue::leq(const AbstractValue& o) const {
  check_env(o);
  if (auto b = box()) return b->leq(*o.box());
  return octagon()->leq(*o.octagon());
}

AbstractValue AbstractValue::join(const AbstractValue& o) const {
  check_env(o);
  if (auto b = box()) return {domain_, env_, b->join(*o.box())};
  return {domain_, env_, octagon()->join(*o.octagon())};
}

AbstractValue AbstractValue::meet(const AbstractValue& o) const {
  check_env(o);
  if (auto b = box()) return {domain_, env_, b->meet(*o.box())};
  return {domain_, env_, octagon()->meet(*o.octagon())};
}

AbstractValue AbstractValue::widen(const AbstractValue& o) const {
  check_env(o);
  if (auto b = box()) return {domain_, env_, b->widen(*o.box())};
  return {domain_, env_, octagon()->widen(*o.octagon())};
}

AbstractValue AbstractValue::meet_constraints(const std::vector<LinCons>& cs) const {
  if (auto b = box()) return {domain_, env_, b->meet_constraints(cs)};
  return {domain_, env_, octagon()->meet_constraints(cs)};
}

AbstractValue AbstractValue::assign(int var, const LinExpr& rhs) const {
  if (auto b = box()) return {domain_, env_, b->assign(var, rhs)};
  return {domain_, env_, octagon()->assign(var, rhs)};
}

AbstractValue AbstractValue::input(int var, Integer lo, Integer hi) const {
  Interval i{lo, hi};
  if (auto b = box()) return {domain_, env_, b->assign_interval(var, i)};
  return {domain_, env_, octagon()->assign_interval(var, i)};
}

bool AbstractValue::contains(const std::vector<Integer>& point) const {
  return std::visit([&](const auto& v) { return v.contains(point); }, v_);
}

Interval AbstractValue::interval(int var) const {
  if (auto b = box()) return b->is_bottom() ? Interval{1, 0} : b->get(var);
  if (octagon()->is_bottom()) return Interval{1, 0};
  return octagon()->interval(var);
}

std::vector<LinCons> AbstractValue::to_constraints() const {
  return std::visit([](const auto& v) { return v.to_constraints(); }, v_);
}

std::string AbstractValue::render() const {
  if (is_bottom()) return "false";
  return render_constraints(to_constraints(), *env_);
}

std::string render_constraints(const std::vector<LinCons>& cs, const std::vector<std::string>& names) {
  if (cs.empty()) return "true";
  // Unary constraints on the same variable print as one range.
  std::map<int, std::pair<Bound, Bound>> ranges;
  auto unary = [](const LinCons& c) {
    return c.expr.terms.size() == 1 && c.expr.terms.begin()->second == 1 && c.op != CmpOp::Ne;
  };
  for (const auto& c : cs) {
    if (!unary(c)) continue;
    int v = c.expr.terms.begin()->first;
    Integer k = -c.expr.constant;
    auto& [lo, hi] = ranges[v];
    if (c.op == CmpOp::Eq || c.op == CmpOp::Ge || c.op == CmpOp::Gt) {
      Integer b = c.op == CmpOp::Gt ? k + 1 : k;
      lo = lo ? std::max(*lo, b) : b;
    }
    if (c.op == CmpOp::Eq || c.op == CmpOp::Le || c.op == CmpOp::Lt) {
      Integer b = c.op == CmpOp::Lt ? k - 1 : k;
      hi = hi ? std::min(*hi, b) : b;
    }
  }
  std::string out;
  auto emit = [&](const std::string& s) {
    if (!out.empty()) out += " && ";
    out += s;
  };
  std::map<int, bool> done;
  for (const auto& c : cs) {
    if (!unary(c)) {
      emit(render(c, names));
      continue;
    }
    int v = c.expr.terms.begin()->first;
    if (done[v]) continue;
    done[v] = true;
    auto [lo, hi] = ranges[v];
    const std::string& n = names[v];
    if (lo && hi && *lo == *hi)
      emit(n + " = " + std::to_string(*lo));
    else if (lo && hi)
      emit(std::to_string(*lo) + " <= " + n + " <= " + std::to_string(*hi));
    else if (lo)
      emit(n + " >= " + std::to_string(*lo));
    else
      emit(n + " <= " + std::to_string(*hi));
  }
  return out;
}

AbstractValue apply_edge(const Edge& e, const AbstractValue& a) {
  AbstractValue r = a.meet_constraints(e.guard);
  if (r.is_bottom()) return r;
  for (const auto& act : e.actions) {
    if (act.kind == Action::Kind::Input)
      r = r.input(act.var, act.lo, act.hi);
    else
      r = r.assign(act.var, act.rhs);
  }
  return r;
}

AbstractValue transform(const Cfg& cfg, const Path& p, const AbstractValue& a) {
  AbstractValue r = a;
  for (int e : p.edges) {
    if (r.is_bottom()) return r;
    r = apply_edge(cfg.edges[e], r);
  }
  return r;
}

AbstractValue initial_value(const Cfg& cfg, DomainKind d, const AbstractValue::Env& env) {
  return AbstractValue::top(d, env).meet_constraints(cfg.initial);
}

}  // namespace pagai
