#include <algorithm>
#include <cctype>
#include <ostream>

#include "engine_internal.hpp"

namespace pagai {

Technique parse_technique(const std::string& s) {
  std::string u;
  for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "S") return Technique::S;
  if (u == "G") return Technique::G;
  if (u == "PF") return Technique::PF;
  if (u == "G+PF" || u == "GPF") return Technique::GPF;
  if (u == "DIS") return Technique::DIS;
  throw error("unknown technique '" + s + "' (expected S, G, PF, G+PF or DIS)");
}

std::string to_string(Technique t) {
  switch (t) {
    case Technique::S: return "S";
    case Technique::G: return "G";
    case Technique::PF: return "PF";
    case Technique::GPF: return "G+PF";
    case Technique::DIS: return "DIS";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stronger: return "stronger";
    case Verdict::Weaker: return "weaker";
    case Verdict::Incomparable: return "incomparable";
    case Verdict::Equal: return "equal";
  }
  return "?";
}

std::vector<nlohmann::ordered_json> EventLog::of_kind(const std::string& kind) const {
  std::vector<nlohmann::ordered_json> out;
  for (const auto& e : events_)
    if (e.value("event", "") == kind) out.push_back(e);
  return out;
}

void EventLog::write_jsonl(std::ostream& os) const {
  for (const auto& e : events_) os << e.dump() << '\n';
}

std::vector<AbstractValue> AnalysisResult::disjuncts(NodeId p) const {
  if (is_disjunctive()) return disjunctive.at(p).disjuncts;
  return {values.at(p)};
}

std::shared_ptr<const SemanticsFormula> prepare(const Function& f) {
  auto ssa = std::make_shared<const SsaCfg>(to_ssa(build_cfg(f)));
  PrSelection sel = select_pr(ssa->cfg);
  return encode_semantics(ssa, sel);
}

std::shared_ptr<const SemanticsFormula> prepare_source(const std::string& source, const std::string& function) {
  Program prog = parse_program(source);
  return prepare(prog.function(function));
}

AnalysisResult analyze(const std::shared_ptr<const SemanticsFormula>& sf, Technique t, const EngineOptions& opts,
                       Solver& solver) {
  switch (t) {
    case Technique::S: return run_standard(sf, opts);
    case Technique::G: return run_guided(sf, opts);
    case Technique::PF: return run_pathfocusing(sf, opts, solver);
    case Technique::GPF: return run_combined(sf, opts, solver);
    case Technique::DIS: return run_disjunctive(sf, opts, solver);
  }
  throw error("unknown technique");
}

namespace {

std::vector<std::string> witness_names(const std::vector<std::string>& vars) {
  std::vector<std::string> out;
  for (const auto& v : vars) out.push_back("w_" + v);
  return out;
}

/// gamma(as) included in gamma(bs), as disjunctions.
bool implies(const std::vector<AbstractValue>& as, const std::vector<AbstractValue>& bs, Solver& solver) {
  if (as.size() == 1 && bs.size() == 1) return as[0].leq(bs[0]);
  auto names = witness_names(as.at(0).names());
  Formula f = f_and({disjunction_formula(as, names), f_not(disjunction_formula(bs, names))});
  return !solver.solve(f).sat;
}

}  // namespace

bool exact_join_check(const AbstractValue& a, const AbstractValue& b, Solver& solver) {
  auto names = witness_names(a.names());
  Formula f = f_and({to_formula(a.join(b), names), f_not(to_formula(a, names)), f_not(to_formula(b, names))});
  return !solver.solve(f).sat;
}

InductiveReport check_inductive(const AnalysisResult& r, Solver& solver) {
  InductiveReport rep;
  const auto& sf = r.sf;
  const Cfg& cfg = sf->cfg();
  auto names = witness_names(cfg.vars);

  std::vector<Formula> init;
  for (const auto& c : cfg.initial) init.push_back(f_atom(c, names));
  Formula entry_ok = f_and({f_and(init), f_not(disjunction_formula(r.disjuncts(cfg.entry), names))});
  if (solver.solve(entry_ok).sat)
    rep.violations.push_back("entry p" + std::to_string(cfg.entry) + " does not contain the initial states");

  for (NodeId i : sf->sel.pr) {
    Formula src = disjunction_formula(r.disjuncts(i), sf->src_vals[i]);
    for (NodeId j : sf->sel.pr) {
      Formula f = f_and({f_rho(sf), source_selector(*sf, i), src, f_bool(sf->dst_pred[j]),
                         f_not(disjunction_formula(r.disjuncts(j), sf->dst_vals[j]))});
      SolveResult res = solver.solve(f);
      if (!res.sat) continue;
      std::string msg = "p" + std::to_string(i) + " -> p" + std::to_string(j);
      try {
        msg += " along " + render_path(cfg, extract_path(*sf, res.model).path);
      } catch (const SolverError&) {
      }
      rep.violations.push_back(msg);
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

Comparison compare_invariants(const AnalysisResult& r1, const AnalysisResult& r2, Solver& solver) {
  const auto& pr = r1.sf->sel.pr;
  if (pr != r2.sf->sel.pr || r1.cfg().vars != r2.cfg().vars)
    throw error("compare_invariants: results are for different programs");
  Comparison c;
  int n[4] = {0, 0, 0, 0};
  for (NodeId p : pr) {
    auto a = r1.disjuncts(p), b = r2.disjuncts(p);
    bool ab = implies(a, b, solver), ba = implies(b, a, solver);
    Verdict v = ab && ba ? Verdict::Equal : ab ? Verdict::Stronger : ba ? Verdict::Weaker : Verdict::Incomparable;
    c.points.emplace_back(p, v);
    ++n[static_cast<int>(v)];
  }
  if (pr.empty()) {
    c.equal = 100;
    return c;
  }
  double total = static_cast<double>(pr.size());
  c.stronger = 100.0 * n[0] / total;
  c.weaker = 100.0 * n[1] / total;
  c.incomparable = 100.0 * n[2] / total;
  c.equal = 100.0 - c.stronger - c.weaker - c.incomparable;
  return c;
}

namespace detail {

AbstractValue::Env make_env(const Cfg& cfg) { return std::make_shared<const std::vector<std::string>>(cfg.vars); }

std::vector<AbstractValue> initial_values(const Cfg& cfg, DomainKind d, const AbstractValue::Env& env) {
  std::vector<AbstractValue> xs(cfg.num_nodes, AbstractValue::bottom(d, env));
  xs[cfg.entry] = initial_value(cfg, d, env);
  return xs;
}

AbstractValue self_loop_sequence(const Cfg& cfg, const Path& p, const AbstractValue& x, const EngineOptions& opts,
                                 Stats& stats) {
  AbstractValue y = x;
  for (int it = 0;; ++it) {
    if (it >= opts.self_loop_limit) throw error("self-loop widening sequence did not stabilize");
    AbstractValue img = transform(cfg, p, y);
    if (img.leq(y)) break;
    AbstractValue z = y.join(img);
    if (it >= opts.widening_delay) {
      z = y.widen(z);
      ++stats.widenings;
    }
    y = z;
  }
  for (int r = 0; r < opts.narrowing_rounds; ++r) {
    AbstractValue z = y.meet(x.join(transform(cfg, p, y)));
    if (z.equals(y)) break;
    if (!x.leq(z) || !transform(cfg, p, z).leq(z)) break;
    y = z;
  }
  return y;
}

nlohmann::ordered_json path_json(const Cfg& cfg, const Path& p) {
  nlohmann::ordered_json j;
  j["src"] = p.src;
  j["dst"] = p.dst;
  j["edges"] = p.edges;
  j["text"] = render_path(cfg, p);
  return j;
}

SolveResult query(Solver& solver, const Formula& f, AnalysisResult& r, const char* kind, NodeId point) {
  SolveResult res = solver.solve(f);
  ++r.stats.queries;
  r.events.add({{"event", "query"}, {"kind", kind}, {"point", point}, {"sat", res.sat}});
  return res;
}

AbstractValue accumulate(const AbstractValue& old, const AbstractValue& image, bool widen_point, int& updates,
                         const EngineOptions& opts, AnalysisResult& r, NodeId point) {
  AbstractValue v = old.join(image);
  if (widen_point && updates >= opts.widening_delay) {
    v = old.widen(v);
    ++r.stats.widenings;
    r.events.add({{"event", "widening"}, {"point", point}});
  }
  ++updates;
  return v;
}

}  // namespace detail

}  // namespace pagai
