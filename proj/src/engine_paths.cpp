// Techniques PF and G+PF: iteration over the paths of the expanded
// multigraph, found on demand by the solver.

#include <functional>
#include <set>

#include "engine_internal.hpp"

namespace pagai {

namespace {

using detail::Worklist;

AnalysisResult start(const std::shared_ptr<const SemanticsFormula>& sf, Technique t, const EngineOptions& opts) {
  AnalysisResult r;
  r.technique = t;
  r.domain = opts.domain;
  r.sf = sf;
  return r;
}

/// Decreasing iterations over a list of paths. A round is kept only when the
/// result is still a post-fixpoint of those paths and `accept` agrees.
/// Returns the points whose value shrank.
std::vector<NodeId> narrow_paths(const SemanticsFormula& sf, std::vector<AbstractValue>& X,
                                 const std::vector<AbstractValue>& init, const std::vector<Path>& paths,
                                 const EngineOptions& opts, AnalysisResult& r,
                                 const std::function<bool(const std::vector<AbstractValue>&)>& accept) {
  const Cfg& cfg = sf.cfg();
  const std::vector<AbstractValue> before = X;
  for (int round = 0; round < opts.narrowing_rounds; ++round) {
    std::vector<AbstractValue> Y = X;
    bool changed = false;
    for (NodeId j : sf.sel.pr) {
      AbstractValue acc = init[j];
      for (const auto& p : paths)
        if (p.dst == j) acc = acc.join(transform(cfg, p, Y[p.src]));
      AbstractValue nv = Y[j].meet(acc);
      if (!nv.equals(Y[j])) changed = true;
      Y[j] = std::move(nv);
    }
    if (!changed) break;
    bool ok = true;
    for (NodeId j : sf.sel.pr) ok = ok && init[j].leq(Y[j]);
    for (const auto& p : paths) ok = ok && transform(cfg, p, Y[p.src]).leq(Y[p.dst]);
    if (!ok || (accept && !accept(Y))) break;
    X = std::move(Y);
    ++r.stats.narrowing_rounds;
    r.events.add({{"event", "narrowing"}, {"round", round + 1}});
  }
  std::vector<NodeId> shrunk;
  for (NodeId j : sf.sel.pr)
    if (!before[j].leq(X[j])) shrunk.push_back(j);
  return shrunk;
}

/// New value at p.dst after taking path p from its source.
AbstractValue update(const SemanticsFormula& sf, const Path& p, const std::vector<AbstractValue>& X,
                     std::vector<int>& updates, const EngineOptions& opts, AnalysisResult& r) {
  const Cfg& cfg = sf.cfg();
  NodeId j = p.dst;
  AbstractValue nv = p.src == j ? detail::self_loop_sequence(cfg, p, X[j], opts, r.stats)
                                : detail::accumulate(X[j], transform(cfg, p, X[p.src]), sf.sel.is_pw[j], updates[j],
                                                     opts, r, j);
  if (nv.leq(X[j])) throw error("analysis made no progress at p" + std::to_string(j));
  return nv;
}

}  // namespace

AnalysisResult run_pathfocusing(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                                Solver& solver) {
  detail::Stopwatch clock;
  AnalysisResult r = start(sf, Technique::PF, opts);
  const Cfg& cfg = sf->cfg();
  auto init = detail::initial_values(cfg, opts.domain, detail::make_env(cfg));
  std::vector<AbstractValue> X = init;
  std::vector<int> updates(cfg.num_nodes, 0);
  std::set<Path> seen;
  std::vector<Path> found;

  Worklist A(cfg.num_nodes);
  for (NodeId p : sf->sel.pr)
    if (!X[p].is_bottom()) A.push(p);
  while (!A.empty()) {
    NodeId i = A.pop();
    for (;;) {
      SolveResult res = detail::query(solver, build_focus_formula(sf, i, X), r, "focus", i);
      if (!res.sat) break;
      Path p = extract_path(*sf, res.model).path;
      if (seen.insert(p).second) {
        found.push_back(p);
        ++r.stats.paths_added;
        auto e = detail::path_json(cfg, p);
        e["event"] = "path_added";
        e["total"] = found.size();
        r.events.add(e);
      }
      X[p.dst] = update(*sf, p, X, updates, opts, r);
      if (p.dst != i) A.push(p.dst);
    }
  }

  auto inductive = [&](const std::vector<AbstractValue>& Y) {
    for (NodeId i : sf->sel.pr)
      if (detail::query(solver, build_focus_formula(sf, i, Y), r, "narrowing_check", i).sat) return false;
    return true;
  };
  narrow_paths(*sf, X, init, found, opts, r, inductive);
  r.values = std::move(X);
  r.paths = std::move(found);
  r.stats.seconds = clock.seconds();
  return r;
}

AnalysisResult run_combined(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                            Solver& solver) {
  detail::Stopwatch clock;
  AnalysisResult r = start(sf, Technique::GPF, opts);
  const Cfg& cfg = sf->cfg();
  auto init = detail::initial_values(cfg, opts.domain, detail::make_env(cfg));
  std::vector<AbstractValue> X = init;
  std::vector<int> updates(cfg.num_nodes, 0);
  PathSet P(std::make_shared<Bdd>(sf->pred_order.size()), sf->pred_order);
  std::vector<Path> plist;

  Worklist A(cfg.num_nodes), A2(cfg.num_nodes);  // A2 is A'
  for (NodeId p : sf->sel.pr)
    if (!X[p].is_bottom()) A2.push(p);

  // Points whose value changed since their last search for new paths.
  std::vector<bool> dirty(cfg.num_nodes, false);

  auto compute_new_paths = [&](NodeId i) {
    dirty[i] = false;
    for (;;) {
      SolveResult res = detail::query(solver, build_newpath_formula(sf, i, X, P), r, "new_path", i);
      if (!res.sat) return;
      Path p = extract_path(*sf, res.model).path;
      auto minterm = sf->path_minterm(p);
      if (P.contains_minterm(minterm)) throw error("solver returned a path already in P");
      P = P.add_minterm(minterm);
      plist.push_back(p);
      ++r.stats.paths_added;
      auto e = detail::path_json(cfg, p);
      e["event"] = "path_added";
      e["total"] = plist.size();
      r.events.add(e);
      AbstractValue nv = X[p.dst].join(transform(cfg, p, X[i]));
      if (!nv.leq(X[p.dst])) dirty[p.dst] = true;
      X[p.dst] = std::move(nv);
      A.push(i);
      A.push(p.dst);
      A2.push(i);
    }
  };

  auto path_focus_point = [&](NodeId i) {
    for (;;) {
      SolveResult res = detail::query(solver, build_restricted_formula(sf, i, X, P), r, "focus", i);
      if (!res.sat) return;
      Path p = extract_path(*sf, res.model).path;
      X[p.dst] = update(*sf, p, X, updates, opts, r);
      dirty[p.dst] = true;
      if (p.dst != i) A.push(p.dst);
      A2.push(p.dst);
    }
  };

  for (int iteration = 1;; ++iteration) {
    size_t before = plist.size();
    for (NodeId p : sf->sel.pr)
      if (dirty[p]) A2.push(p);
    r.events.add({{"event", "phase"}, {"name", "new_paths"}, {"iteration", iteration}});
    while (!A2.empty()) compute_new_paths(A2.pop());
    if (plist.size() == before) break;
    r.events.add({{"event", "phase"}, {"name", "focus"}, {"iteration", iteration}});
    while (!A.empty()) path_focus_point(A.pop());
    r.events.add({{"event", "phase"}, {"name", "narrow"}, {"iteration", iteration}});
    for (NodeId j : narrow_paths(*sf, X, init, plist, opts, r, nullptr))
      for (NodeId i : sf->sel.pr)
        for (const auto& q : sf->paths.at(i))
          if (q.dst == j) dirty[i] = true;
    r.events.add({{"event", "outer_iteration"}, {"iteration", iteration}, {"paths", plist.size()}});
  }
  r.values = std::move(X);
  r.paths = std::move(plist);
  r.stats.seconds = clock.seconds();
  return r;
}

}  // namespace pagai
