// Techniques S and G: iteration over the individual edges of the CFG.

#include "engine_internal.hpp"

namespace pagai {

namespace {

using detail::Worklist;

void ascend(const Cfg& cfg, const PrSelection& sel, std::vector<AbstractValue>& X, const std::vector<bool>& enabled,
            const EngineOptions& opts, AnalysisResult& r) {
  Worklist wl(cfg.num_nodes);
  for (NodeId n = 0; n < cfg.num_nodes; ++n)
    if (!X[n].is_bottom()) wl.push(n);
  std::vector<int> updates(cfg.num_nodes, 0);
  while (!wl.empty()) {
    NodeId u = wl.pop();
    for (int e : cfg.out[u]) {
      if (!enabled[e]) continue;
      NodeId v = cfg.edges[e].dst;
      AbstractValue img = apply_edge(cfg.edges[e], X[u]);
      if (img.leq(X[v])) continue;
      X[v] = detail::accumulate(X[v], img, sel.is_pw[v], updates[v], opts, r, v);
      wl.push(v);
    }
  }
}

bool post_fixpoint(const Cfg& cfg, const std::vector<AbstractValue>& X, const std::vector<AbstractValue>& init,
                   const std::vector<bool>& enabled) {
  for (NodeId n = 0; n < cfg.num_nodes; ++n)
    if (!init[n].leq(X[n])) return false;
  for (const auto& e : cfg.edges)
    if (enabled[e.id] && !apply_edge(e, X[e.src]).leq(X[e.dst])) return false;
  return true;
}

/// Decreasing iterations; a round whose result is not a post-fixpoint is
/// discarded and stops the sequence.
void narrow(const Cfg& cfg, std::vector<AbstractValue>& X, const std::vector<AbstractValue>& init,
            const std::vector<bool>& enabled, const EngineOptions& opts, AnalysisResult& r) {
  for (int round = 0; round < opts.narrowing_rounds; ++round) {
    std::vector<AbstractValue> Y = X;
    bool changed = false;
    for (NodeId v = 0; v < cfg.num_nodes; ++v) {
      AbstractValue acc = init[v];
      for (int e : cfg.in[v])
        if (enabled[e]) acc = acc.join(apply_edge(cfg.edges[e], Y[cfg.edges[e].src]));
      AbstractValue nv = Y[v].meet(acc);
      if (!nv.equals(Y[v])) changed = true;
      Y[v] = std::move(nv);
    }
    if (!changed || !post_fixpoint(cfg, Y, init, enabled)) break;
    X = std::move(Y);
    ++r.stats.narrowing_rounds;
    r.events.add({{"event", "narrowing"}, {"round", round + 1}});
  }
}

AnalysisResult start(const std::shared_ptr<const SemanticsFormula>& sf, Technique t, const EngineOptions& opts) {
  AnalysisResult r;
  r.technique = t;
  r.domain = opts.domain;
  r.sf = sf;
  return r;
}

}  // namespace

AnalysisResult run_standard(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts) {
  detail::Stopwatch clock;
  AnalysisResult r = start(sf, Technique::S, opts);
  const Cfg& cfg = sf->cfg();
  auto init = detail::initial_values(cfg, opts.domain, detail::make_env(cfg));
  std::vector<AbstractValue> X = init;
  std::vector<bool> enabled(cfg.edges.size(), true);
  ascend(cfg, sf->sel, X, enabled, opts, r);
  narrow(cfg, X, init, enabled, opts, r);
  r.values = std::move(X);
  r.stats.seconds = clock.seconds();
  return r;
}

AnalysisResult run_guided(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts) {
  detail::Stopwatch clock;
  AnalysisResult r = start(sf, Technique::G, opts);
  const Cfg& cfg = sf->cfg();
  auto init = detail::initial_values(cfg, opts.domain, detail::make_env(cfg));
  std::vector<AbstractValue> X = init;
  std::vector<bool> enabled(cfg.edges.size(), false);
  for (int phase = 1;; ++phase) {
    nlohmann::ordered_json added = nlohmann::ordered_json::array();
    for (const auto& e : cfg.edges)
      if (!enabled[e.id] && !apply_edge(e, X[e.src]).is_bottom()) {
        enabled[e.id] = true;
        added.push_back(e.id);
      }
    if (added.empty()) break;
    ascend(cfg, sf->sel, X, enabled, opts, r);
    narrow(cfg, X, init, enabled, opts, r);
    r.phases.push_back(X);
    r.events.add({{"event", "phase"}, {"phase", phase}, {"edges_added", added}});
  }
  r.values = std::move(X);
  r.stats.seconds = clock.seconds();
  return r;
}

}  // namespace pagai
