// Technique DIS: the G+PF skeleton over disjunctive values, with the routing
// functions sigma built on demand.

#include <set>
#include <tuple>

#include "engine_internal.hpp"

namespace pagai {

int sigma_extend(DisjunctiveValue& source, DisjunctiveValue& target, int j, const std::vector<bool>& minterm,
                 const AbstractValue& image, Solver& solver) {
  auto key = std::make_pair(j, minterm);
  if (auto it = source.sigma.find(key); it != source.sigma.end()) return it->second;
  int t = 0;
  for (int k = 1; k <= target.size() && t == 0; ++k)
    if (exact_join_check(target.disjuncts[k - 1], image, solver)) t = k;
  if (t == 0) {
    if (target.size() < target.max) {
      target.disjuncts.push_back(AbstractValue::bottom(image.domain(), image.env()));
      t = target.size();
    } else {
      t = target.max;
    }
  }
  source.sigma[key] = t;
  return t;
}

namespace {

using detail::Worklist;

struct Route {
  Path path;
  int from;  // source disjunct, 1-based
  int to;    // target disjunct, 1-based
  auto operator<=>(const Route&) const = default;
};

class Disjunctive {
public:
  Disjunctive(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts, Solver& solver,
              AnalysisResult& r)
      : sf_(sf), cfg_(sf->cfg()), opts_(opts), solver_(solver), r_(r),
        init_(detail::initial_values(cfg_, opts.domain, detail::make_env(cfg_))),
        D_(cfg_.num_nodes), updates_(cfg_.num_nodes),
        P_(std::make_shared<Bdd>(sf->pred_order.size()), sf->pred_order), A_(cfg_.num_nodes), A2_(cfg_.num_nodes) {
    for (NodeId p : sf->sel.pr) {
      D_[p].disjuncts = {init_[p]};
      D_[p].delta = 1;
      D_[p].max = opts.max_disjuncts;
      updates_[p] = {0};
      if (!init_[p].is_bottom()) A2_.push(p);
    }
  }

  void run() {
    for (int iteration = 1;; ++iteration) {
      size_t before = plist_.size();
      for (NodeId p : sf_->sel.pr)
        if (dirty_[p]) A2_.push(p);
      r_.events.add({{"event", "phase"}, {"name", "new_paths"}, {"iteration", iteration}});
      while (!A2_.empty()) compute_new_paths(A2_.pop());
      if (plist_.size() == before) break;
      r_.events.add({{"event", "phase"}, {"name", "focus"}, {"iteration", iteration}});
      while (!A_.empty()) path_focus_point(A_.pop());
      if (opts_.dis_narrowing) {
        r_.events.add({{"event", "phase"}, {"name", "narrow"}, {"iteration", iteration}});
        for (NodeId j : narrow())
          for (NodeId i : sf_->sel.pr)
            for (const auto& q : sf_->paths.at(i))
              if (q.dst == j) dirty_[i] = true;
      }
      r_.events.add({{"event", "outer_iteration"}, {"iteration", iteration}, {"paths", plist_.size()}});
    }
    r_.values.assign(cfg_.num_nodes, AbstractValue::bottom(opts_.domain, init_[0].env()));
    for (NodeId p : sf_->sel.pr)
      for (const auto& d : D_[p].disjuncts) r_.values[p] = r_.values[p].join(d);
    r_.disjunctive = std::move(D_);
    r_.paths = plist_;
  }

private:
  DisjunctiveValues values() const {
    DisjunctiveValues out(cfg_.num_nodes);
    for (NodeId p : sf_->sel.pr) out[p] = D_[p].disjuncts;
    return out;
  }

  struct Step {
    Path path;
    std::vector<bool> minterm;
    int from, to;
    AbstractValue image;
  };

  Step route(NodeId i, const Model& m) {
    ExtractedPath ep = extract_path(*sf_, m);
    if (ep.disjunct < 0) throw SolverError("model selects no source disjunct");
    Step s{ep.path, sf_->path_minterm(ep.path), ep.disjunct + 1, 0,
           transform(cfg_, ep.path, D_[i].disjuncts.at(ep.disjunct))};
    NodeId j = s.path.dst;
    int before = D_[j].size();
    s.to = sigma_extend(D_[i], D_[j], s.from, s.minterm, s.image, solver_);
    if (D_[j].size() > before) {
      updates_[j].push_back(0);
      r_.events.add({{"event", "disjunct_added"}, {"point", j}, {"count", D_[j].size()}});
    }
    routes_.insert({s.path, s.from, s.to});
    return s;
  }

  void compute_new_paths(NodeId i) {
    dirty_[i] = false;
    for (;;) {
      SolveResult res =
          detail::query(solver_, build_disjunctive_formula(sf_, i, values(), nullptr, &P_), r_, "new_path", i);
      if (!res.sat) return;
      Step s = route(i, res.model);
      if (P_.contains_minterm(s.minterm)) throw error("solver returned a path already in P");
      P_ = P_.add_minterm(s.minterm);
      plist_.push_back(s.path);
      ++r_.stats.paths_added;
      auto e = detail::path_json(cfg_, s.path);
      e["event"] = "path_added";
      e["total"] = plist_.size();
      r_.events.add(e);
      NodeId j = s.path.dst;
      auto& x = D_[j].disjuncts[s.to - 1];
      AbstractValue nv = x.join(s.image);
      if (!nv.leq(x)) dirty_[j] = true;
      x = std::move(nv);
      A_.push(i);
      A_.push(j);
      A2_.push(i);
    }
  }

  void path_focus_point(NodeId i) {
    for (;;) {
      SolveResult res =
          detail::query(solver_, build_disjunctive_formula(sf_, i, values(), &P_, nullptr), r_, "focus", i);
      if (!res.sat) return;
      Step s = route(i, res.model);
      NodeId j = s.path.dst;
      const AbstractValue old = D_[j].disjuncts[s.to - 1];
      AbstractValue nv = j == i && s.to == s.from
                             ? detail::self_loop_sequence(cfg_, s.path, old, opts_, r_.stats)
                             : detail::accumulate(old, s.image, sf_->sel.is_pw[j], updates_[j][s.to - 1], opts_, r_, j);
      if (nv.leq(old)) throw error("analysis made no progress at p" + std::to_string(j));
      D_[j].disjuncts[s.to - 1] = std::move(nv);
      dirty_[j] = true;
      if (j != i) A_.push(j);
      A2_.push(j);
    }
  }

  /// Every disjunct image along every path of P lies in some target disjunct.
  bool post_fixpoint(const std::vector<std::vector<AbstractValue>>& Y) const {
    if (!init_[cfg_.entry].leq(Y[cfg_.entry][D_[cfg_.entry].delta - 1])) return false;
    for (const auto& p : plist_)
      for (const auto& x : Y[p.src]) {
        AbstractValue img = transform(cfg_, p, x);
        bool inside = false;
        for (const auto& y : Y[p.dst]) inside = inside || img.leq(y);
        if (!inside) return false;
      }
    return true;
  }

  /// Decreasing iterations per disjunct over the recorded routes.
  std::vector<NodeId> narrow() {
    std::vector<std::vector<AbstractValue>> X(cfg_.num_nodes);
    for (NodeId p : sf_->sel.pr) X[p] = D_[p].disjuncts;
    const auto before = X;
    for (int round = 0; round < opts_.narrowing_rounds; ++round) {
      auto Y = X;
      bool changed = false;
      for (NodeId q : sf_->sel.pr)
        for (int t = 1; t <= static_cast<int>(Y[q].size()); ++t) {
          AbstractValue acc = t == D_[q].delta ? init_[q] : AbstractValue::bottom(opts_.domain, init_[q].env());
          for (const auto& rt : routes_)
            if (rt.path.dst == q && rt.to == t) acc = acc.join(transform(cfg_, rt.path, Y[rt.path.src][rt.from - 1]));
          AbstractValue nv = Y[q][t - 1].meet(acc);
          if (!nv.equals(Y[q][t - 1])) changed = true;
          Y[q][t - 1] = std::move(nv);
        }
      if (!changed || !post_fixpoint(Y)) break;
      X = std::move(Y);
      ++r_.stats.narrowing_rounds;
      r_.events.add({{"event", "narrowing"}, {"round", round + 1}});
    }
    std::vector<NodeId> shrunk;
    for (NodeId p : sf_->sel.pr) {
      bool s = false;
      for (size_t k = 0; k < X[p].size(); ++k) s = s || !before[p][k].leq(X[p][k]);
      D_[p].disjuncts = X[p];
      if (s) shrunk.push_back(p);
    }
    return shrunk;
  }

  std::shared_ptr<const SemanticsFormula> sf_;
  const Cfg& cfg_;
  const EngineOptions& opts_;
  Solver& solver_;
  AnalysisResult& r_;
  std::vector<AbstractValue> init_;
  std::vector<DisjunctiveValue> D_;
  std::vector<std::vector<int>> updates_;
  PathSet P_;
  std::vector<Path> plist_;
  std::set<Route> routes_;
  Worklist A_, A2_;
  std::vector<bool> dirty_ = std::vector<bool>(cfg_.num_nodes, false);
};

}  // namespace

AnalysisResult run_disjunctive(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                               Solver& solver) {
  if (opts.max_disjuncts < 1) throw error("the number of disjuncts must be at least 1");
  detail::Stopwatch clock;
  AnalysisResult r;
  r.technique = Technique::DIS;
  r.domain = opts.domain;
  r.sf = sf;
  Disjunctive(sf, opts, solver, r).run();
  r.stats.seconds = clock.seconds();
  return r;
}

}  // namespace pagai
