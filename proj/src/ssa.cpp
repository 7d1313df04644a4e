#include <algorithm>

#include "pagai/ir.hpp"

namespace pagai {

std::string SsaCfg::version_name(int version) const {
  const SsaVersion& v = versions.at(version);
  return "v_" + cfg.vars[v.var] + "_" + std::to_string(v.index);
}

namespace {

std::vector<NodeId> reverse_postorder(const Cfg& cfg) {
  std::vector<NodeId> post;
  std::vector<bool> seen(cfg.num_nodes, false);
  std::vector<std::pair<NodeId, size_t>> stack{{cfg.entry, 0}};
  seen[cfg.entry] = true;
  while (!stack.empty()) {
    auto& [u, k] = stack.back();
    if (k == cfg.out[u].size()) {
      post.push_back(u);
      stack.pop_back();
      continue;
    }
    NodeId v = cfg.edges[cfg.out[u][k++]].dst;
    if (!seen[v]) {
      seen[v] = true;
      stack.push_back({v, 0});
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

LinExpr rename(const LinExpr& e, const std::vector<int>& cur) {
  LinExpr r;
  r.constant = e.constant;
  for (auto [v, c] : e.terms) r.add_term(cur[v], c);
  return r;
}

}  // namespace

SsaCfg to_ssa(const Cfg& cfg) {
  SsaCfg s;
  s.cfg = cfg;
  int nv = static_cast<int>(cfg.vars.size());
  std::vector<int> counter(nv, 0);
  auto new_version = [&](int var) {
    s.versions.push_back({var, counter[var]++});
    return static_cast<int>(s.versions.size()) - 1;
  };

  s.in_ver.assign(cfg.num_nodes, {});
  s.out_ver.assign(cfg.edges.size(), {});
  s.edges.assign(cfg.edges.size(), {});
  s.phis.assign(cfg.num_nodes, {});
  std::vector<bool> renamed(cfg.edges.size(), false);

  for (NodeId u : reverse_postorder(cfg)) {
    std::vector<int>& in = s.in_ver[u];
    if (u == cfg.entry) {
      for (int v = 0; v < nv; ++v) in.push_back(new_version(v));
    } else if (cfg.in[u].size() >= 2) {
      for (int v = 0; v < nv; ++v) {
        Phi phi;
        phi.var = v;
        phi.result = new_version(v);
        in.push_back(phi.result);
        s.phis[u].push_back(std::move(phi));
      }
    } else {
      int e = cfg.in[u].at(0);
      const auto& pred = s.out_ver[e];
      if (!renamed[e]) throw error("to_ssa: single predecessor visited after its successor");
      in = pred;
    }
    for (int e : cfg.out[u]) {
      std::vector<int> cur = in;
      SsaEdge& se = s.edges[e];
      for (const auto& g : cfg.edges[e].guard) se.guard.push_back({rename(g.expr, cur), g.op});
      for (const auto& a : cfg.edges[e].actions) {
        SsaAction sa;
        sa.kind = a.kind;
        sa.lo = a.lo;
        sa.hi = a.hi;
        if (a.kind == Action::Kind::Assign) sa.rhs = rename(a.rhs, cur);
        sa.def = new_version(a.var);
        cur[a.var] = sa.def;
        se.actions.push_back(std::move(sa));
      }
      s.out_ver[e] = std::move(cur);
      renamed[e] = true;
    }
  }

  for (NodeId u = 0; u < cfg.num_nodes; ++u)
    for (auto& phi : s.phis[u])
      for (int e : cfg.in[u]) phi.args.push_back(s.out_ver[e][phi.var]);
  return s;
}

ConcreteRun run_ssa(const SsaCfg& ssa, const std::vector<Integer>& initial, const InputChooser& choose,
                    int max_steps) {
  const Cfg& cfg = ssa.cfg;
  std::vector<Integer> vals(ssa.versions.size(), 0);
  for (size_t v = 0; v < initial.size(); ++v) vals[ssa.in_ver[cfg.entry][v]] = initial[v];
  ConcreteRun r;
  r.node = cfg.entry;
  while (r.steps < max_steps) {
    int taken = -1;
    for (int e : cfg.out[r.node]) {
      const auto& g = ssa.edges[e].guard;
      if (std::all_of(g.begin(), g.end(), [&](const LinCons& c) { return holds(c, vals); })) {
        taken = e;
        break;
      }
    }
    if (taken < 0) {
      r.blocked = true;
      break;
    }
    for (const auto& a : ssa.edges[taken].actions)
      vals[a.def] = a.kind == Action::Kind::Input ? choose(a.lo, a.hi) : evaluate(a.rhs, vals);
    NodeId dst = cfg.edges[taken].dst;
    const auto& in = cfg.in[dst];
    size_t pos = std::find(in.begin(), in.end(), taken) - in.begin();
    std::vector<std::pair<int, Integer>> updates;
    for (const auto& phi : ssa.phis[dst]) updates.push_back({phi.result, vals[phi.args[pos]]});
    for (auto [v, x] : updates) vals[v] = x;
    r.node = dst;
    ++r.steps;
  }
  r.store.resize(cfg.vars.size());
  for (size_t v = 0; v < cfg.vars.size(); ++v) r.store[v] = vals[ssa.in_ver[r.node][v]];
  return r;
}

}  // namespace pagai
