#include <algorithm>
#include <deque>

#include "pagai/smt.hpp"

namespace pagai {

namespace {

// Atom `sum terms + constant op 0` with like symbols merged.
Atom make_atom(const std::vector<std::pair<std::string, Integer>>& terms, Integer constant, CmpOp op) {
  std::map<std::string, Integer> merged;
  for (const auto& [n, k] : terms) merged[n] = checked_add(merged[n], k);
  Atom a;
  for (const auto& [n, k] : merged)
    if (k != 0) a.terms.push_back({n, k});
  a.constant = constant;
  a.op = op;
  return a;
}

Atom rename_cons(const LinCons& c, const SsaCfg& ssa) {
  std::vector<std::pair<std::string, Integer>> terms;
  for (auto [v, k] : c.expr.terms) terms.push_back({ssa.version_name(v), k});
  return make_atom(terms, c.expr.constant, c.op);
}

}  // namespace

std::shared_ptr<const SemanticsFormula> encode_semantics(std::shared_ptr<const SsaCfg> ssa_ptr, const PrSelection& sel) {
  auto sf = std::make_shared<SemanticsFormula>();
  sf->ssa = ssa_ptr;
  sf->sel = sel;
  const SsaCfg& ssa = *ssa_ptr;
  const Cfg& cfg = ssa.cfg;
  int n = cfg.num_nodes;
  size_t nv = cfg.vars.size();

  sf->src_pred.resize(n);
  sf->dst_pred.resize(n);
  sf->src_vals.assign(n, {});
  sf->dst_vals.assign(n, {});
  for (int u = 0; u < n; ++u) {
    std::string id = std::to_string(u);
    sf->src_pred[u] = sel.is_pr[u] ? "bs_" + id : "b_" + id;
    sf->dst_pred[u] = sel.is_pr[u] ? "bd_" + id : "b_" + id;
    if (!sel.is_pr[u]) continue;
    for (size_t v = 0; v < nv; ++v) {
      sf->src_vals[u].push_back(ssa.version_name(ssa.in_ver[u][v]));
      if (!ssa.phis[u].empty())
        sf->dst_vals[u].push_back("v_" + cfg.vars[v] + "_d" + id);
      else if (cfg.in[u].size() == 1)
        sf->dst_vals[u].push_back(ssa.version_name(ssa.out_ver[cfg.in[u][0]][v]));
      else
        sf->dst_vals[u].push_back(sf->src_vals[u].back());
    }
  }

  size_t ne = cfg.edges.size();
  sf->edge_pred.resize(ne);
  sf->edge_atoms.assign(ne, {});
  sf->edge_phi.assign(ne, {});
  for (size_t e = 0; e < ne; ++e) {
    sf->edge_pred[e] = "a_" + std::to_string(e);
    const SsaEdge& se = ssa.edges[e];
    for (const auto& g : se.guard) sf->edge_atoms[e].push_back(rename_cons(g, ssa));
    for (const auto& a : se.actions) {
      std::string def = ssa.version_name(a.def);
      if (a.kind == Action::Kind::Input) {
        sf->edge_atoms[e].push_back(make_atom({{def, 1}}, -a.lo, CmpOp::Ge));
        sf->edge_atoms[e].push_back(make_atom({{def, 1}}, -a.hi, CmpOp::Le));
      } else {
        std::vector<std::pair<std::string, Integer>> terms{{def, 1}};
        for (auto [v, k] : a.rhs.terms) terms.push_back({ssa.version_name(v), -k});
        sf->edge_atoms[e].push_back(make_atom(terms, -a.rhs.constant, CmpOp::Eq));
      }
    }
    NodeId dst = cfg.edges[e].dst;
    for (const auto& phi : ssa.phis[dst]) {
      std::string target = sel.is_pr[dst] ? sf->dst_vals[dst][phi.var] : ssa.version_name(phi.result);
      std::string arg = ssa.version_name(ssa.out_ver[e][phi.var]);
      Atom a = make_atom({{target, 1}, {arg, -1}}, 0, CmpOp::Eq);
      if (!a.terms.empty()) sf->edge_phi[e].push_back(std::move(a));
    }
  }

  std::vector<Formula> parts;
  for (size_t e = 0; e < ne; ++e) {
    std::vector<Formula> body{f_bool(sf->src_pred[cfg.edges[e].src])};
    for (const auto& a : sf->edge_atoms[e]) body.push_back(f_atom(a));
    for (const auto& a : sf->edge_phi[e]) body.push_back(f_atom(a));
    parts.push_back(f_implies(f_bool(sf->edge_pred[e]), f_and(std::move(body))));
  }
  for (int u = 0; u < n; ++u) {
    std::vector<Formula> in;
    for (int e : cfg.in[u]) in.push_back(f_bool(sf->edge_pred[e]));
    parts.push_back(f_iff(f_bool(sf->dst_pred[u]), f_or(std::move(in))));
    const auto& out = cfg.out[u];
    for (size_t a = 0; a < out.size(); ++a)
      for (size_t b = a + 1; b < out.size(); ++b)
        parts.push_back(f_not(f_and({f_bool(sf->edge_pred[out[a]]), f_bool(sf->edge_pred[out[b]])})));
    if (!sel.is_pr[u] && !out.empty()) {
      std::vector<Formula> any;
      for (int e : out) any.push_back(f_bool(sf->edge_pred[e]));
      parts.push_back(f_implies(f_bool(sf->src_pred[u]), f_or(std::move(any))));
    }
  }
  sf->rho = f_and(std::move(parts));

  // Topological order of the interior points (Kahn, smallest id first).
  std::vector<int> indeg(n, 0);
  for (const auto& e : cfg.edges)
    if (!sel.is_pr[e.src] && !sel.is_pr[e.dst]) ++indeg[e.dst];
  std::vector<int> ready;
  for (int u = 0; u < n; ++u)
    if (!sel.is_pr[u] && indeg[u] == 0) ready.push_back(u);
  std::vector<int> topo;
  while (!ready.empty()) {
    auto it = std::min_element(ready.begin(), ready.end());
    int u = *it;
    ready.erase(it);
    topo.push_back(u);
    for (int e : cfg.out[u]) {
      int v = cfg.edges[e].dst;
      if (!sel.is_pr[v] && --indeg[v] == 0) ready.push_back(v);
    }
  }
  for (NodeId p : sel.pr) sf->pred_order.push_back(sf->src_pred[p]);
  for (int u : topo) sf->pred_order.push_back(sf->src_pred[u]);
  for (NodeId p : sel.pr) sf->pred_order.push_back(sf->dst_pred[p]);
  for (size_t i = 0; i < sf->pred_order.size(); ++i) sf->pred_index[sf->pred_order[i]] = static_cast<int>(i);

  for (NodeId p : sel.pr) {
    auto paths = enumerate_paths(ssa, sel, p);
    std::stable_sort(paths.begin(), paths.end(),
                     [](const Path& a, const Path& b) { return a.edges.size() < b.edges.size(); });
    sf->paths[p] = std::move(paths);
  }
  return sf;
}

std::vector<std::string> SemanticsFormula::path_predicates(const Path& p) const {
  std::vector<std::string> out{src_pred[p.src]};
  for (NodeId u : p.interior(cfg())) out.push_back(src_pred[u]);
  out.push_back(dst_pred[p.dst]);
  return out;
}

std::vector<bool> SemanticsFormula::path_minterm(const Path& p) const {
  std::vector<bool> vals(pred_order.size(), false);
  for (const auto& name : path_predicates(p)) vals[pred_index.at(name)] = true;
  return vals;
}

std::vector<Atom> SemanticsFormula::path_atoms(const Path& p) const {
  std::vector<Atom> out;
  for (int e : p.edges) {
    out.insert(out.end(), edge_atoms[e].begin(), edge_atoms[e].end());
    out.insert(out.end(), edge_phi[e].begin(), edge_phi[e].end());
  }
  return out;
}

std::map<std::string, bool> SemanticsFormula::path_booleans(const Path& p) const {
  std::map<std::string, bool> m;
  for (const auto& name : pred_order) m[name] = false;
  for (const auto& name : edge_pred) m[name] = false;
  for (const auto& name : path_predicates(p)) m[name] = true;
  for (int e : p.edges) m[edge_pred[e]] = true;
  return m;
}

size_t SemanticsFormula::syntactic_path_count() const {
  size_t n = 0;
  for (const auto& [p, ps] : paths) n += ps.size();
  return n;
}

Formula source_selector(const SemanticsFormula& sf, NodeId i) {
  std::vector<Formula> parts{f_bool(sf.src_pred[i])};
  for (NodeId j : sf.sel.pr)
    if (j != i) parts.push_back(f_not(f_bool(sf.src_pred[j])));
  return f_and(std::move(parts));
}

namespace {

std::vector<NodeId> successors(const SemanticsFormula& sf, NodeId i) {
  std::vector<NodeId> out;
  for (const auto& p : sf.paths.at(i))
    if (std::find(out.begin(), out.end(), p.dst) == out.end()) out.push_back(p.dst);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Formula build_focus_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X) {
  std::vector<Formula> targets;
  for (NodeId j : successors(*sf, i))
    targets.push_back(f_and({f_bool(sf->dst_pred[j]), f_not(to_formula(X[j], sf->dst_vals[j]))}));
  return f_and({f_rho(sf), source_selector(*sf, i), to_formula(X[i], sf->src_vals[i]), f_or(std::move(targets))});
}

Formula build_newpath_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X,
                              const PathSet& P) {
  return f_and({build_focus_formula(sf, i, X), P.to_formula(true)});
}

Formula build_restricted_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X,
                                 const PathSet& P) {
  return f_and({build_focus_formula(sf, i, X), P.to_formula(false)});
}

std::string disjunct_var(int k) { return "d_" + std::to_string(k + 1); }

Formula disjunction_formula(const std::vector<AbstractValue>& ds, const std::vector<std::string>& names) {
  std::vector<Formula> parts;
  for (const auto& d : ds) parts.push_back(to_formula(d, names));
  return f_or(std::move(parts));
}

Formula build_disjunctive_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i,
                                  const DisjunctiveValues& Xd, const PathSet* restrict_to, const PathSet* exclude) {
  const auto& src = Xd[i];
  int m = static_cast<int>(src.size());
  std::vector<Formula> choices;
  for (int k = 0; k < m; ++k) {
    std::vector<Formula> c{f_bool(disjunct_var(k)), to_formula(src[k], sf->src_vals[i])};
    for (int l = 0; l < m; ++l)
      if (l != k) c.push_back(f_not(f_bool(disjunct_var(l))));
    choices.push_back(f_and(std::move(c)));
  }
  std::vector<Formula> targets;
  for (NodeId j : successors(*sf, i)) {
    std::vector<Formula> t{f_bool(sf->dst_pred[j])};
    for (const auto& d : Xd[j]) t.push_back(f_not(to_formula(d, sf->dst_vals[j])));
    targets.push_back(f_and(std::move(t)));
  }
  std::vector<Formula> parts{f_rho(sf), source_selector(*sf, i), f_or(std::move(choices)), f_or(std::move(targets))};
  if (restrict_to) parts.push_back(restrict_to->to_formula(false));
  if (exclude) parts.push_back(exclude->to_formula(true));
  return f_and(std::move(parts));
}

ExtractedPath extract_path(const SemanticsFormula& sf, const Model& m) {
  const Cfg& cfg = sf.cfg();
  ExtractedPath out;
  NodeId src = -1;
  for (NodeId p : sf.sel.pr)
    if (m.boolean(sf.src_pred[p])) {
      if (src >= 0) throw SolverError("model activates two path sources");
      src = p;
    }
  if (src < 0) throw SolverError("model activates no path source");
  Path path;
  path.src = src;
  NodeId u = src;
  for (size_t steps = 0; steps <= cfg.edges.size(); ++steps) {
    int chosen = -1;
    for (int e : cfg.out[u])
      if (m.boolean(sf.edge_pred[e])) {
        if (chosen >= 0) throw SolverError("model activates two outgoing edges");
        chosen = e;
      }
    if (chosen < 0)
      for (int e : cfg.out[u])
        if (m.boolean(sf.dst_pred[cfg.edges[e].dst])) {
          chosen = e;
          break;
        }
    if (chosen < 0) throw SolverError("model does not describe a path");
    path.edges.push_back(chosen);
    u = cfg.edges[chosen].dst;
    if (sf.sel.is_pr[u]) {
      path.dst = u;
      out.path = std::move(path);
      for (const auto& [name, val] : m.bools)
        if (val && name.rfind("d_", 0) == 0) out.disjunct = std::stoi(name.substr(2)) - 1;
      return out;
    }
  }
  throw SolverError("model path does not terminate");
}

}  // namespace pagai
