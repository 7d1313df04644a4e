#include <algorithm>
#include <deque>
#include <sstream>

#include <json.hpp>

#include "pagai/ir.hpp"

namespace pagai {

namespace {

struct RawEdge {
  int src, dst;
  std::vector<LinCons> guard;
  std::vector<Action> actions;
};

// Every statement adds outgoing edges only at its own start node, and those
// edges go to distinct targets, so the graph never has parallel edges.
class Lowering {
public:
  int fresh() { return num_nodes_++; }

  void block(const std::vector<Stmt>& stmts, int from, int to, int break_to) {
    if (stmts.empty()) {
      edges_.push_back({from, to, {}, {}});
      return;
    }
    int cur = from;
    for (size_t k = 0; k < stmts.size(); ++k) {
      int next = k + 1 == stmts.size() ? to : fresh();
      stmt(stmts[k], cur, next, break_to);
      cur = next;
    }
  }

  std::vector<RawEdge> edges_;
  int num_nodes_ = 0;

private:
  void stmt(const Stmt& s, int from, int to, int break_to) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        Action a;
        a.kind = Action::Kind::Assign;
        a.var = s.var;
        a.rhs = s.rhs;
        edges_.push_back({from, to, {}, {a}});
        return;
      }
      case Stmt::Kind::Input: {
        Action a;
        a.kind = Action::Kind::Input;
        a.var = s.var;
        a.lo = s.lo;
        a.hi = s.hi;
        edges_.push_back({from, to, {}, {a}});
        return;
      }
      case Stmt::Kind::Break:
        edges_.push_back({from, break_to, {}, {}});
        return;
      case Stmt::Kind::If: {
        if (s.cond.always_true) {
          block(s.body, from, to, break_to);
          return;
        }
        int t = fresh();
        int e = fresh();
        edges_.push_back({from, t, {s.cond.cons}, {}});
        edges_.push_back({from, e, {s.cond.cons.negated()}, {}});
        block(s.body, t, to, break_to);
        block(s.orelse, e, to, break_to);
        return;
      }
      case Stmt::Kind::While: {
        int h = fresh();
        edges_.push_back({from, h, {}, {}});
        if (s.cond.always_true) {
          block_loop(s.body, h, to);
          return;
        }
        int b = fresh();
        edges_.push_back({h, b, {s.cond.cons}, {}});
        edges_.push_back({h, to, {s.cond.cons.negated()}, {}});
        block(s.body, b, h, to);
        return;
      }
    }
  }

  // Body of `while (true)`: starts and ends at the header.
  void block_loop(const std::vector<Stmt>& body, int h, int to) { block(body, h, h, to); }
};

}  // namespace

Cfg build_cfg(const Function& f) {
  Lowering low;
  int entry = low.fresh();
  int exit = low.fresh();
  low.block(f.body, entry, exit, exit);

  int n = low.num_nodes_;
  std::vector<std::vector<int>> succ(n);
  for (size_t i = 0; i < low.edges_.size(); ++i) succ[low.edges_[i].src].push_back(static_cast<int>(i));
  std::vector<bool> reach(n, false);
  std::deque<int> queue{entry};
  reach[entry] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int e : succ[u]) {
      int v = low.edges_[e].dst;
      if (!reach[v]) {
        reach[v] = true;
        queue.push_back(v);
      }
    }
  }

  // Creation order, with the exit moved last.
  std::vector<int> remap(n, -1);
  int next_id = 0;
  for (int u = 0; u < n; ++u)
    if (reach[u] && u != exit) remap[u] = next_id++;
  if (reach[exit]) remap[exit] = next_id++;

  Cfg cfg;
  cfg.name = f.name;
  cfg.vars = f.vars;
  for (size_t v = 0; v < f.vars.size(); ++v)
    if (f.initializers[v]) cfg.initial.push_back(LinCons::make(LinExpr::var(static_cast<int>(v)), CmpOp::Eq, *f.initializers[v]));
  cfg.num_nodes = next_id;
  cfg.entry = remap[entry];
  if (reach[exit]) cfg.exit = remap[exit];
  cfg.out.assign(next_id, {});
  cfg.in.assign(next_id, {});
  for (const auto& re : low.edges_) {
    if (!reach[re.src]) continue;
    Edge e;
    e.id = static_cast<int>(cfg.edges.size());
    e.src = remap[re.src];
    e.dst = remap[re.dst];
    e.guard = re.guard;
    e.actions = re.actions;
    cfg.out[e.src].push_back(e.id);
    cfg.in[e.dst].push_back(e.id);
    cfg.edges.push_back(std::move(e));
  }
  return cfg;
}

namespace {

std::string render_action(const Action& a, const std::vector<std::string>& names) {
  if (a.kind == Action::Kind::Input)
    return names[a.var] + " := input(" + std::to_string(a.lo) + ", " + std::to_string(a.hi) + ")";
  return names[a.var] + " := " + render(a.rhs, names);
}

}  // namespace

std::string dump_cfg_json(const Cfg& cfg) {
  nlohmann::ordered_json j;
  j["function"] = cfg.name;
  j["vars"] = cfg.vars;
  nlohmann::ordered_json init = nlohmann::ordered_json::array();
  for (const auto& c : cfg.initial) init.push_back(render(c, cfg.vars));
  j["initial"] = init;
  j["entry"] = cfg.entry;
  j["exit"] = cfg.exit ? nlohmann::ordered_json(*cfg.exit) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (int u = 0; u < cfg.num_nodes; ++u) nodes.push_back({{"id", u}, {"out", cfg.out[u]}, {"in", cfg.in[u]}});
  j["nodes"] = nodes;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : cfg.edges) {
    nlohmann::ordered_json g = nlohmann::ordered_json::array();
    for (const auto& c : e.guard) g.push_back(render(c, cfg.vars));
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& act : e.actions) a.push_back(render_action(act, cfg.vars));
    edges.push_back({{"id", e.id}, {"src", e.src}, {"dst", e.dst}, {"guard", g}, {"actions", a}});
  }
  j["edges"] = edges;
  return j.dump(2);
}

PrSelection select_pr(const Cfg& cfg) {
  PrSelection sel;
  int n = cfg.num_nodes;
  sel.is_pr.assign(n, false);
  sel.is_pw.assign(n, false);
  // 0 white, 1 on stack, 2 done
  std::vector<int> color(n, 0);
  std::vector<std::pair<int, size_t>> stack{{cfg.entry, 0}};
  color[cfg.entry] = 1;
  while (!stack.empty()) {
    auto& [u, k] = stack.back();
    if (k == cfg.out[u].size()) {
      color[u] = 2;
      stack.pop_back();
      continue;
    }
    int v = cfg.edges[cfg.out[u][k++]].dst;
    if (color[v] == 1) {
      sel.is_pw[v] = true;
    } else if (color[v] == 0) {
      color[v] = 1;
      stack.push_back({v, 0});
    }
  }
  sel.is_pr = sel.is_pw;
  sel.is_pr[cfg.entry] = true;
  if (cfg.exit) sel.is_pr[*cfg.exit] = true;
  for (int u = 0; u < n; ++u) {
    if (sel.is_pr[u]) sel.pr.push_back(u);
    if (sel.is_pw[u]) sel.pw.push_back(u);
  }
  return sel;
}

std::vector<NodeId> Path::interior(const Cfg& cfg) const {
  std::vector<NodeId> out;
  for (size_t k = 0; k + 1 < edges.size(); ++k) out.push_back(cfg.edges[edges[k]].dst);
  return out;
}

std::vector<Path> enumerate_paths(const SsaCfg& ssa, const PrSelection& sel, NodeId from) {
  const Cfg& cfg = ssa.cfg;
  if (from < 0 || from >= cfg.num_nodes || !sel.is_pr[from]) throw error("enumerate_paths: source is not in P_R");
  std::vector<Path> out;
  std::vector<int> prefix;
  auto dfs = [&](auto&& self, NodeId u) -> void {
    for (int e : cfg.out[u]) {
      prefix.push_back(e);
      NodeId v = cfg.edges[e].dst;
      if (sel.is_pr[v])
        out.push_back({from, v, prefix});
      else
        self(self, v);
      prefix.pop_back();
    }
  };
  dfs(dfs, from);
  return out;
}

std::string render_path(const Cfg& cfg, const Path& p) {
  std::ostringstream os;
  os << "p" << p.src;
  for (int e : p.edges) os << " -> p" << cfg.edges[e].dst;
  return os.str();
}

ConcreteRun run_cfg(const Cfg& cfg, std::vector<Integer> store, const InputChooser& choose, int max_steps) {
  ConcreteRun r;
  r.node = cfg.entry;
  while (r.steps < max_steps) {
    const Edge* taken = nullptr;
    for (int e : cfg.out[r.node]) {
      const Edge& edge = cfg.edges[e];
      if (std::all_of(edge.guard.begin(), edge.guard.end(), [&](const LinCons& c) { return holds(c, store); })) {
        taken = &edge;
        break;
      }
    }
    if (!taken) {
      r.blocked = true;
      break;
    }
    for (const auto& a : taken->actions)
      store[a.var] = a.kind == Action::Kind::Input ? choose(a.lo, a.hi) : evaluate(a.rhs, store);
    r.node = taken->dst;
    ++r.steps;
  }
  r.store = std::move(store);
  return r;
}

}  // namespace pagai
