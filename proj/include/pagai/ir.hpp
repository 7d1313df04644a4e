#pragma once

// Front end and program representations: the mini-language parser, the
// control-flow graph of guarded linear transitions, its SSA form, and the
// choice of distinguished control points (P_R) and widening points (P_W).

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagai/linear.hpp"

namespace pagai {

class ParseError : public error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

// ---------------------------------------------------------------------------
// AST

/// Either the literal `true` or a linear comparison.
struct Condition {
  bool always_true = false;
  LinCons cons;
};

struct Stmt {
  enum class Kind { Assign, Input, If, While, Break };
  Kind kind = Kind::Assign;
  int line = 0;
  int var = -1;             // Assign, Input
  LinExpr rhs;              // Assign
  Integer lo = 0, hi = 0;   // Input
  Condition cond;           // If, While
  std::vector<Stmt> body;   // then-branch or loop body
  std::vector<Stmt> orelse; // else-branch
};

struct Function {
  std::string name;
  std::vector<std::string> vars;
  std::vector<std::optional<LinExpr>> initializers;  // aligned with vars
  std::vector<Stmt> body;
};

struct Program {
  std::vector<Function> functions;
  const Function& function(std::string_view name = {}) const;
};

Program parse_program(std::string_view source);

// ---------------------------------------------------------------------------
// CFG

using NodeId = int;

struct Action {
  enum class Kind { Assign, Input };
  Kind kind = Kind::Assign;
  int var = -1;
  LinExpr rhs;
  Integer lo = 0, hi = 0;
};

struct Edge {
  int id = -1;
  NodeId src = -1, dst = -1;
  std::vector<LinCons> guard;  // conjunction
  std::vector<Action> actions; // executed in order after the guard
};

struct Cfg {
  std::string name;
  std::vector<std::string> vars;
  std::vector<LinCons> initial;  // constraints on the state at entry
  int num_nodes = 0;
  NodeId entry = 0;
  std::optional<NodeId> exit;    // absent when the function never terminates
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out;  // edge ids, source order
  std::vector<std::vector<int>> in;
};

/// Lowers structured statements. Nodes unreachable from entry (including an
/// exit node no path reaches) are pruned; ids follow source order.
Cfg build_cfg(const Function& f);

std::string dump_cfg_json(const Cfg& cfg);

// ---------------------------------------------------------------------------
// SSA

struct SsaVersion {
  int var = -1;
  int index = 0;
};

struct SsaAction {
  Action::Kind kind = Action::Kind::Assign;
  int def = -1;      // version defined
  LinExpr rhs;       // over versions
  Integer lo = 0, hi = 0;
};

struct SsaEdge {
  std::vector<LinCons> guard;  // over versions
  std::vector<SsaAction> actions;
};

struct Phi {
  int var = -1;
  int result = -1;
  std::vector<int> args;  // aligned with cfg.in[node]
};

struct SsaCfg {
  Cfg cfg;
  std::vector<SsaVersion> versions;
  std::vector<std::vector<int>> in_ver;   // [node][var] version live on entry
  std::vector<std::vector<int>> out_ver;  // [edge][var] version after the edge
  std::vector<SsaEdge> edges;             // aligned with cfg.edges
  std::vector<std::vector<Phi>> phis;     // [node]

  /// `v_<name>_<index>`.
  std::string version_name(int version) const;
};

/// Places a phi for every variable at every node with two or more incoming
/// edges.
SsaCfg to_ssa(const Cfg& cfg);

// ---------------------------------------------------------------------------
// Distinguished points and paths

struct PrSelection {
  std::vector<NodeId> pr;  // sorted
  std::vector<NodeId> pw;  // sorted, subset of pr
  std::vector<bool> is_pr;
  std::vector<bool> is_pw;
};

PrSelection select_pr(const Cfg& cfg);

/// A path of the split graph: leaves `src` as a source, crosses only non-P_R
/// nodes, and arrives at `dst` as a destination.
struct Path {
  NodeId src = -1;
  NodeId dst = -1;
  std::vector<int> edges;

  std::vector<NodeId> interior(const Cfg& cfg) const;
  bool operator==(const Path& o) const = default;
  auto operator<=>(const Path& o) const = default;
};

std::vector<Path> enumerate_paths(const SsaCfg& ssa, const PrSelection& sel, NodeId from);

std::string render_path(const Cfg& cfg, const Path& p);

// ---------------------------------------------------------------------------
// Concrete execution (used as a semantic oracle)

using InputChooser = std::function<Integer(Integer lo, Integer hi)>;

struct ConcreteRun {
  std::vector<Integer> store;  // per program variable
  NodeId node = -1;            // where execution stopped
  int steps = 0;
  bool blocked = false;        // no enabled edge
};

/// Executes at most `max_steps` edges; the first enabled edge (source order)
/// is taken at every node.
ConcreteRun run_cfg(const Cfg& cfg, std::vector<Integer> store, const InputChooser& choose, int max_steps);
ConcreteRun run_ssa(const SsaCfg& ssa, const std::vector<Integer>& initial, const InputChooser& choose,
                    int max_steps);

}  // namespace pagai
