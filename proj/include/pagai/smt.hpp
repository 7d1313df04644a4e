#pragma once

// Encoding of the loop-free split graph as the formula rho, the focusing
// formulas built on top of it, and the solver backends that decide them.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pagai/domains.hpp"
#include "pagai/formula.hpp"
#include "pagai/ir.hpp"
#include "pagai/pathsets.hpp"

namespace pagai {

class SolverError : public error {
public:
  using error::error;
};

/// The formula rho over reachability predicates `bs_<n>`, `bd_<n>` (P_R
/// points), `b_<n>` (other points), edge activations `a_<e>` and SSA values.
struct SemanticsFormula {
  std::shared_ptr<const SsaCfg> ssa;
  PrSelection sel;
  Formula rho;

  std::vector<std::string> src_pred;  // [node]; b_<n> off P_R
  std::vector<std::string> dst_pred;  // [node]; b_<n> off P_R
  std::vector<std::string> edge_pred; // [edge]
  std::vector<std::vector<std::string>> src_vals;  // [node][var], P_R only
  std::vector<std::vector<std::string>> dst_vals;  // [node][var], P_R only
  std::vector<std::vector<Atom>> edge_atoms;       // [edge] guard, assignments, input bounds
  std::vector<std::vector<Atom>> edge_phi;         // [edge] phi copies at its destination

  /// BDD variable order: P_R sources, interior points in topological order,
  /// P_R destinations.
  std::vector<std::string> pred_order;
  std::map<std::string, int> pred_index;

  /// Syntactic paths per P_R source, shortest first.
  std::map<NodeId, std::vector<Path>> paths;

  const Cfg& cfg() const { return ssa->cfg; }
  /// Predicates true on the path (source, interior points, destination).
  std::vector<std::string> path_predicates(const Path& p) const;
  /// Characteristic valuation over pred_order.
  std::vector<bool> path_minterm(const Path& p) const;
  /// Linear constraints rho imposes once the path's booleans are fixed.
  std::vector<Atom> path_atoms(const Path& p) const;
  /// Truth values of every predicate and edge variable for the path.
  std::map<std::string, bool> path_booleans(const Path& p) const;
  size_t syntactic_path_count() const;
};

std::shared_ptr<const SemanticsFormula> encode_semantics(std::shared_ptr<const SsaCfg> ssa, const PrSelection& sel);

/// Values indexed by node id; entries off P_R are ignored.
using PointValues = std::vector<AbstractValue>;
using DisjunctiveValues = std::vector<std::vector<AbstractValue>>;

Formula source_selector(const SemanticsFormula& sf, NodeId i);
Formula build_focus_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X);
Formula build_newpath_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X,
                              const PathSet& P);
/// `f(p_i)` restricted to paths in P.
Formula build_restricted_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, const PointValues& X,
                                 const PathSet& P);
Formula build_disjunctive_formula(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i,
                                  const DisjunctiveValues& Xd, const PathSet* restrict_to = nullptr,
                                  const PathSet* exclude = nullptr);
/// Disjunction of the disjuncts renamed to the given symbols.
Formula disjunction_formula(const std::vector<AbstractValue>& ds, const std::vector<std::string>& names);
std::string disjunct_var(int k);

struct ExtractedPath {
  Path path;
  int disjunct = -1;  // 0-based; -1 when no d_k is true
};

ExtractedPath extract_path(const SemanticsFormula& sf, const Model& m);

struct SolveResult {
  bool sat = false;
  Model model;
};

class Solver {
public:
  virtual ~Solver() = default;
  virtual SolveResult solve(const Formula& f) = 0;
  virtual std::string name() const = 0;
  long queries() const { return queries_; }

protected:
  long queries_ = 0;
};

/// Enumerates the paths of the split graph when the query contains rho, and
/// decides the remaining boolean structure by case splitting over linear
/// atoms checked with Fourier-Motzkin and integer branch-and-bound.
class InternalSolver : public Solver {
public:
  SolveResult solve(const Formula& f) override;
  std::string name() const override { return "internal"; }
};

/// SMT-LIB2 process speaking QF_LIA on stdin/stdout.
class ExternalSolver : public Solver {
public:
  explicit ExternalSolver(std::string command, bool process_per_query = false,
                          std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~ExternalSolver() override;
  SolveResult solve(const Formula& f) override;
  std::string name() const override { return "cmd:" + command_; }

private:
  struct Process;
  void start();
  void stop();
  void send(const std::string& s);
  std::string read_response();

  std::string command_;
  bool per_query_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<Process> proc_;
  const SemanticsFormula* asserted_rho_ = nullptr;
  std::shared_ptr<const SemanticsFormula> rho_owner_;
};

/// Runs both backends on every query and records verdict disagreements; the
/// primary backend's answer is returned.
class CrossCheckSolver : public Solver {
public:
  CrossCheckSolver(std::unique_ptr<Solver> primary, std::unique_ptr<Solver> secondary);
  SolveResult solve(const Formula& f) override;
  std::string name() const override { return "crosscheck(" + primary_->name() + "," + secondary_->name() + ")"; }
  long agreements() const { return agreements_; }
  long disagreements() const { return disagreements_; }

private:
  std::unique_ptr<Solver> primary_, secondary_;
  long agreements_ = 0, disagreements_ = 0;
};

/// `internal` or `cmd:<executable and arguments>`.
std::unique_ptr<Solver> make_solver(const std::string& spec);
/// Default solver spec: $PAGAI_LITE_SOLVER, else `internal`.
std::string default_solver_spec();
/// A command line of an SMT-LIB2 solver found on PATH, or empty.
std::string find_external_solver();

}  // namespace pagai
