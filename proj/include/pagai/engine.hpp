#pragma once

// The five fixpoint techniques (S, G, PF, G+PF, DIS), the inductiveness
// checker and the invariant comparator.

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pagai/domains.hpp"
#include "pagai/ir.hpp"
#include "pagai/smt.hpp"

namespace pagai {

enum class Technique { S, G, PF, GPF, DIS };

/// Accepts S, G, PF, G+PF (or GPF), DIS, case-insensitively.
Technique parse_technique(const std::string& s);
std::string to_string(Technique t);

struct EngineOptions {
  DomainKind domain = DomainKind::Intervals;
  int widening_delay = 1;    // joins before widening at a point of P_W
  int narrowing_rounds = 2;
  int max_disjuncts = 2;     // DIS only, >= 1
  bool dis_narrowing = true;
  int self_loop_limit = 64;
};

/// Ordered record of what a run did, one JSON object per line when written.
class EventLog {
public:
  void add(nlohmann::ordered_json e) { events_.push_back(std::move(e)); }
  const std::vector<nlohmann::ordered_json>& events() const { return events_; }
  /// Events whose "event" field equals `kind`.
  std::vector<nlohmann::ordered_json> of_kind(const std::string& kind) const;
  void write_jsonl(std::ostream& os) const;

private:
  std::vector<nlohmann::ordered_json> events_;
};

/// Disjuncts X_{i,1..m_i} of one point. Indices are 1-based as in sigma.
struct DisjunctiveValue {
  std::vector<AbstractValue> disjuncts;
  int delta = 1;
  int max = 1;
  /// (source disjunct j, path minterm) -> disjunct index at the path's target.
  std::map<std::pair<int, std::vector<bool>>, int> sigma;

  int size() const { return static_cast<int>(disjuncts.size()); }
};

struct Stats {
  long queries = 0;
  long paths_added = 0;
  long widenings = 0;
  long narrowing_rounds = 0;
  double seconds = 0;
};

struct AnalysisResult {
  Technique technique = Technique::S;
  DomainKind domain = DomainKind::Intervals;
  std::shared_ptr<const SemanticsFormula> sf;
  /// [node]; every P_R point is meaningful. S and G also fill other nodes.
  std::vector<AbstractValue> values;
  /// [node]; DIS only. `values` then holds the join of the disjuncts.
  std::vector<DisjunctiveValue> disjunctive;
  /// PF, G+PF, DIS: the multigraph paths taken, in discovery order.
  std::vector<Path> paths;
  /// G only: the values after each phase.
  std::vector<std::vector<AbstractValue>> phases;
  Stats stats;
  EventLog events;

  const Cfg& cfg() const { return sf->cfg(); }
  bool is_disjunctive() const { return technique == Technique::DIS; }
  /// The disjuncts at a point; a single value for convex techniques.
  std::vector<AbstractValue> disjuncts(NodeId p) const;
};

/// Parses, lowers, converts to SSA, selects P_R and encodes rho.
std::shared_ptr<const SemanticsFormula> prepare(const Function& f);
std::shared_ptr<const SemanticsFormula> prepare_source(const std::string& source, const std::string& function = {});

AnalysisResult run_standard(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts);
AnalysisResult run_guided(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts);
AnalysisResult run_pathfocusing(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                                Solver& solver);
AnalysisResult run_combined(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                            Solver& solver);
AnalysisResult run_disjunctive(const std::shared_ptr<const SemanticsFormula>& sf, const EngineOptions& opts,
                               Solver& solver);
AnalysisResult analyze(const std::shared_ptr<const SemanticsFormula>& sf, Technique t, const EngineOptions& opts,
                       Solver& solver);

/// True iff the join of a and b has no integer point outside both.
bool exact_join_check(const AbstractValue& a, const AbstractValue& b, Solver& solver);

/// Index (1-based) of the disjunct of `target` that absorbs `image`, growing
/// `target` when allowed. Memoized in `source.sigma` under (j, minterm).
int sigma_extend(DisjunctiveValue& source, DisjunctiveValue& target, int j, const std::vector<bool>& minterm,
                 const AbstractValue& image, Solver& solver);

struct InductiveReport {
  bool ok = true;
  std::vector<std::string> violations;
};

InductiveReport check_inductive(const AnalysisResult& r, Solver& solver);

enum class Verdict { Stronger, Weaker, Incomparable, Equal };
std::string to_string(Verdict v);

struct Comparison {
  std::vector<std::pair<NodeId, Verdict>> points;
  double stronger = 0, weaker = 0, incomparable = 0, equal = 0;  // percentages
};

/// Verdicts are stated for r1 relative to r2 at every P_R point.
Comparison compare_invariants(const AnalysisResult& r1, const AnalysisResult& r2, Solver& solver);

}  // namespace pagai
