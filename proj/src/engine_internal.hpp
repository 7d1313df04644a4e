#pragma once

#include <chrono>
#include <deque>

#include "pagai/engine.hpp"

namespace pagai::detail {

/// FIFO worklist without duplicates.
class Worklist {
public:
  explicit Worklist(size_t n = 0) : in_(n, false) {}
  void push(int x) {
    if (in_.at(x)) return;
    in_[x] = true;
    q_.push_back(x);
  }
  int pop() {
    int x = q_.front();
    q_.pop_front();
    in_[x] = false;
    return x;
  }
  bool empty() const { return q_.empty(); }
  bool contains(int x) const { return in_.at(x); }

private:
  std::deque<int> q_;
  std::vector<bool> in_;
};

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

AbstractValue::Env make_env(const Cfg& cfg);

/// Initial values I_p: the declared initial states at entry, bottom elsewhere.
std::vector<AbstractValue> initial_values(const Cfg& cfg, DomainKind d, const AbstractValue::Env& env);

/// Local widening/narrowing sequence of a self-loop path starting from x.
/// Returns a value above x that is a post-fixpoint of the path.
AbstractValue self_loop_sequence(const Cfg& cfg, const Path& p, const AbstractValue& x, const EngineOptions& opts,
                                 Stats& stats);

nlohmann::ordered_json path_json(const Cfg& cfg, const Path& p);

/// Runs a solver query, counting it and logging its verdict.
SolveResult query(Solver& solver, const Formula& f, AnalysisResult& r, const char* kind, NodeId point);

/// The new value of a point receiving `image`: a join, or a widening when the
/// point is in P_W and has already been updated `delay` times.
AbstractValue accumulate(const AbstractValue& old, const AbstractValue& image, bool widen_point, int& updates,
                         const EngineOptions& opts, AnalysisResult& r, NodeId point);

}  // namespace pagai::detail
