#pragma once

// Sets of paths as reduced ordered BDDs over the reachability predicates.

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pagai/formula.hpp"

namespace pagai {

/// Hash-consed node store. Node 0 is the false terminal, node 1 the true one.
/// Variable indices increase along every path.
class Bdd {
public:
  explicit Bdd(size_t num_vars);

  size_t num_vars() const { return num_vars_; }
  static constexpr int zero = 0;
  static constexpr int one = 1;

  int make(int var, int lo, int hi);
  int apply_or(int a, int b);
  int apply_and(int a, int b);
  int negate(int a);
  /// The function true exactly on `vals`.
  int minterm(const std::vector<bool>& vals);
  bool eval(int root, const std::vector<bool>& vals) const;

  int var(int node) const { return nodes_[node].var; }
  int lo(int node) const { return nodes_[node].lo; }
  int hi(int node) const { return nodes_[node].hi; }
  bool terminal(int node) const { return node <= 1; }
  size_t size() const { return nodes_.size(); }
  /// Internal nodes reachable from root.
  std::vector<int> reachable(int root) const;
  /// Satisfying full assignments.
  std::vector<std::vector<bool>> minterms(int root) const;
  std::string dot(int root, const std::vector<std::string>& names) const;

private:
  struct Node {
    int var, lo, hi;
  };
  struct KeyHash {
    size_t operator()(const std::tuple<int, int, int>& k) const;
  };
  int apply(int op, int a, int b);

  size_t num_vars_;
  std::vector<Node> nodes_;
  std::unordered_map<std::tuple<int, int, int>, int, KeyHash> unique_;
  std::unordered_map<std::tuple<int, int, int>, int, KeyHash> cache_;
};

/// A set of paths identified by their characteristic valuations.
class PathSet {
public:
  PathSet(std::shared_ptr<Bdd> bdd, std::vector<std::string> vars);

  PathSet add_minterm(const std::vector<bool>& vals) const;
  /// Adds the valuation with exactly `preds` true; unknown names throw.
  PathSet add_predicates(const std::vector<std::string>& preds) const;
  PathSet unite(const PathSet& o) const;
  bool contains_minterm(const std::vector<bool>& vals) const;
  bool contains_predicates(const std::vector<std::string>& preds) const;
  bool empty() const { return root_ == Bdd::zero; }
  size_t count() const;
  int root() const { return root_; }
  const Bdd& bdd() const { return *bdd_; }
  const std::vector<std::string>& vars() const { return vars_; }

  /// Tseitin encoding: one `t_<node>` definition per BDD node plus the root
  /// literal, negated on request. Linear in the BDD size.
  Formula to_formula(bool negated = false) const;
  std::string dot() const;

private:
  std::vector<bool> valuation(const std::vector<std::string>& preds) const;

  std::shared_ptr<Bdd> bdd_;
  std::vector<std::string> vars_;
  std::map<std::string, int> index_;
  int root_ = Bdd::zero;
};

}  // namespace pagai
