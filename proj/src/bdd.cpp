#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "pagai/linear.hpp"
#include "pagai/pathsets.hpp"

namespace pagai {

size_t Bdd::KeyHash::operator()(const std::tuple<int, int, int>& k) const {
  size_t h = std::hash<int>()(std::get<0>(k));
  h = h * 1000003U ^ std::hash<int>()(std::get<1>(k));
  h = h * 1000003U ^ std::hash<int>()(std::get<2>(k));
  return h;
}

Bdd::Bdd(size_t num_vars) : num_vars_(num_vars) {
  int t = static_cast<int>(num_vars);
  nodes_.push_back({t, 0, 0});
  nodes_.push_back({t, 1, 1});
}

int Bdd::make(int var, int lo, int hi) {
  if (lo == hi) return lo;
  auto key = std::make_tuple(var, lo, hi);
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  nodes_.push_back({var, lo, hi});
  int id = static_cast<int>(nodes_.size()) - 1;
  unique_.emplace(key, id);
  return id;
}

int Bdd::apply(int op, int a, int b) {
  if (op == 0) {
    if (a == one || b == one) return one;
    if (a == zero) return b;
    if (b == zero) return a;
  } else {
    if (a == zero || b == zero) return zero;
    if (a == one) return b;
    if (b == one) return a;
  }
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  auto key = std::make_tuple(op, a, b);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  int v = std::min(var(a), var(b));
  int alo = var(a) == v ? lo(a) : a, ahi = var(a) == v ? hi(a) : a;
  int blo = var(b) == v ? lo(b) : b, bhi = var(b) == v ? hi(b) : b;
  int l = apply(op, alo, blo);
  int h = apply(op, ahi, bhi);
  int r = make(v, l, h);
  cache_.emplace(key, r);
  return r;
}

int Bdd::apply_or(int a, int b) { return apply(0, a, b); }
int Bdd::apply_and(int a, int b) { return apply(1, a, b); }

int Bdd::negate(int a) {
  if (a == zero) return one;
  if (a == one) return zero;
  return make(var(a), negate(lo(a)), negate(hi(a)));
}

int Bdd::minterm(const std::vector<bool>& vals) {
  if (vals.size() != num_vars_) throw error("bdd: valuation has the wrong number of variables");
  int node = one;
  for (size_t v = num_vars_; v-- > 0;) {
    int iv = static_cast<int>(v);
    node = vals[v] ? make(iv, zero, node) : make(iv, node, zero);
  }
  return node;
}

bool Bdd::eval(int root, const std::vector<bool>& vals) const {
  int n = root;
  while (!terminal(n)) n = vals.at(var(n)) ? hi(n) : lo(n);
  return n == one;
}

std::vector<int> Bdd::reachable(int root) const {
  std::vector<int> out;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (terminal(n) || seen[n]) continue;
    seen[n] = true;
    out.push_back(n);
    stack.push_back(hi(n));
    stack.push_back(lo(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<bool>> Bdd::minterms(int root) const {
  std::vector<std::vector<bool>> out;
  std::vector<bool> cur(num_vars_, false);
  std::function<void(int, size_t)> rec = [&](int n, size_t v) {
    if (n == zero) return;
    if (v == num_vars_) {
      out.push_back(cur);
      return;
    }
    if (!terminal(n) && var(n) == static_cast<int>(v)) {
      cur[v] = false;
      rec(lo(n), v + 1);
      cur[v] = true;
      rec(hi(n), v + 1);
    } else {
      cur[v] = false;
      rec(n, v + 1);
      cur[v] = true;
      rec(n, v + 1);
    }
    cur[v] = false;
  };
  rec(root, 0);
  return out;
}

std::string Bdd::dot(int root, const std::vector<std::string>& names) const {
  std::ostringstream os;
  os << "digraph pathset {\n  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
  for (int n : reachable(root)) {
    os << "  n" << n << " [label=\"" << names.at(var(n)) << "\"];\n";
    os << "  n" << n << " -> n" << lo(n) << " [style=dashed];\n";
    os << "  n" << n << " -> n" << hi(n) << ";\n";
  }
  os << "  root -> n" << root << ";\n  root [shape=plaintext];\n}\n";
  return os.str();
}

PathSet::PathSet(std::shared_ptr<Bdd> bdd, std::vector<std::string> vars) : bdd_(std::move(bdd)), vars_(std::move(vars)) {
  if (vars_.size() != bdd_->num_vars()) throw error("pathset: variable list does not match the BDD");
  for (size_t i = 0; i < vars_.size(); ++i) index_[vars_[i]] = static_cast<int>(i);
}

std::vector<bool> PathSet::valuation(const std::vector<std::string>& preds) const {
  std::vector<bool> vals(vars_.size(), false);
  for (const auto& p : preds) {
    auto it = index_.find(p);
    if (it == index_.end()) throw error("pathset: unknown predicate variable '" + p + "'");
    vals[it->second] = true;
  }
  return vals;
}

PathSet PathSet::add_minterm(const std::vector<bool>& vals) const {
  PathSet r = *this;
  r.root_ = bdd_->apply_or(root_, bdd_->minterm(vals));
  return r;
}

PathSet PathSet::add_predicates(const std::vector<std::string>& preds) const { return add_minterm(valuation(preds)); }

PathSet PathSet::unite(const PathSet& o) const {
  if (o.bdd_ != bdd_) throw error("pathset: union of sets over different stores");
  PathSet r = *this;
  r.root_ = bdd_->apply_or(root_, o.root_);
  return r;
}

bool PathSet::contains_minterm(const std::vector<bool>& vals) const { return bdd_->eval(root_, vals); }

bool PathSet::contains_predicates(const std::vector<std::string>& preds) const {
  return contains_minterm(valuation(preds));
}

size_t PathSet::count() const {
  std::map<int, double> memo;
  size_t n = vars_.size();
  std::function<double(int)> rec = [&](int node) -> double {
    if (node == Bdd::zero) return 0;
    if (node == Bdd::one) return 1;
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    auto level = [&](int c) { return bdd_->terminal(c) ? static_cast<int>(n) : bdd_->var(c); };
    int v = bdd_->var(node);
    double r = rec(bdd_->lo(node)) * std::ldexp(1.0, level(bdd_->lo(node)) - v - 1) +
               rec(bdd_->hi(node)) * std::ldexp(1.0, level(bdd_->hi(node)) - v - 1);
    memo[node] = r;
    return r;
  };
  int top = bdd_->terminal(root_) ? static_cast<int>(n) : bdd_->var(root_);
  return static_cast<size_t>(rec(root_) * std::ldexp(1.0, top));
}

Formula PathSet::to_formula(bool negated) const {
  auto ref = [&](int node) -> Formula {
    if (node == Bdd::zero) return f_false();
    if (node == Bdd::one) return f_true();
    return f_bool("t_" + std::to_string(node));
  };
  std::vector<Formula> parts;
  for (int node : bdd_->reachable(root_)) {
    Formula v = f_bool(vars_[bdd_->var(node)]);
    Formula ite = f_or({f_and({v, ref(bdd_->hi(node))}), f_and({f_not(v), ref(bdd_->lo(node))})});
    parts.push_back(f_iff(ref(node), ite));
  }
  parts.push_back(negated ? f_not(ref(root_)) : ref(root_));
  return f_and(std::move(parts));
}

std::string PathSet::dot() const { return bdd_->dot(root_, vars_); }

}  // namespace pagai
