#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace pagai;
using namespace testutil;

namespace {

std::vector<std::string> var_names(size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

using oracles::bits;

/// Evaluates the Tseitin formula with each auxiliary set to its node's function.
bool formula_value(const PathSet& s, bool negated, const std::vector<bool>& vals) {
  Model m;
  for (size_t i = 0; i < vals.size(); ++i) m.bools[s.vars()[i]] = vals[i];
  for (int node : s.bdd().reachable(s.root())) m.bools["t_" + std::to_string(node)] = s.bdd().eval(node, vals);
  return evaluate(s.to_formula(negated), m);
}

}  // namespace

TEST_CASE("set operations on the rate limiter") {
  auto sf = corpus_sf("rate_limiter");
  auto bdd = std::make_shared<Bdd>(sf->pred_order.size());
  PathSet empty(bdd, sf->pred_order);
  NodeId h = sf->sel.pw.at(0);
  const auto& paths = sf->paths.at(h);
  REQUIRE(paths.size() == 4);
  for (const auto& p : paths) CHECK_FALSE(empty.contains_minterm(sf->path_minterm(p)));

  PathSet s = empty;
  for (size_t k = 0; k < 3; ++k) {
    s = s.add_predicates(sf->path_predicates(paths[k]));
    CHECK(s.contains_predicates(sf->path_predicates(paths[k])));
  }
  CHECK_FALSE(s.contains_minterm(sf->path_minterm(paths[3])));
  CHECK(s.count() == 3);
  std::set<std::vector<bool>> expect;
  for (size_t k = 0; k < 3; ++k) expect.insert(sf->path_minterm(paths[k]));
  auto got = bdd->minterms(s.root());
  CHECK(std::set<std::vector<bool>>(got.begin(), got.end()) == expect);
  CHECK_THROWS_AS(s.add_predicates({"no_such_predicate"}), error);
}

TEST_CASE("to_formula examples") {
  auto names = var_names(4);
  auto bdd = std::make_shared<Bdd>(4);
  PathSet empty(bdd, names);
  CHECK(empty.to_formula()->kind != FKind::True);
  for (unsigned long x = 0; x < 16; ++x) CHECK_FALSE(formula_value(empty, false, bits(x, 4)));

  // A single minterm: its predicates true, all others false.
  PathSet one = empty.add_predicates({"p0", "p2"});
  for (unsigned long x = 0; x < 16; ++x) CHECK(formula_value(one, false, bits(x, 4)) == (x == 5));
}

TEST_CASE("tseitin formula of corpus path sets") {
  for (const char* name : corpus_names) {
    CAPTURE(name);
    auto sf = corpus_sf(name);
    size_t n = sf->pred_order.size();
    if (n > 20) continue;
    auto bdd = std::make_shared<Bdd>(n);
    PathSet s(bdd, sf->pred_order);
    for (const auto& [src, ps] : sf->paths)
      for (const auto& p : ps) s = s.add_minterm(sf->path_minterm(p));
    size_t nodes = bdd->reachable(s.root()).size();
    CHECK(formula_size(s.to_formula()) <= 16 * (nodes + 1));
    for (unsigned long x = 0; x < (1ul << n); ++x) {
      auto vals = bits(x, n);
      bool in = s.contains_minterm(vals);
      REQUIRE(formula_value(s, false, vals) == in);
      REQUIRE(formula_value(s, true, vals) == !in);
    }
  }
}

TEST_CASE("random operation sequences agree with a naive set") {
  oracles::Tally t = oracles::pathset_vs_set(1000, 11);
  CHECK(t.trials == 1000);
  CHECK(t.disagreements == 0);
}

TEST_CASE("bdd is reduced and ordered") {
  std::mt19937 rng(12);
  auto bdd = std::make_shared<Bdd>(8);
  PathSet s(bdd, var_names(8));
  for (int k = 0; k < 60; ++k) s = s.add_minterm(bits(std::uniform_int_distribution<unsigned long>(0, 255)(rng), 8));
  std::set<std::tuple<int, int, int>> seen;
  for (int node = 2; node < static_cast<int>(bdd->size()); ++node) {
    CHECK(bdd->lo(node) != bdd->hi(node));
    CHECK(seen.insert({bdd->var(node), bdd->lo(node), bdd->hi(node)}).second);
    for (int child : {bdd->lo(node), bdd->hi(node)})
      if (!bdd->terminal(child)) CHECK(bdd->var(child) > bdd->var(node));
  }
}
