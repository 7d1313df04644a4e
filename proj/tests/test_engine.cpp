#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace pagai;
using namespace testutil;

namespace {

const DomainKind kinds[] = {DomainKind::Intervals, DomainKind::Octagons};
const Technique techniques[] = {Technique::S, Technique::G, Technique::PF, Technique::GPF, Technique::DIS};

LinExpr v(int i) { return LinExpr::var(i); }
LinExpr c(Integer k) { return LinExpr::constant_expr(k); }

AbstractValue::Env env1() { return std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"x"}); }
AbstractValue::Env env2() {
  return std::make_shared<const std::vector<std::string>>(std::vector<std::string>{"x", "y"});
}

AbstractValue box(Integer lo, Integer hi, const AbstractValue::Env& env = env1()) {
  return AbstractValue::top(DomainKind::Intervals, env)
      .meet_constraints({LinCons::make(v(0), CmpOp::Ge, c(lo)), LinCons::make(v(0), CmpOp::Le, c(hi))});
}

AnalysisResult run(const std::string& name, Technique t, DomainKind d, int M = 2) {
  InternalSolver s;
  EngineOptions o;
  o.domain = d;
  o.max_disjuncts = M;
  return analyze(corpus_sf(name), t, o, s);
}

std::string head(const AnalysisResult& r) { return r.values.at(r.sf->sel.pw.at(0)).render(); }

}  // namespace

TEST_CASE("exact_join_check examples") {
  InternalSolver s;
  CHECK(exact_join_check(box(0, 5), box(0, 5), s));
  CHECK_FALSE(exact_join_check(box(-2, -1), box(1, 2), s));
  CHECK(exact_join_check(box(0, 1), box(2, 3), s));
  CHECK(exact_join_check(box(0, 5), box(3, 10), s));
  CHECK_FALSE(exact_join_check(box(0, 5), box(7, 10), s));
}

TEST_CASE("sigma_extend examples") {
  InternalSolver s;
  auto dv = [](std::vector<AbstractValue> ds, int M) {
    DisjunctiveValue d;
    d.disjuncts = std::move(ds);
    d.delta = 1;
    d.max = M;
    return d;
  };
  std::vector<bool> k0{true, false}, k1{false, true};
  {
    // Image inside an existing disjunct.
    DisjunctiveValue src = dv({box(0, 0)}, 2), dst = dv({box(0, 5), box(20, 30)}, 2);
    CHECK(sigma_extend(src, dst, 1, k0, box(21, 22), s) == 2);
    CHECK(dst.size() == 2);
  }
  {
    // No exact join and no room: the last disjunct.
    DisjunctiveValue src = dv({box(0, 0)}, 1), dst = dv({box(0, 5)}, 1);
    CHECK(sigma_extend(src, dst, 1, k0, box(7, 10), s) == 1);
    CHECK(dst.size() == 1);
  }
  {
    DisjunctiveValue src = dv({box(0, 0)}, 2), dst = dv({box(0, 5)}, 2);
    CHECK(sigma_extend(src, dst, 1, k0, box(3, 10), s) == 1);
    CHECK(sigma_extend(src, dst, 1, k1, box(7, 10), s) == 2);
    CHECK(dst.size() == 2);
    CHECK(dst.disjuncts[1].is_bottom());
    // Memoized per (source disjunct, path).
    CHECK(sigma_extend(src, dst, 1, k1, box(0, 1), s) == 2);
    CHECK(src.sigma.size() == 2);
    for (const auto& [key, t] : src.sigma) {
      CHECK(t >= 1);
      CHECK(t <= dst.size());
    }
  }
}

TEST_CASE("compare_invariants examples") {
  InternalSolver s;
  auto r = run("rate_limiter", Technique::PF, DomainKind::Intervals);
  Comparison self = compare_invariants(r, r, s);
  CHECK(self.equal == doctest::Approx(100));
  for (const auto& [p, verdict] : self.points) CHECK(verdict == Verdict::Equal);

  auto st = run("rate_limiter", Technique::S, DomainKind::Intervals);
  Comparison pf_s = compare_invariants(r, st, s);
  NodeId h = r.sf->sel.pw.at(0);
  for (const auto& [p, verdict] : pf_s.points)
    CHECK(verdict == (p == h ? Verdict::Stronger : Verdict::Equal));
  CHECK(pf_s.stronger + pf_s.weaker + pf_s.incomparable + pf_s.equal == doctest::Approx(100).epsilon(0.001));

  // Incomparable boxes, compared through two one-point results.
  auto sf = prepare(parse_program("fn f() { int x; int y; }").function());
  auto a = AbstractValue::top(DomainKind::Intervals, env2())
               .meet_constraints({LinCons::make(v(0), CmpOp::Ge, c(0)), LinCons::make(v(0), CmpOp::Le, c(1)),
                                  LinCons::make(v(1), CmpOp::Ge, c(0)), LinCons::make(v(1), CmpOp::Le, c(9))});
  auto b = AbstractValue::top(DomainKind::Intervals, env2())
               .meet_constraints({LinCons::make(v(0), CmpOp::Ge, c(0)), LinCons::make(v(0), CmpOp::Le, c(2)),
                                  LinCons::make(v(1), CmpOp::Ge, c(0)), LinCons::make(v(1), CmpOp::Le, c(3))});
  AnalysisResult ra, rb;
  ra.sf = rb.sf = sf;
  ra.values.assign(sf->cfg().num_nodes, a);
  rb.values.assign(sf->cfg().num_nodes, b);
  Comparison ab = compare_invariants(ra, rb, s);
  CHECK(ab.incomparable == doctest::Approx(100));
}

TEST_CASE("check_inductive examples") {
  InternalSolver s;
  auto sf = corpus_sf("gopan_reps");
  auto env = std::make_shared<const std::vector<std::string>>(sf->cfg().vars);
  AnalysisResult top, bot;
  top.sf = bot.sf = sf;
  top.values.assign(sf->cfg().num_nodes, AbstractValue::top(DomainKind::Octagons, env));
  bot.values.assign(sf->cfg().num_nodes, AbstractValue::bottom(DomainKind::Octagons, env));
  CHECK(check_inductive(top, s).ok);
  InductiveReport rep = check_inductive(bot, s);
  CHECK_FALSE(rep.ok);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations[0].find("entry") != std::string::npos);
}

TEST_CASE("standard and guided analysis examples") {
  CHECK(head(run("rate_limiter", Technique::S, DomainKind::Intervals)) == "true");
  CHECK(head(run("rate_limiter", Technique::G, DomainKind::Intervals)) == "true");

  auto diamond = run("diamond", Technique::S, DomainKind::Intervals);
  CHECK(diamond.stats.widenings == 0);
  const Cfg& cfg = diamond.cfg();
  // b in [1, 6] merges [1, 6] and [1, 5]; then a = b - 1.
  CHECK(diamond.values.at(*cfg.exit).render() == "0 <= a <= 5 && 1 <= b <= 6");

  auto g = run("gopan_reps", Technique::G, DomainKind::Octagons);
  CHECK(head(g) == "x - y >= 0 && x + y <= 102 && y >= 0");
  NodeId h = g.sf->sel.pw.at(0);
  bool phase1 = false;
  for (const auto& X : g.phases) phase1 = phase1 || X.at(h).render() == "0 <= x <= 51 && x - y = 0";
  CHECK(phase1);
}

TEST_CASE("path-focusing examples") {
  CHECK(head(run("rate_limiter", Technique::PF, DomainKind::Intervals)) == "-100000 <= x_old <= 100000");
  CHECK(head(run("rate_limiter", Technique::GPF, DomainKind::Intervals)) == "-100000 <= x_old <= 100000");
  CHECK(head(run("counter", Technique::PF, DomainKind::Intervals)) == "0 <= i <= 100");

  auto pf = run("nested_rate_limiter", Technique::PF, DomainKind::Intervals);
  auto gpf = run("nested_rate_limiter", Technique::GPF, DomainKind::Intervals);
  int xo = var_index(pf.cfg(), "x_old");
  for (NodeId p : pf.sf->sel.pw) {
    CHECK(pf.values.at(p).interval(xo) == Interval::top());
    CHECK(gpf.values.at(p).interval(xo) == Interval{-10000, 10000});
  }
}

TEST_CASE("loop-free programs: PF equals S") {
  InternalSolver s;
  for (const char* name : {"empty", "diamond", "straight_line"})
    for (DomainKind d : kinds) {
      auto a = run(name, Technique::S, d), b = run(name, Technique::PF, d);
      CHECK(compare_invariants(a, b, s).equal == doctest::Approx(100));
    }
}

TEST_CASE("loop body that is never entered adds no loop path") {
  auto sf = prepare(parse_program("fn f() { int x = 0; while (x > 5) { x = x + 1; } }").function());
  InternalSolver s;
  EngineOptions o;
  auto r = run_combined(sf, o, s);
  NodeId h = sf->sel.pw.at(0);
  for (const auto& p : r.paths) CHECK_FALSE((p.src == h && p.dst == h));
  CHECK(r.values.at(h).render() == "x = 0");
  CHECK(r.values.at(*sf->cfg().exit).render() == "x = 0");
}

TEST_CASE("disjunctive examples") {
  auto gr = run("gopan_reps", Technique::DIS, DomainKind::Octagons);
  NodeId h = gr.sf->sel.pw.at(0);
  REQUIRE(gr.is_disjunctive());
  const auto& dv = gr.disjunctive.at(h);
  CHECK(dv.size() == 2);
  CHECK(dv.delta >= 1);
  CHECK(dv.delta <= dv.size());
  CHECK(dv.size() <= dv.max);
  InternalSolver s;
  auto gpf = run("gopan_reps", Technique::GPF, DomainKind::Octagons);
  Comparison cmp = compare_invariants(gr, gpf, s);
  for (const auto& [p, verdict] : cmp.points)
    if (p == h) CHECK(verdict == Verdict::Stronger);

  // Every join on this loop is exact, so one disjunct suffices.
  auto ps = run("phase_split", Technique::DIS, DomainKind::Intervals);
  CHECK(check_inductive(ps, s).ok);
  CHECK(ps.disjunctive.at(ps.sf->sel.pw.at(0)).size() == 1);
  CHECK(head(ps) == "0 <= x <= 50");
}

TEST_CASE("every technique is sound on the corpus") {
  for (const auto& spec : {std::string("internal"), find_external_solver()}) {
    if (spec.empty()) continue;
    std::string solver = spec == "internal" ? spec : "cmd:" + spec;
    CAPTURE(solver);
    for (const char* name : corpus_names) {
      std::string program = name;
      CAPTURE(program);
      auto sf = corpus_sf(name);
      for (Technique t : techniques)
        for (DomainKind d : kinds) {
          auto s = make_solver(solver);
          EngineOptions o;
          o.domain = d;
          auto r = analyze(sf, t, o, *s);
          for (NodeId p : sf->sel.pr) CHECK(p < static_cast<NodeId>(r.values.size()));
          InternalSolver checker;
          auto rep = check_inductive(r, checker);
          CHECK_MESSAGE(rep.ok, to_string(t) << " " << to_string(d));
        }
    }
  }
}

TEST_CASE("path sets grow strictly and phases stay ordered") {
  for (const char* name : corpus_names) {
    std::string program = name;
    CAPTURE(program);
    auto sf = corpus_sf(name);
    for (Technique t : {Technique::GPF, Technique::DIS})
      for (DomainKind d : kinds) {
        auto r = run(name, t, d);
        long last = 0;
        for (const auto& e : r.events.of_kind("outer_iteration")) {
          long n = e["paths"].get<long>();
          CHECK(n > last);
          last = n;
        }
        CHECK(static_cast<size_t>(last) <= sf->syntactic_path_count());
        CHECK(r.paths.size() <= sf->syntactic_path_count());

        // No path insertion after the focus phase of the same iteration.
        std::string phase;
        for (const auto& e : r.events.events()) {
          std::string kind = e["event"].get<std::string>();
          if (kind == "phase") {
            std::string next = e["name"].get<std::string>();
            if (phase == "new_paths") CHECK((next == "focus" || next == "new_paths"));
            if (phase == "focus") CHECK(next == "narrow");
            if (phase == "narrow") CHECK(next == "new_paths");
            phase = next;
          }
          if (kind == "path_added") CHECK(phase == "new_paths");
        }
      }
  }
}

TEST_CASE("narrowing only shrinks") {
  for (const char* name : corpus_names)
    for (DomainKind d : kinds)
      for (Technique t : {Technique::S, Technique::PF}) {
        InternalSolver s;
        EngineOptions wide, narrow;
        wide.domain = narrow.domain = d;
        wide.narrowing_rounds = 0;
        auto sf = corpus_sf(name);
        auto a = analyze(sf, t, narrow, s), b = analyze(sf, t, wide, s);
        for (NodeId p : sf->sel.pr) CHECK(a.values.at(p).leq(b.values.at(p)));
      }
}

TEST_CASE("one disjunct reproduces G+PF") {
  InternalSolver s;
  for (const char* name : corpus_names)
    for (DomainKind d : kinds) {
      auto dis = run(name, Technique::DIS, d, 1), gpf = run(name, Technique::GPF, d);
      Comparison cmp = compare_invariants(dis, gpf, s);
      CHECK(cmp.equal == doctest::Approx(100));
    }
}

TEST_CASE("engine rejects bad options") {
  InternalSolver s;
  EngineOptions o;
  o.max_disjuncts = 0;
  CHECK_THROWS_AS(run_disjunctive(corpus_sf("counter"), o, s), error);
  CHECK_THROWS_AS(parse_technique("XYZ"), error);
  CHECK(parse_technique("g+pf") == Technique::GPF);
}
