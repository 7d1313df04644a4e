#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "pagai/fm.hpp"
#include "test_util.hpp"

using namespace pagai;
using namespace testutil;

namespace {

LinExpr v(int i, Integer k = 1) { return LinExpr::var(i, k); }
LinExpr c(Integer k) { return LinExpr::constant_expr(k); }

AbstractValue::Env env_of(const Cfg& cfg) { return std::make_shared<const std::vector<std::string>>(cfg.vars); }

std::shared_ptr<const SemanticsFormula> encode(const Cfg& cfg) {
  auto ssa = std::make_shared<const SsaCfg>(to_ssa(cfg));
  return encode_semantics(ssa, select_pr(ssa->cfg));
}

/// Entry -> exit over one edge guarded by x >= 0.
Cfg one_edge() {
  Cfg cfg;
  cfg.name = "one";
  cfg.vars = {"x"};
  cfg.num_nodes = 2;
  cfg.entry = 0;
  cfg.exit = 1;
  cfg.edges = {{0, 0, 1, {LinCons::make(v(0), CmpOp::Ge, c(0))}, {}}};
  cfg.out = {{0}, {}};
  cfg.in = {{}, {0}};
  return cfg;
}

PointValues uniform(const SemanticsFormula& sf, DomainKind d, bool top) {
  auto env = env_of(sf.cfg());
  return PointValues(sf.cfg().num_nodes, top ? AbstractValue::top(d, env) : AbstractValue::bottom(d, env));
}

/// Checks every sat model against the query with the formula interpreter.
class CheckedSolver : public Solver {
public:
  explicit CheckedSolver(std::unique_ptr<Solver> inner) : inner_(std::move(inner)) {}
  SolveResult solve(const Formula& f) override {
    SolveResult r = inner_->solve(f);
    ++queries_;
    if (r.sat) {
      ++models;
      if (!evaluate(f, r.model)) ++bad_models;
    }
    return r;
  }
  std::string name() const override { return inner_->name(); }
  long models = 0, bad_models = 0;

private:
  std::unique_ptr<Solver> inner_;
};

std::vector<std::string> backends() {
  std::vector<std::string> out{"internal"};
  std::string ext = find_external_solver();
  if (!ext.empty()) out.push_back("cmd:" + ext);
  return out;
}

/// Integer feasibility of a path, independent of rho.
bool path_feasible(const SemanticsFormula& sf, const Path& p) {
  std::map<std::string, int> index;
  std::vector<LinCons> cs;
  for (const auto& a : sf.path_atoms(p)) {
    LinCons k;
    k.op = a.op;
    k.expr.constant = a.constant;
    for (const auto& [name, coeff] : a.terms) {
      auto it = index.emplace(name, static_cast<int>(index.size())).first;
      k.expr.add_term(it->second, coeff);
    }
    cs.push_back(k);
  }
  IntResult r = int_solve(cs, index.size());
  return r.verdict != IntVerdict::Unsat;
}

}  // namespace

TEST_CASE("solve examples") {
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    auto s = make_solver(spec);
    CHECK_FALSE(s->solve(f_false()).sat);
    std::vector<std::string> names{"x"};
    CHECK_FALSE(s->solve(f_and({f_atom(LinCons::make(v(0), CmpOp::Ge, c(0)), names),
                                f_atom(LinCons::make(v(0), CmpOp::Le, c(50)), names),
                                f_atom(LinCons::make(v(0), CmpOp::Ge, c(51)), names)}))
                    .sat);
    CHECK_FALSE(s->solve(f_atom(LinCons::make(v(0, 2), CmpOp::Eq, c(1)), names)).sat);
    SolveResult r = s->solve(f_and({f_atom(LinCons::make(v(0), CmpOp::Ne, c(3)), names),
                                    f_atom(LinCons::make(v(0), CmpOp::Ge, c(3)), names),
                                    f_atom(LinCons::make(v(0), CmpOp::Le, c(4)), names)}));
    REQUIRE(r.sat);
    CHECK(r.model.integer("x") == 4);
  }
}

TEST_CASE("one-edge encoding") {
  auto sf = encode(one_edge());
  InternalSolver s;
  Formula x_ge_0 = f_atom(LinCons::make(v(0), CmpOp::Ge, c(0)), sf->src_vals[0]);
  Formula claim = f_iff(f_bool(sf->dst_pred[1]), f_and({f_bool(sf->src_pred[0]), x_ge_0}));
  CHECK_FALSE(s.solve(f_and({f_rho(sf), f_not(claim)})).sat);

  SolveResult r = s.solve(f_and({f_rho(sf), source_selector(*sf, 0), f_bool(sf->dst_pred[1])}));
  REQUIRE(r.sat);
  ExtractedPath ep = extract_path(*sf, r.model);
  CHECK(ep.path == Path{0, 1, {0}});
  CHECK(ep.disjunct == -1);
}

TEST_CASE("focus formula examples") {
  auto sf = corpus_sf("rate_limiter");
  NodeId h = sf->sel.pw.at(0);
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    auto s = make_solver(spec);
    for (DomainKind d : {DomainKind::Intervals, DomainKind::Octagons}) {
      CHECK_FALSE(s->solve(build_focus_formula(sf, h, uniform(*sf, d, true))).sat);
      CHECK_FALSE(s->solve(build_focus_formula(sf, h, uniform(*sf, d, false))).sat);
      PointValues X = uniform(*sf, d, false);
      int xo = var_index(sf->cfg(), "x_old");
      X[h] = AbstractValue::top(d, env_of(sf->cfg())).meet_constraints({LinCons::make(v(xo), CmpOp::Eq, c(0))});
      SolveResult r = s->solve(build_focus_formula(sf, h, X));
      REQUIRE(r.sat);
      Path p = extract_path(*sf, r.model).path;
      CHECK(p.src == h);
      CHECK(p.dst == h);
      CHECK_FALSE(transform(sf->cfg(), p, X[h]).leq(X[h]));
    }
  }
}

TEST_CASE("new-path formula examples") {
  auto sf = corpus_sf("rate_limiter");
  NodeId h = sf->sel.pw.at(0);
  InternalSolver s;
  PointValues X = uniform(*sf, DomainKind::Intervals, false);
  int xo = var_index(sf->cfg(), "x_old");
  X[h] = AbstractValue::top(DomainKind::Intervals, env_of(sf->cfg())).meet_constraints({LinCons::make(v(xo), CmpOp::Eq, c(0))});
  auto bdd = std::make_shared<Bdd>(sf->pred_order.size());
  PathSet none(bdd, sf->pred_order), all = none;
  for (const auto& p : sf->paths.at(h)) all = all.add_minterm(sf->path_minterm(p));
  CHECK_FALSE(s.solve(build_newpath_formula(sf, h, X, all)).sat);
  CHECK(s.solve(build_newpath_formula(sf, h, X, none)).sat == s.solve(build_focus_formula(sf, h, X)).sat);
  CHECK(s.solve(build_focus_formula(sf, h, X)).sat);
}

TEST_CASE("second step of the nested rate limiter takes the no-clamp path") {
  auto sf = corpus_sf("nested_rate_limiter");
  const Cfg& cfg = sf->cfg();
  auto env = env_of(cfg);
  int xo = var_index(cfg, "x_old");
  NodeId outer = sf->sel.pw.at(0);
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    auto s = make_solver(spec);
    PointValues X = uniform(*sf, DomainKind::Intervals, false);
    X[cfg.entry] = initial_value(cfg, DomainKind::Intervals, env);
    X[outer] = AbstractValue::top(DomainKind::Intervals, env).meet_constraints({LinCons::make(v(xo), CmpOp::Eq, c(0))});
    auto bdd = std::make_shared<Bdd>(sf->pred_order.size());
    PathSet P(bdd, sf->pred_order);
    P = P.add_minterm(sf->path_minterm(sf->paths.at(cfg.entry).at(0)));
    SolveResult r = s->solve(build_newpath_formula(sf, outer, X, P));
    REQUIRE(r.sat);
    Path p = extract_path(*sf, r.model).path;
    CHECK(p.src == outer);
    CHECK_FALSE(P.contains_minterm(sf->path_minterm(p)));
    // Other solvers may return any path outside P.
    if (spec != "internal") continue;
    // Only the path through both else branches can leave x_old strictly
    // inside (-10, 10); the clamps pin it to +-10.
    CHECK(transform(cfg, p, X[outer]).interval(xo) == Interval{-10, 10});
  }
}

TEST_CASE("disjunctive formula picks the escaping source disjunct") {
  Program prog = parse_program("fn f() { int x; x = x + 10; }");
  auto sf = prepare(prog.function());
  const Cfg& cfg = sf->cfg();
  auto env = env_of(cfg);
  auto box = [&](Integer lo, Integer hi) {
    return AbstractValue::top(DomainKind::Intervals, env)
        .meet_constraints({LinCons::make(v(0), CmpOp::Ge, c(lo)), LinCons::make(v(0), CmpOp::Le, c(hi))});
  };
  DisjunctiveValues Xd(cfg.num_nodes);
  Xd[cfg.entry] = {box(0, 10), box(100, 110)};
  Xd[*cfg.exit] = {box(0, 100)};
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    auto s = make_solver(spec);
    SolveResult r = s->solve(build_disjunctive_formula(sf, cfg.entry, Xd));
    REQUIRE(r.sat);
    CHECK(r.model.boolean(disjunct_var(1)));
    CHECK_FALSE(r.model.boolean(disjunct_var(0)));
    ExtractedPath ep = extract_path(*sf, r.model);
    CHECK(ep.disjunct == 1);
    CHECK(ep.path.dst == *cfg.exit);

    DisjunctiveValues top = Xd;
    top[*cfg.exit] = {AbstractValue::top(DomainKind::Intervals, env)};
    CHECK_FALSE(s->solve(build_disjunctive_formula(sf, cfg.entry, top)).sat);

    // A single disjunct behaves like the plain focus formula.
    DisjunctiveValues single = Xd;
    single[cfg.entry] = {box(100, 110)};
    PointValues X(cfg.num_nodes, AbstractValue::bottom(DomainKind::Intervals, env));
    X[cfg.entry] = box(100, 110);
    X[*cfg.exit] = box(0, 100);
    CHECK(s->solve(build_disjunctive_formula(sf, cfg.entry, single)).sat ==
          s->solve(build_focus_formula(sf, cfg.entry, X)).sat);
  }
}

TEST_CASE("extract_path reads the boolean skeleton") {
  auto sf = corpus_sf("rate_limiter");
  NodeId h = sf->sel.pw.at(0);
  for (const auto& p : sf->paths.at(h)) {
    Model m;
    for (const auto& [name, val] : sf->path_booleans(p)) m.bools[name] = val;
    CHECK(extract_path(*sf, m).path == p);
  }
}

namespace {

/// Feasible paths from i: models of rho, the source selector, some
/// destination, and not-P.
std::vector<Path> enumerate_feasible(const std::shared_ptr<const SemanticsFormula>& sf, NodeId i, Solver& s) {
  std::vector<Formula> dst;
  for (NodeId j : sf->sel.pr) dst.push_back(f_bool(sf->dst_pred[j]));
  auto bdd = std::make_shared<Bdd>(sf->pred_order.size());
  PathSet P(bdd, sf->pred_order);
  std::vector<Path> out;
  for (;;) {
    SolveResult r = s.solve(f_and({f_rho(sf), source_selector(*sf, i), f_or(dst), P.to_formula(true)}));
    if (!r.sat) break;
    Path p = extract_path(*sf, r.model).path;
    auto mt = sf->path_minterm(p);
    REQUIRE_FALSE(P.contains_minterm(mt));
    P = P.add_minterm(mt);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("rate limiter loop has three feasible paths") {
  auto sf = corpus_sf("rate_limiter");
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    auto s = make_solver(spec);
    CHECK(enumerate_feasible(sf, sf->sel.pw.at(0), *s).size() == 3);
  }
}

TEST_CASE("complementary diamond has two feasible paths") {
  auto sf = prepare(parse_program("fn f() { int x; if (x <= 50) { x = 1; } else { x = 2; } }").function());
  InternalSolver s;
  auto ps = enumerate_feasible(sf, sf->cfg().entry, s);
  CHECK(ps.size() == 2);
  for (const auto& p : ps) CHECK(path_feasible(*sf, p));
}

TEST_CASE("skeleton models are in bijection with feasible paths") {
  for (const char* name : corpus_names) {
    std::string program = name;
    CAPTURE(program);
    auto sf = corpus_sf(name);
    for (const auto& spec : backends()) {
      CAPTURE(spec);
      auto s = make_solver(spec);
      for (NodeId i : sf->sel.pr) {
        auto found = enumerate_feasible(sf, i, *s);
        std::set<Path> got(found.begin(), found.end()), expect;
        for (const auto& p : sf->paths.at(i))
          if (path_feasible(*sf, p)) expect.insert(p);
        CHECK(got.size() == expect.size());
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("new-path models lie outside P") {
  std::mt19937 rng(5);
  for (const char* name : corpus_names) {
    std::string program = name;
    CAPTURE(program);
    auto sf = corpus_sf(name);
    InternalSolver s;
    for (NodeId i : sf->sel.pr) {
      // X_i = top and every other point bottom: any feasible path leaving i
      // for another point is a candidate.
      PointValues X = uniform(*sf, DomainKind::Octagons, false);
      X[i] = AbstractValue::top(DomainKind::Octagons, env_of(sf->cfg()));
      for (int it = 0; it < 5; ++it) {
        auto bdd = std::make_shared<Bdd>(sf->pred_order.size());
        PathSet P(bdd, sf->pred_order);
        for (const auto& p : sf->paths.at(i))
          if (rng() % 2) P = P.add_minterm(sf->path_minterm(p));
        std::set<Path> expect;
        for (const auto& p : sf->paths.at(i))
          if (p.dst != i && !P.contains_minterm(sf->path_minterm(p)) && path_feasible(*sf, p)) expect.insert(p);
        std::set<Path> got;
        for (;;) {
          SolveResult r = s.solve(build_newpath_formula(sf, i, X, P));
          if (!r.sat) break;
          Path p = extract_path(*sf, r.model).path;
          REQUIRE_FALSE(P.contains_minterm(sf->path_minterm(p)));
          got.insert(p);
          P = P.add_minterm(sf->path_minterm(p));
        }
        CHECK(got == expect);
      }
    }
  }
}

TEST_CASE("models satisfy their queries") {
  for (const auto& spec : backends()) {
    CAPTURE(spec);
    for (const char* name : corpus_names) {
      auto sf = corpus_sf(name);
      for (Technique t : {Technique::PF, Technique::GPF, Technique::DIS}) {
        CheckedSolver s(make_solver(spec));
        EngineOptions o;
        o.domain = DomainKind::Octagons;
        analyze(sf, t, o, s);
        CHECK(s.bad_models == 0);
      }
    }
  }
}

TEST_CASE("backends agree on every corpus query") {
  std::string ext = find_external_solver();
  if (ext.empty()) {
    MESSAGE("no external SMT solver on PATH; skipped");
    return;
  }
  long total = 0;
  for (const char* name : corpus_names) {
    auto sf = corpus_sf(name);
    for (DomainKind d : {DomainKind::Intervals, DomainKind::Octagons})
      for (Technique t : {Technique::PF, Technique::GPF, Technique::DIS}) {
        std::string program = name;
    CAPTURE(program);
        CrossCheckSolver s(make_solver("cmd:" + ext), make_solver("internal"));
        EngineOptions o;
        o.domain = d;
        auto r = analyze(sf, t, o, s);
        check_inductive(r, s);
        CHECK(s.disagreements() == 0);
        total += s.agreements();
      }
  }
  CHECK(total > 100);
}
