// Command-line front end: `run` analyzes one function with one technique,
// `compare` classifies the invariants of several techniques pairwise.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pagai/engine.hpp"

using namespace pagai;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, config_error = 1, solver_failure = 2, not_inductive = 3 };

struct ConfigError : error {
  using error::error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string role(const Cfg& cfg, const PrSelection& sel, NodeId p) {
  std::vector<std::string> parts;
  if (p == cfg.entry) parts.push_back("entry");
  if (cfg.exit && p == *cfg.exit) parts.push_back("exit");
  if (sel.is_pw[p]) parts.push_back("loop head");
  std::string s;
  for (const auto& x : parts) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string render_point(const AnalysisResult& r, NodeId p) {
  auto ds = r.disjuncts(p);
  if (ds.size() == 1) return ds[0].render();
  std::string s;
  for (const auto& d : ds) s += (s.empty() ? "" : " || ") + ("(" + d.render() + ")");
  return s;
}

struct RunConfig {
  std::string input;
  std::string function;
  std::string technique = "PF";
  std::string domain = "intervals";
  std::string solver;
  int max_disjuncts = 2;
  int widening_delay = 1;
  int narrowing = 2;
  std::string format = "text";
  std::string dump_cfg, dump_pathset, events;
  bool no_dis_narrowing = false;
};

EngineOptions engine_options(const RunConfig& c) {
  if (c.max_disjuncts < 1) throw ConfigError("--max-disjuncts must be at least 1");
  if (c.widening_delay < 0) throw ConfigError("--widening-delay must be non-negative");
  if (c.narrowing < 0) throw ConfigError("--narrowing must be non-negative");
  EngineOptions o;
  o.domain = parse_domain(c.domain);
  o.max_disjuncts = c.max_disjuncts;
  o.widening_delay = c.widening_delay;
  o.narrowing_rounds = c.narrowing;
  o.dis_narrowing = !c.no_dis_narrowing;
  return o;
}

std::unique_ptr<Solver> solver_for(const std::string& spec) {
  try {
    return make_solver(spec);
  } catch (const SolverError&) {
    throw;
  } catch (const error& e) {
    throw ConfigError(e.what());
  }
}

json stats_json(const Stats& s) {
  json j{{"queries", s.queries}, {"paths_added", s.paths_added}, {"widenings", s.widenings},
         {"narrowing_rounds", s.narrowing_rounds}};
  j["seconds"] = s.seconds;
  return j;
}

int cmd_run(const RunConfig& c) {
  EngineOptions opts = engine_options(c);
  Technique t = parse_technique(c.technique);
  std::string spec = c.solver.empty() ? default_solver_spec() : c.solver;
  auto sf = prepare_source(read_file(c.input), c.function);
  if (!c.dump_cfg.empty()) write_file(c.dump_cfg, dump_cfg_json(sf->cfg()) + "\n");

  auto solver = solver_for(spec);
  AnalysisResult r = analyze(sf, t, opts, *solver);
  auto checker = solver_for(spec);
  InductiveReport ind = check_inductive(r, *checker);

  if (!c.events.empty()) {
    std::ofstream out(c.events);
    if (!out) throw ConfigError("cannot write '" + c.events + "'");
    r.events.write_jsonl(out);
  }
  if (!c.dump_pathset.empty()) {
    PathSet P(std::make_shared<Bdd>(sf->pred_order.size()), sf->pred_order);
    for (const auto& p : r.paths) P = P.add_minterm(sf->path_minterm(p));
    write_file(c.dump_pathset, P.dot());
  }

  const Cfg& cfg = sf->cfg();
  if (c.format == "json") {
    json j;
    j["function"] = cfg.name;
    j["technique"] = to_string(t);
    j["domain"] = to_string(opts.domain);
    j["solver"] = solver->name();
    j["points"] = json::array();
    for (NodeId p : sf->sel.pr) {
      json pt;
      pt["id"] = p;
      pt["role"] = role(cfg, sf->sel, p);
      pt["invariant"] = render_point(r, p);
      pt["disjuncts"] = json::array();
      for (const auto& d : r.disjuncts(p)) {
        json cs = json::array();
        for (const auto& k : d.to_constraints()) cs.push_back(render(k, cfg.vars));
        pt["disjuncts"].push_back({{"bottom", d.is_bottom()}, {"constraints", cs}});
      }
      j["points"].push_back(pt);
    }
    j["stats"] = stats_json(r.stats);
    j["syntactic_paths"] = sf->syntactic_path_count();
    j["inductive"] = ind.ok;
    j["violations"] = ind.violations;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "function " << cfg.name << ": technique " << to_string(t) << ", domain " << to_string(opts.domain)
              << "\n";
    for (NodeId p : sf->sel.pr) {
      std::string rl = role(cfg, sf->sel, p);
      std::cout << "p" << p << (rl.empty() ? "" : " (" + rl + ")") << ": " << render_point(r, p) << "\n";
    }
    std::cout << "queries " << r.stats.queries << ", paths " << r.stats.paths_added << " of "
              << sf->syntactic_path_count() << ", widenings " << r.stats.widenings << ", narrowing rounds "
              << r.stats.narrowing_rounds << "\n";
    std::cout << "inductive: " << (ind.ok ? "yes" : "NO") << "\n";
    for (const auto& v : ind.violations) std::cout << "  violation " << v << "\n";
  }
  return ind.ok ? ok : not_inductive;
}

struct CompareConfig {
  std::vector<std::string> inputs;
  std::string techniques = "S,G,PF,G+PF,DIS";
  std::string domain = "intervals";
  std::string solver;
  int max_disjuncts = 2;
  int widening_delay = 1;
  int narrowing = 2;
  std::string csv;
  std::string format = "text";
  bool parallel = false;
};

std::vector<Technique> parse_list(const std::string& s) {
  std::vector<Technique> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_technique(item));
  return out;
}

int cmd_compare(const CompareConfig& c) {
  RunConfig rc;
  rc.domain = c.domain;
  rc.max_disjuncts = c.max_disjuncts;
  rc.widening_delay = c.widening_delay;
  rc.narrowing = c.narrowing;
  EngineOptions opts = engine_options(rc);
  std::vector<Technique> techs;
  for (Technique t : parse_list(c.techniques))
    if (std::find(techs.begin(), techs.end(), t) == techs.end()) techs.push_back(t);
  if (techs.empty()) throw ConfigError("no technique selected");
  std::string spec = c.solver.empty() ? default_solver_spec() : c.solver;

  const std::pair<Technique, Technique> layout[] = {
      {Technique::G, Technique::S},     {Technique::PF, Technique::S},   {Technique::PF, Technique::G},
      {Technique::GPF, Technique::PF},  {Technique::GPF, Technique::G},  {Technique::GPF, Technique::S},
      {Technique::DIS, Technique::GPF}};
  auto has = [&](Technique t) { return std::find(techs.begin(), techs.end(), t) != techs.end(); };
  std::vector<std::pair<Technique, Technique>> pairs;
  for (const auto& pr : layout)
    if (has(pr.first) && has(pr.second)) pairs.push_back(pr);
  if (techs.size() == 1) pairs.push_back({techs[0], techs[0]});

  std::vector<std::shared_ptr<const SemanticsFormula>> sfs;
  for (const auto& in : c.inputs) sfs.push_back(prepare_source(read_file(in)));

  // results[file][technique index]
  std::vector<std::vector<std::optional<AnalysisResult>>> results(sfs.size(),
                                                                  std::vector<std::optional<AnalysisResult>>(techs.size()));
  auto job = [&](size_t f, size_t t) {
    auto solver = solver_for(spec);
    results[f][t] = analyze(sfs[f], techs[t], opts, *solver);
  };
  if (c.parallel) {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(sfs.size() * techs.size());
    for (size_t f = 0; f < sfs.size(); ++f)
      for (size_t t = 0; t < techs.size(); ++t)
        threads.emplace_back([&, f, t] {
          try {
            job(f, t);
          } catch (...) {
            errors[f * techs.size() + t] = std::current_exception();
          }
        });
    for (auto& th : threads) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (size_t f = 0; f < sfs.size(); ++f)
      for (size_t t = 0; t < techs.size(); ++t) job(f, t);
  }

  auto index = [&](Technique t) { return static_cast<size_t>(std::find(techs.begin(), techs.end(), t) - techs.begin()); };
  auto solver = solver_for(spec);
  json report;
  report["domain"] = to_string(opts.domain);
  report["pairs"] = json::array();
  for (const auto& [a, b] : pairs) {
    int n[4] = {0, 0, 0, 0};
    json files = json::array();
    for (size_t f = 0; f < sfs.size(); ++f) {
      Comparison cmp = compare_invariants(*results[f][index(a)], *results[f][index(b)], *solver);
      json pts = json::array();
      for (const auto& [p, v] : cmp.points) {
        ++n[static_cast<int>(v)];
        pts.push_back({{"point", p}, {"verdict", to_string(v)}});
      }
      files.push_back({{"input", c.inputs[f]}, {"points", pts}});
    }
    int total = n[0] + n[1] + n[2] + n[3];
    auto pct = [&](int k) { return total ? 100.0 * n[k] / total : 0.0; };
    double eq = total ? 100.0 - pct(0) - pct(1) - pct(2) : 100.0;
    report["pairs"].push_back({{"pair", to_string(a) + "/" + to_string(b)},
                               {"points", total},
                               {"stronger", pct(0)},
                               {"weaker", pct(1)},
                               {"incomparable", pct(2)},
                               {"equal", eq},
                               {"files", files}});
  }
  report["runs"] = json::array();
  for (size_t f = 0; f < sfs.size(); ++f)
    for (size_t t = 0; t < techs.size(); ++t)
      report["runs"].push_back(
          {{"input", c.inputs[f]}, {"technique", to_string(techs[t])}, {"stats", stats_json(results[f][t]->stats)}});

  if (!c.csv.empty()) {
    std::ostringstream out;
    out << "pair,points,stronger,weaker,incomparable,equal\n" << std::fixed << std::setprecision(2);
    for (const auto& p : report["pairs"])
      out << p["pair"].get<std::string>() << "," << p["points"].get<int>() << "," << p["stronger"].get<double>() << ","
          << p["weaker"].get<double>() << "," << p["incomparable"].get<double>() << "," << p["equal"].get<double>()
          << "\n";
    write_file(c.csv, out.str());
  }
  if (c.format == "json") {
    std::cout << report.dump(2) << "\n";
    return ok;
  }
  std::cout << std::left << std::setw(10) << "pair" << std::right << std::setw(8) << "points" << std::setw(11)
            << "stronger" << std::setw(10) << "weaker" << std::setw(14) << "incomparable" << std::setw(9) << "equal"
            << "\n"
            << std::fixed << std::setprecision(1);
  for (const auto& p : report["pairs"])
    std::cout << std::left << std::setw(10) << p["pair"].get<std::string>() << std::right << std::setw(8)
              << p["points"].get<int>() << std::setw(10) << p["stronger"].get<double>() << "%" << std::setw(9)
              << p["weaker"].get<double>() << "%" << std::setw(13) << p["incomparable"].get<double>() << "%"
              << std::setw(8) << p["equal"].get<double>() << "%\n";
  std::cout << "\n";
  for (const auto& run : report["runs"])
    std::cout << run["input"].get<std::string>() << " " << run["technique"].get<std::string>() << ": queries "
              << run["stats"]["queries"] << ", paths " << run["stats"]["paths_added"] << ", "
              << std::setprecision(3) << run["stats"]["seconds"].get<double>() << " s\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant generation by guided path focusing over intervals and octagons"};
  app.require_subcommand(1);

  RunConfig rc;
  auto* run = app.add_subcommand("run", "analyze one function");
  run->add_option("input", rc.input, "program file")->required();
  run->add_option("--function", rc.function, "function to analyze (default: the first)");
  run->add_option("--technique", rc.technique, "S, G, PF, G+PF or DIS")->capture_default_str();
  run->add_option("--domain", rc.domain, "intervals or octagons")->capture_default_str();
  run->add_option("--solver", rc.solver, "internal, cmd:<command>, cmd1:<command> or crosscheck:<spec>");
  std::string solver_cmd;
  run->add_option("--solver-cmd", solver_cmd, "SMT-LIB2 solver command line, same as --solver cmd:<command>");
  run->add_option("--max-disjuncts", rc.max_disjuncts, "disjuncts per point for DIS")->capture_default_str();
  run->add_option("--widening-delay", rc.widening_delay, "joins before widening")->capture_default_str();
  run->add_option("--narrowing", rc.narrowing, "narrowing rounds")->capture_default_str();
  run->add_option("--format", rc.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  run->add_option("--dump-cfg", rc.dump_cfg, "write the CFG as JSON to this file");
  run->add_option("--dump-pathset", rc.dump_pathset, "write the path set BDD as DOT to this file");
  run->add_option("--events", rc.events, "write the event log as JSONL to this file");
  run->add_flag("--no-dis-narrowing", rc.no_dis_narrowing, "skip decreasing iterations in DIS");

  CompareConfig cc;
  auto* compare = app.add_subcommand("compare", "compare the invariants of several techniques");
  compare->add_option("inputs", cc.inputs, "program files")->required();
  compare->add_option("--techniques", cc.techniques, "comma-separated techniques")->capture_default_str();
  compare->add_option("--domain", cc.domain, "intervals or octagons")->capture_default_str();
  compare->add_option("--solver", cc.solver, "solver spec, as for run");
  compare->add_option("--max-disjuncts", cc.max_disjuncts, "disjuncts per point for DIS")->capture_default_str();
  compare->add_option("--widening-delay", cc.widening_delay, "joins before widening")->capture_default_str();
  compare->add_option("--narrowing", cc.narrowing, "narrowing rounds")->capture_default_str();
  compare->add_option("--csv", cc.csv, "also write the aggregate table as CSV to this file");
  compare->add_option("--format", cc.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  compare->add_flag("--parallel", cc.parallel, "one thread per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  if (!solver_cmd.empty()) {
    if (!rc.solver.empty()) {
      std::cerr << "error: --solver and --solver-cmd are exclusive\n";
      return config_error;
    }
    rc.solver = "cmd:" + solver_cmd;
  }

  try {
    return run->parsed() ? cmd_run(rc) : cmd_compare(cc);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return config_error;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return solver_failure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  }
}
