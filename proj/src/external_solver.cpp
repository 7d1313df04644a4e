#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

#include "pagai/smt.hpp"

namespace pagai {

struct ExternalSolver::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;
  std::set<std::string> declared;  // base-level symbols
};

namespace {

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

// Replaces top-level rho conjuncts by true (rho is asserted at base level).
Formula strip_rho(const Formula& f, const SemanticsFormula* sf) {
  if (f->kind == FKind::Rho && f->rho.get() == sf) return f_true();
  if (f->kind != FKind::And) return f;
  std::vector<Formula> kids;
  for (const auto& k : f->kids) kids.push_back(strip_rho(k, sf));
  return f_and(std::move(kids));
}

const SemanticsFormula* find_rho(const Formula& f, std::shared_ptr<const SemanticsFormula>* owner) {
  if (f->kind == FKind::Rho) {
    *owner = f->rho;
    return f->rho.get();
  }
  if (f->kind != FKind::And) return nullptr;
  for (const auto& k : f->kids)
    if (auto r = find_rho(k, owner)) return r;
  return nullptr;
}

std::string declarations(const std::set<std::string>& bools, const std::set<std::string>& ints,
                         std::set<std::string>* skip) {
  std::ostringstream os;
  for (const auto& b : bools)
    if (!skip || !skip->count(b)) os << "(declare-const " << b << " Bool)\n";
  for (const auto& i : ints)
    if (!skip || !skip->count(i)) os << "(declare-const " << i << " Int)\n";
  return os.str();
}

// Minimal s-expression reader for get-value replies.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

SExpr parse_sexpr(const std::string& s, size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos >= s.size()) throw SolverError("unexpected end of solver reply");
  SExpr e;
  if (s[pos] == '(') {
    e.is_list = true;
    ++pos;
    for (;;) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos >= s.size()) throw SolverError("unbalanced solver reply");
      if (s[pos] == ')') {
        ++pos;
        return e;
      }
      e.list.push_back(parse_sexpr(s, pos));
    }
  }
  size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' && s[pos] != ')') ++pos;
  e.atom = s.substr(start, pos - start);
  return e;
}

Integer sexpr_int(const SExpr& e) {
  if (!e.is_list) return std::stoll(e.atom);
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") return -sexpr_int(e.list[1]);
  throw SolverError("unexpected integer value in solver reply");
}

}  // namespace

ExternalSolver::ExternalSolver(std::string command, bool process_per_query, std::chrono::milliseconds timeout)
    : command_(std::move(command)), per_query_(process_per_query), timeout_(timeout) {
  if (split_words(command_).empty()) throw error("empty solver command");
}

ExternalSolver::~ExternalSolver() { stop(); }

void ExternalSolver::start() {
  stop();
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw SolverError("cannot create pipes for the solver");
  auto words = split_words(command_);
  pid_t pid = fork();
  if (pid < 0) throw SolverError("cannot fork the solver process");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> argv;
    for (auto& w : words) argv.push_back(w.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  proc_ = std::make_unique<Process>();
  proc_->pid = pid;
  proc_->to_child = in_pipe[1];
  proc_->from_child = out_pipe[0];
  signal(SIGPIPE, SIG_IGN);
  send("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_LIA)\n");
  asserted_rho_ = nullptr;
  rho_owner_.reset();
}

void ExternalSolver::stop() {
  if (!proc_) return;
  if (proc_->to_child >= 0) {
    std::string bye = "(exit)\n";
    [[maybe_unused]] auto n = write(proc_->to_child, bye.data(), bye.size());
    close(proc_->to_child);
  }
  if (proc_->from_child >= 0) close(proc_->from_child);
  if (proc_->pid > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 50 && !reaped; ++i) {
      if (waitpid(proc_->pid, &status, WNOHANG) == proc_->pid)
        reaped = true;
      else
        usleep(2000);
    }
    if (!reaped) {
      kill(proc_->pid, SIGKILL);
      waitpid(proc_->pid, &status, 0);
    }
  }
  proc_.reset();
  asserted_rho_ = nullptr;
  rho_owner_.reset();
}

void ExternalSolver::send(const std::string& s) {
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = write(proc_->to_child, s.data() + off, s.size() - off);
    if (n <= 0) {
      stop();
      throw SolverError("solver process closed its input");
    }
    off += static_cast<size_t>(n);
  }
}

std::string ExternalSolver::read_response() {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  std::string& buf = proc_->buffer;
  for (;;) {
    // A complete reply is an atom followed by whitespace or a balanced list.
    size_t pos = 0;
    while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
    if (pos < buf.size()) {
      if (buf[pos] == '(') {
        int depth = 0;
        bool in_string = false;
        for (size_t i = pos; i < buf.size(); ++i) {
          char c = buf[i];
          if (c == '"') in_string = !in_string;
          if (in_string) continue;
          if (c == '(') ++depth;
          if (c == ')' && --depth == 0) {
            std::string out = buf.substr(pos, i + 1 - pos);
            buf.erase(0, i + 1);
            return out;
          }
        }
      } else {
        size_t end = pos;
        while (end < buf.size() && !std::isspace(static_cast<unsigned char>(buf[end]))) ++end;
        if (end < buf.size()) {
          std::string out = buf.substr(pos, end - pos);
          buf.erase(0, end);
          return out;
        }
      }
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      stop();
      throw SolverError("solver timed out");
    }
    pollfd pfd{proc_->from_child, POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) {
      stop();
      throw SolverError("solver timed out");
    }
    char chunk[4096];
    ssize_t n = read(proc_->from_child, chunk, sizeof chunk);
    if (n <= 0) {
      stop();
      throw SolverError("solver process exited unexpectedly");
    }
    buf.append(chunk, static_cast<size_t>(n));
  }
}

SolveResult ExternalSolver::solve(const Formula& f) {
  ++queries_;
  std::shared_ptr<const SemanticsFormula> owner;
  const SemanticsFormula* sf = find_rho(f, &owner);
  if (!proc_ || per_query_) start();
  if (sf && sf != asserted_rho_) {
    if (asserted_rho_) start();
    std::set<std::string> bools, ints;
    collect_symbols(sf->rho, bools, ints);
    send(declarations(bools, ints, nullptr));
    send("(assert " + to_smtlib(sf->rho) + ")\n");
    proc_->declared.insert(bools.begin(), bools.end());
    proc_->declared.insert(ints.begin(), ints.end());
    asserted_rho_ = sf;
    rho_owner_ = owner;
  }
  Formula q = sf ? strip_rho(f, sf) : f;
  std::set<std::string> bools, ints;
  collect_symbols(q, bools, ints);
  std::ostringstream os;
  os << "(push 1)\n" << declarations(bools, ints, &proc_->declared);
  os << "(assert " << to_smtlib(q) << ")\n(check-sat)\n";
  send(os.str());
  std::string verdict = read_response();
  SolveResult res;
  if (verdict == "unsat") {
    res.sat = false;
  } else if (verdict == "sat") {
    res.sat = true;
    std::set<std::string> all_bools = bools, all_ints = ints;
    if (sf) collect_symbols(sf->rho, all_bools, all_ints);
    std::vector<std::string> syms(all_bools.begin(), all_bools.end());
    syms.insert(syms.end(), all_ints.begin(), all_ints.end());
    if (!syms.empty()) {
      std::string req = "(get-value (";
      for (const auto& s : syms) req += s + " ";
      req += "))\n";
      send(req);
      std::string reply = read_response();
      size_t pos = 0;
      SExpr e = parse_sexpr(reply, pos);
      if (!e.is_list) throw SolverError("unexpected get-value reply: " + reply);
      for (const auto& pair : e.list) {
        if (!pair.is_list || pair.list.size() != 2 || pair.list[0].is_list)
          throw SolverError("unexpected get-value entry in: " + reply);
        const std::string& name = pair.list[0].atom;
        const SExpr& val = pair.list[1];
        if (all_bools.count(name))
          res.model.bools[name] = !val.is_list && val.atom == "true";
        else
          res.model.ints[name] = sexpr_int(val);
      }
    }
  } else {
    std::string msg = "solver answered '" + verdict + "'";
    stop();
    throw SolverError(msg);
  }
  if (per_query_)
    stop();
  else
    send("(pop 1)\n");
  return res;
}

CrossCheckSolver::CrossCheckSolver(std::unique_ptr<Solver> primary, std::unique_ptr<Solver> secondary)
    : primary_(std::move(primary)), secondary_(std::move(secondary)) {}

SolveResult CrossCheckSolver::solve(const Formula& f) {
  ++queries_;
  SolveResult a = primary_->solve(f);
  SolveResult b = secondary_->solve(f);
  if (a.sat == b.sat)
    ++agreements_;
  else
    ++disagreements_;
  return a;
}

std::unique_ptr<Solver> make_solver(const std::string& spec) {
  if (spec == "internal") return std::make_unique<InternalSolver>();
  if (spec.rfind("cmd:", 0) == 0) return std::make_unique<ExternalSolver>(spec.substr(4));
  if (spec.rfind("cmd1:", 0) == 0) return std::make_unique<ExternalSolver>(spec.substr(5), true);
  if (spec.rfind("crosscheck:", 0) == 0)
    return std::make_unique<CrossCheckSolver>(std::make_unique<InternalSolver>(), make_solver(spec.substr(11)));
  throw error("unknown solver '" + spec + "' (expected internal or cmd:<command>)");
}

std::string default_solver_spec() {
  const char* env = std::getenv("PAGAI_LITE_SOLVER");
  if (env && *env) return env;
  return "internal";
}

std::string find_external_solver() {
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::vector<std::pair<std::string, std::string>> known = {
      {"z3", "z3 -in -smt2"}, {"cvc5", "cvc5 --lang smt2 --incremental"}, {"yices-smt2", "yices-smt2 --incremental"}};
  for (const auto& [exe, cmd] : known) {
    std::istringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      std::string full = (dir.empty() ? "." : dir) + "/" + exe;
      if (access(full.c_str(), X_OK) == 0) return cmd;
    }
  }
  return {};
}

}  // namespace pagai
