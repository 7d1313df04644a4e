#include <algorithm>

#include "pagai/fm.hpp"
#include "pagai/smt.hpp"

namespace pagai {

namespace {

Atom negate_atom(Atom a) {
  a.op = negate(a.op);
  return a;
}

Formula simplify(const Formula& f, const std::map<std::string, bool>& assign) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Atom: return f;
    case FKind::Bool: {
      auto it = assign.find(f->name);
      if (it == assign.end()) return f;
      return it->second ? f_true() : f_false();
    }
    case FKind::Not: return f_not(simplify(f->kids[0], assign));
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> kids;
      bool same = true;
      for (const auto& k : f->kids) {
        Formula s = simplify(k, assign);
        if (s != k) same = false;
        if (f->kind == FKind::And && s->kind == FKind::False) return f_false();
        if (f->kind == FKind::Or && s->kind == FKind::True) return f_true();
        kids.push_back(std::move(s));
      }
      if (same) return f;
      return f->kind == FKind::And ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    case FKind::Implies: return f_implies(simplify(f->kids[0], assign), simplify(f->kids[1], assign));
    case FKind::Iff: return f_iff(simplify(f->kids[0], assign), simplify(f->kids[1], assign));
    case FKind::Rho: throw error("internal solver: rho must be a top-level conjunct");
  }
  return f;
}

class Tableau {
public:
  struct Outcome {
    bool sat = false;
    std::map<std::string, bool> bools;
    std::map<std::string, Integer> ints;
  };

  Outcome run(std::vector<Formula> pending, std::map<std::string, bool> assign, std::vector<Atom> atoms) {
    if (!propagate(pending, assign, atoms)) return {};
    std::map<std::string, int> index;
    std::vector<LinCons> cs = to_lincons(atoms, index);
    std::vector<LinCons> relaxed;
    for (const auto& c : cs)
      if (c.op != CmpOp::Ne) relaxed.push_back(c);
    if (!fm_feasible(relaxed)) return {};
    if (pending.empty()) {
      IntResult r = int_solve(cs, index.size());
      if (r.verdict == IntVerdict::Unsat) return {};
      Outcome o;
      o.sat = true;
      o.bools = std::move(assign);
      if (r.verdict == IntVerdict::Sat)
        for (const auto& [name, i] : index) o.ints[name] = r.point[i];
      return o;
    }
    auto pick = std::min_element(pending.begin(), pending.end(), [](const Formula& a, const Formula& b) {
      return formula_size(a) < formula_size(b);
    });
    Formula f = *pick;
    pending.erase(pick);
    std::vector<std::vector<Formula>> branches;
    switch (f->kind) {
      case FKind::Or:
        for (const auto& k : f->kids) branches.push_back({k});
        break;
      case FKind::Iff:
        branches.push_back({f->kids[0], f->kids[1]});
        branches.push_back({f_not(f->kids[0]), f_not(f->kids[1])});
        break;
      case FKind::Implies:
        branches.push_back({f_not(f->kids[0])});
        branches.push_back({f->kids[1]});
        break;
      default: throw error("internal solver: unexpected formula in case split");
    }
    for (auto& extra : branches) {
      auto next = pending;
      next.insert(next.end(), extra.begin(), extra.end());
      Outcome o = run(std::move(next), assign, atoms);
      if (o.sat) return o;
    }
    return {};
  }

private:
  static std::vector<LinCons> to_lincons(const std::vector<Atom>& atoms, std::map<std::string, int>& index) {
    std::vector<LinCons> out;
    for (const auto& a : atoms) {
      LinCons c;
      c.op = a.op;
      c.expr.constant = a.constant;
      for (const auto& [name, k] : a.terms) {
        auto it = index.find(name);
        int id = it == index.end() ? index.emplace(name, static_cast<int>(index.size())).first->second : it->second;
        c.expr.add_term(id, k);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  // Unit propagation; false on a conflict. Leaves only Or/Iff/Implies pending.
  static bool propagate(std::vector<Formula>& pending, std::map<std::string, bool>& assign, std::vector<Atom>& atoms) {
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<Formula> work = std::move(pending);
      pending.clear();
      while (!work.empty()) {
        Formula f = simplify(work.back(), assign);
        work.pop_back();
        switch (f->kind) {
          case FKind::True: break;
          case FKind::False: return false;
          case FKind::Bool:
            assign[f->name] = true;
            changed = true;
            break;
          case FKind::Atom: atoms.push_back(f->atom); break;
          case FKind::And:
            for (const auto& k : f->kids) work.push_back(k);
            break;
          case FKind::Not: {
            const Formula& g = f->kids[0];
            switch (g->kind) {
              case FKind::Bool:
                assign[g->name] = false;
                changed = true;
                break;
              case FKind::Atom: atoms.push_back(negate_atom(g->atom)); break;
              case FKind::And: {
                std::vector<Formula> ns;
                for (const auto& k : g->kids) ns.push_back(f_not(k));
                pending.push_back(f_or(std::move(ns)));
                break;
              }
              case FKind::Or:
                for (const auto& k : g->kids) work.push_back(f_not(k));
                break;
              case FKind::Implies:
                work.push_back(g->kids[0]);
                work.push_back(f_not(g->kids[1]));
                break;
              case FKind::Iff: pending.push_back(f_iff(g->kids[0], f_not(g->kids[1]))); break;
              default: throw error("internal solver: unexpected negated formula");
            }
            break;
          }
          default: pending.push_back(f);
        }
      }
    }
    return true;
  }
};

}  // namespace

SolveResult InternalSolver::solve(const Formula& f) {
  ++queries_;
  std::vector<Formula> conjuncts = f->kind == FKind::And ? f->kids : std::vector<Formula>{f};
  std::shared_ptr<const SemanticsFormula> sf;
  std::vector<Formula> rest;
  for (const auto& c : conjuncts) {
    if (c->kind == FKind::Rho) {
      if (sf && sf != c->rho) throw error("internal solver: two different rho formulas in one query");
      sf = c->rho;
    } else {
      rest.push_back(c);
    }
  }
  Tableau tab;
  SolveResult res;
  if (!sf) {
    auto o = tab.run(rest, {}, {});
    res.sat = o.sat;
    res.model.bools = std::move(o.bools);
    res.model.ints = std::move(o.ints);
    return res;
  }

  std::vector<NodeId> sources;
  std::optional<NodeId> dst;
  for (const auto& c : rest) {
    if (c->kind != FKind::Bool) continue;
    for (NodeId p : sf->sel.pr) {
      if (c->name == sf->src_pred[p]) sources.push_back(p);
      if (c->name == sf->dst_pred[p]) dst = p;
    }
  }
  if (sources.empty()) sources = sf->sel.pr;
  for (NodeId i : sources) {
    // Shortest first; among equal lengths the last in DFS order first, which
    // prefers fall-through (else and loop-exit) edges.
    const auto& all = sf->paths.at(i);
    std::vector<const Path*> order;
    for (auto it = all.rbegin(); it != all.rend(); ++it) order.push_back(&*it);
    std::stable_sort(order.begin(), order.end(),
                     [](const Path* a, const Path* b) { return a->edges.size() < b->edges.size(); });
    for (const Path* pp : order) {
      const Path& p = *pp;
      if (dst && p.dst != *dst) continue;
      auto o = tab.run(rest, sf->path_booleans(p), sf->path_atoms(p));
      if (!o.sat) continue;
      res.sat = true;
      res.model.bools = std::move(o.bools);
      res.model.ints = std::move(o.ints);
      return res;
    }
  }
  return res;
}

}  // namespace pagai
