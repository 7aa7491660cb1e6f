#pragma once

// Endofunctors on the per category, given as expressions:
//
//   id | (const A) | (prod F G) | (exp A F)
//
// (exp A F) is the constant-domain exponential A => F(-), which keeps every
// expression covariant.  Each expression synthesizes a single code phi whose
// action on trackers realizes the functor: if x tracks R -> S then phi.x
// tracks F R -> F S and agrees with the structural action of F.
//
// Functor images routinely fall outside any finite universe (a rebuilt pair,
// a composite), so the checkers compare values against semantic views of the
// target relation rather than against stored carriers.  All answers are
// three-valued: running out of fuel is reported as Undecided, never as No.

#include "bracket.hpp"
#include "category.hpp"
#include "core.hpp"
#include "eval.hpp"
#include "per.hpp"
#include "report.hpp"
#include "universe.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace perlab {

struct FunctorExpr;
using FunctorPtr = std::shared_ptr<const FunctorExpr>;

struct FunctorExpr {
  enum class Kind { Id, Const, Prod, ExpFrom };
  Kind kind = Kind::Id;
  Per constant;      // Const: the fixed value
  Per domain;        // ExpFrom: the fixed source
  FunctorPtr left;   // Prod: first factor; ExpFrom: body
  FunctorPtr right;  // Prod: second factor
};

inline FunctorPtr fid() {
  static const FunctorPtr cached = std::make_shared<FunctorExpr>();
  return cached;
}

inline FunctorPtr fconst(Per a) {
  auto e = std::make_shared<FunctorExpr>();
  e->kind = FunctorExpr::Kind::Const;
  e->constant = std::move(a);
  return e;
}

inline FunctorPtr fprod(FunctorPtr f, FunctorPtr g) {
  if (!f || !g) throw ContractError("prod needs two factors");
  auto e = std::make_shared<FunctorExpr>();
  e->kind = FunctorExpr::Kind::Prod;
  e->left = std::move(f);
  e->right = std::move(g);
  return e;
}

inline FunctorPtr fexp(Per a, FunctorPtr f) {
  if (!f) throw ContractError("exp needs a body");
  auto e = std::make_shared<FunctorExpr>();
  e->kind = FunctorExpr::Kind::ExpFrom;
  e->domain = std::move(a);
  e->left = std::move(f);
  return e;
}

inline std::string show_functor(const FunctorPtr& e) {
  switch (e->kind) {
    case FunctorExpr::Kind::Id:
      return "id";
    case FunctorExpr::Kind::Const:
      return "(const " + show_per(e->constant) + ")";
    case FunctorExpr::Kind::Prod:
      return "(prod " + show_functor(e->left) + " " + show_functor(e->right) +
             ")";
    case FunctorExpr::Kind::ExpFrom:
      return "(exp " + show_per(e->domain) + " " + show_functor(e->left) + ")";
  }
  return "?";
}

// Object part.  Fuel-exclusions arising inside exponentials are appended to
// *excluded when the caller wants them surfaced.
inline Per eval_object(const FunctorPtr& e, const Per& r,
                       const BudgetPtr& budget,
                       std::vector<std::string>* excluded = nullptr) {
  switch (e->kind) {
    case FunctorExpr::Kind::Id:
      return r;
    case FunctorExpr::Kind::Const:
      return e->constant;
    case FunctorExpr::Kind::Prod:
      return product(eval_object(e->left, r, budget, excluded),
                     eval_object(e->right, r, budget, excluded), budget);
    case FunctorExpr::Kind::ExpFrom: {
      Per body = eval_object(e->left, r, budget, excluded);
      ExpResult ex = exponential(e->domain, body, budget);
      if (excluded)
        for (const Code& c : ex.excluded_by_fuel)
          excluded->push_back(show_code(c) + " in " + show_functor(e));
      return ex.per;
    }
  }
  throw ContractError("unreachable functor kind");
}

// Morphism part, as one code acting on trackers.
//   id          |-> I
//   const A     |-> \x. I                (every morphism goes to the identity)
//   prod F G    |-> \x p. PAIR ((phiF x)(FST p)) ((phiG x)(SND p))
//   exp A F     |-> \x. B (phiF x)       (postcompose with the body's action)
inline Code synthesize_tracker(const FunctorPtr& e) {
  switch (e->kind) {
    case FunctorExpr::Kind::Id:
      return code_i();
    case FunctorExpr::Kind::Const:
      return lambda_code({"x"}, olift(code_i()));
    case FunctorExpr::Kind::Prod: {
      Code pf = synthesize_tracker(e->left);
      Code pg = synthesize_tracker(e->right);
      return lambda_code(
          {"x", "p"},
          oapp(olift(code_pair()),
               oapp(oapp(olift(pf), ovar("x")),
                    oapp(olift(code_fst()), ovar("p"))),
               oapp(oapp(olift(pg), ovar("x")),
                    oapp(olift(code_snd()), ovar("p")))));
    }
    case FunctorExpr::Kind::ExpFrom: {
      Code pf = synthesize_tracker(e->left);
      return lambda_code({"x"},
                         oapp(olift(code_b()), oapp(olift(pf), ovar("x"))));
    }
  }
  throw ContractError("unreachable functor kind");
}

struct RealizableFunctor {
  FunctorPtr expr;
  Code phi;

  Per object(const Per& r, const BudgetPtr& budget) const {
    return eval_object(expr, r, budget);
  }
};

inline RealizableFunctor make_functor(const FunctorPtr& e) {
  return RealizableFunctor{e, synthesize_tracker(e)};
}

// The semantic relation of F applied to a base per: grounded in stored
// blocks at the leaves, componentwise at products, pointwise over the fixed
// domain at exponentials.  Defined for arbitrary codes, not just universe
// members, which is what makes functor images comparable at all.
inline SemView functor_view(const FunctorPtr& e, const Per& base,
                            const BudgetPtr& budget) {
  switch (e->kind) {
    case FunctorExpr::Kind::Id:
      return sem_view_of(base);
    case FunctorExpr::Kind::Const:
      return sem_view_of(e->constant);
    case FunctorExpr::Kind::Prod: {
      SemView fv = functor_view(e->left, base, budget);
      SemView gv = functor_view(e->right, base, budget);
      Fuel fuel = budget->fuel;
      auto rel = [fv, gv, fuel](const Code& p, const Code& q) -> Verdict {
        Outcome pa = apply(code_fst(), p, fuel);
        Outcome pb = apply(code_snd(), p, fuel);
        Outcome qa = apply(code_fst(), q, fuel);
        Outcome qb = apply(code_snd(), q, fuel);
        if (!pa.converged() || !pb.converged() || !qa.converged() ||
            !qb.converged())
          return Verdict::Undecided;
        return meet(fv.related(*pa.value, *qa.value),
                    gv.related(*pb.value, *qb.value));
      };
      return SemView{[rel](const Code& c) { return rel(c, c); }, rel};
    }
    case FunctorExpr::Kind::ExpFrom: {
      SemView fv = functor_view(e->left, base, budget);
      Per a = e->domain;
      Fuel fuel = budget->fuel;
      auto rel = [fv, a, fuel](const Code& h, const Code& k) -> Verdict {
        Verdict v = Verdict::Yes;
        for (const auto& blk : a.blocks)
          for (const Code& x : blk)
            for (const Code& y : blk) {
              Outcome hx = apply(h, x, fuel);
              Outcome ky = apply(k, y, fuel);
              if (!hx.converged() || !ky.converged()) {
                v = meet(v, Verdict::Undecided);
                continue;
              }
              v = meet(v, fv.related(*hx.value, *ky.value));
              if (v == Verdict::No) return v;
            }
        return v;
      };
      return SemView{[rel](const Code& c) { return rel(c, c); }, rel};
    }
  }
  throw ContractError("unreachable functor kind");
}

// Does the candidate image q equal the structural action of the morphism f
// on the element p, as an element of F(f.tgt)?  Recursion mirrors the
// expression: apply the tracker at id leaves, identity at const leaves,
// components at products, points of the fixed domain at exponentials.
inline Verdict action_agrees(const FunctorPtr& e, const Morphism& f,
                             const Code& p, const Code& q,
                             const BudgetPtr& budget) {
  Fuel fuel = budget->fuel;
  switch (e->kind) {
    case FunctorExpr::Kind::Id: {
      Outcome u = apply(f.tracker, p, fuel);
      if (!u.converged()) return Verdict::Undecided;
      return f.tgt.related(q, *u.value) ? Verdict::Yes : Verdict::No;
    }
    case FunctorExpr::Kind::Const:
      return e->constant.related(q, p) ? Verdict::Yes : Verdict::No;
    case FunctorExpr::Kind::Prod: {
      Outcome pa = apply(code_fst(), p, fuel);
      Outcome pb = apply(code_snd(), p, fuel);
      Outcome qa = apply(code_fst(), q, fuel);
      Outcome qb = apply(code_snd(), q, fuel);
      if (!pa.converged() || !pb.converged() || !qa.converged() ||
          !qb.converged())
        return Verdict::Undecided;
      Verdict v = action_agrees(e->left, f, *pa.value, *qa.value, budget);
      if (v == Verdict::No) return v;
      return meet(v, action_agrees(e->right, f, *pb.value, *qb.value, budget));
    }
    case FunctorExpr::Kind::ExpFrom: {
      Verdict v = Verdict::Yes;
      for (const Code& x : e->domain.dom()) {
        Outcome px = apply(p, x, fuel);
        Outcome qx = apply(q, x, fuel);
        if (!px.converged() || !qx.converged()) {
          v = meet(v, Verdict::Undecided);
          continue;
        }
        v = meet(v, action_agrees(e->left, f, *px.value, *qx.value, budget));
        if (v == Verdict::No) return v;
      }
      return v;
    }
  }
  throw ContractError("unreachable functor kind");
}

// The action equation for a uniform tracker t, over every enumerated hom of
// every ordered lattice pair: t.x converges, tracks F R -> F S, and agrees
// with the structural action.  t may be a code or a host-level function
// (the repaired tracker is one), which is why it is not tied to a
// RealizableFunctor here.
inline Report check_eq1(const FunctorPtr& e, const TrackerLike& t,
                        const std::vector<Per>& lattice,
                        const BudgetPtr& budget) {
  Report rep;
  for (const Per& r : lattice) {
    Per fr = eval_object(e, r, budget);
    for (const Per& s : lattice) {
      SemView fsv = functor_view(e, s, budget);
      CheckResult& item =
          rep.add("action " + show_per(r) + " -> " + show_per(s));
      Verdict v = Verdict::Yes;
      for (const Morphism& h : enumerate_homs(r, s, budget)) {
        Outcome vo = apply_tracker(t, h.tracker, budget->fuel);
        if (!vo.converged()) {
          v = meet(v, Verdict::Undecided);
          item.witness = "image of tracker " + show_code(h.tracker) +
                         " ran out of fuel";
          continue;
        }
        const Code& img = *vo.value;
        TrackReport tr = check_tracker_sem(fr, fsv, img, budget->fuel);
        item.checked += fr.dom_size();
        if (tr.verdict == Verdict::No) {
          item.verdict = Verdict::No;
          item.witness = "image of tracker " + show_code(h.tracker) +
                         " does not track at (" + show_code(tr.witness->first) +
                         ", " + show_code(tr.witness->second) + ")";
          return rep;
        }
        v = meet(v, tr.verdict);
        if (tr.verdict == Verdict::Undecided)
          item.witness = "tracking undecided for tracker " +
                         show_code(h.tracker) + " at " +
                         show_code(tr.undecided.front());
        for (const Code& p : fr.dom()) {
          Outcome po = apply(img, p, budget->fuel);
          if (!po.converged()) {
            v = meet(v, Verdict::Undecided);
            item.witness = "image at " + show_code(p) + " ran out of fuel";
            continue;
          }
          Verdict a = action_agrees(e, h, p, *po.value, budget);
          if (a == Verdict::No) {
            item.verdict = Verdict::No;
            item.witness = "tracker " + show_code(h.tracker) +
                           " acts wrongly at " + show_code(p);
            return rep;
          }
          if (a == Verdict::Undecided)
            item.witness = "action at " + show_code(p) + " undecided";
          v = meet(v, a);
        }
      }
      item.verdict = v;
    }
  }
  return rep;
}

// Realizability report: the action equation for phi, plus the functor laws.
// F(i) must act as the identity on each F R, and F(g . f) must act as
// F(g) . F(f), both extensionally under the lattice.
inline Report check_realizable(const RealizableFunctor& f,
                               const std::vector<Per>& lattice,
                               const BudgetPtr& budget) {
  Report rep = check_eq1(f.expr, f.phi, lattice, budget);
  if (rep.overall() == Verdict::No) return rep;

  std::vector<Per> objects;
  objects.reserve(lattice.size());
  for (const Per& r : lattice) objects.push_back(eval_object(f.expr, r, budget));

  for (std::size_t i = 0; i < lattice.size(); ++i) {
    CheckResult& item = rep.add("identity law on " + show_per(lattice[i]));
    SemView view = functor_view(f.expr, lattice[i], budget);
    Outcome vo = apply(f.phi, code_i(), budget->fuel);
    if (!vo.converged()) {
      item.verdict = Verdict::Undecided;
      item.witness = "phi.i ran out of fuel";
      continue;
    }
    Verdict v = Verdict::Yes;
    for (const Code& p : objects[i].dom()) {
      ++item.checked;
      Outcome po = apply(*vo.value, p, budget->fuel);
      if (!po.converged()) {
        v = meet(v, Verdict::Undecided);
        item.witness = "image at " + show_code(p) + " ran out of fuel";
        continue;
      }
      Verdict a = view.related(*po.value, p);
      if (a == Verdict::No) {
        v = Verdict::No;
        item.witness = "F(i) moves " + show_code(p);
        break;
      }
      v = meet(v, a);
    }
    item.verdict = v;
  }

  // Hom sets once per ordered pair; the composition sweep reuses them.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Morphism>> homs;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    for (std::size_t j = 0; j < lattice.size(); ++j)
      homs[{i, j}] = enumerate_homs(lattice[i], lattice[j], budget);

  for (std::size_t i = 0; i < lattice.size(); ++i)
    for (std::size_t j = 0; j < lattice.size(); ++j)
      for (std::size_t k = 0; k < lattice.size(); ++k) {
        CheckResult& item =
            rep.add("composition law " + show_per(lattice[i]) + " -> " +
                    show_per(lattice[j]) + " -> " + show_per(lattice[k]));
        SemView view = functor_view(f.expr, lattice[k], budget);
        Verdict v = Verdict::Yes;
        for (const Morphism& m1 : homs[{i, j}]) {
          Outcome v1 = apply(f.phi, m1.tracker, budget->fuel);
          for (const Morphism& m2 : homs[{j, k}]) {
            Outcome v2 = apply(f.phi, m2.tracker, budget->fuel);
            Outcome vc =
                apply(f.phi, comp(m2.tracker, m1.tracker), budget->fuel);
            if (!v1.converged() || !v2.converged() || !vc.converged()) {
              v = meet(v, Verdict::Undecided);
              item.witness = "a tracker image ran out of fuel";
              continue;
            }
            for (const Code& p : objects[i].dom()) {
              ++item.checked;
              Outcome lhs = apply(*vc.value, p, budget->fuel);
              Outcome mid = apply(*v1.value, p, budget->fuel);
              Outcome rhs = mid.converged()
                                ? apply(*v2.value, *mid.value, budget->fuel)
                                : Outcome{};
              if (!lhs.converged() || !rhs.converged()) {
                v = meet(v, Verdict::Undecided);
                item.witness = "image at " + show_code(p) + " ran out of fuel";
                continue;
              }
              Verdict a = view.related(*lhs.value, *rhs.value);
              if (a == Verdict::No) {
                v = Verdict::No;
                item.witness = "F(g.f) and F(g).F(f) disagree at " +
                               show_code(p) + " for trackers (" +
                               show_code(m2.tracker) + ", " +
                               show_code(m1.tracker) + ")";
                break;
              }
              v = meet(v, a);
            }
            if (v == Verdict::No) break;
          }
          if (v == Verdict::No) break;
        }
        item.verdict = v;
        if (v == Verdict::No) return rep;
      }
  return rep;
}

struct MonotoneReport {
  bool monotone = true;
  std::optional<std::pair<Per, Per>> witness;  // an inclusion F breaks
  std::uint64_t checked = 0;
};

// Probes any object map, functor-backed or not: every inclusion R <= S in
// the lattice must be preserved.
inline MonotoneReport check_monotone(
    const std::function<Per(const Per&)>& obj_map,
    const std::vector<Per>& lattice) {
  MonotoneReport rep;
  std::vector<Per> images;
  images.reserve(lattice.size());
  for (const Per& r : lattice) images.push_back(obj_map(r));
  for (std::size_t i = 0; i < lattice.size(); ++i)
    for (std::size_t j = 0; j < lattice.size(); ++j) {
      if (!subper(lattice[i], lattice[j])) continue;
      ++rep.checked;
      if (!subper(images[i], images[j])) {
        rep.monotone = false;
        rep.witness = {lattice[i], lattice[j]};
        return rep;
      }
    }
  return rep;
}

inline MonotoneReport check_monotone(const FunctorPtr& e,
                                     const std::vector<Per>& lattice,
                                     const BudgetPtr& budget) {
  return check_monotone(
      [&](const Per& r) { return eval_object(e, r, budget); }, lattice);
}

// phi.i must track the identity on F R and be extensionally equal to it for
// every lattice R.  Whether phi.i literally *is* the code i is reported in
// the witness text but is not required: it holds for id, and fails already
// for most constant functors.
inline Report check_identity_realizer(const RealizableFunctor& f,
                                      const std::vector<Per>& lattice,
                                      const BudgetPtr& budget) {
  Report rep;
  Outcome vo = apply(f.phi, code_i(), budget->fuel);
  for (const Per& r : lattice) {
    CheckResult& item = rep.add("identity realizer on " + show_per(r));
    if (!vo.converged()) {
      item.verdict = Verdict::Undecided;
      item.witness = "phi.i ran out of fuel";
      continue;
    }
    Per fr = eval_object(f.expr, r, budget);
    SemView view = functor_view(f.expr, r, budget);
    TrackReport tr = check_tracker_sem(fr, view, *vo.value, budget->fuel);
    Verdict v = tr.verdict;
    if (v == Verdict::No) {
      item.verdict = v;
      item.witness = "phi.i does not track at (" + show_code(tr.witness->first) +
                     ", " + show_code(tr.witness->second) + ")";
      continue;
    }
    for (const Code& p : fr.dom()) {
      ++item.checked;
      Outcome po = apply(*vo.value, p, budget->fuel);
      if (!po.converged()) {
        v = meet(v, Verdict::Undecided);
        continue;
      }
      Verdict a = view.related(*po.value, p);
      if (a == Verdict::No) {
        v = Verdict::No;
        item.witness = "phi.i moves " + show_code(p);
        break;
      }
      v = meet(v, a);
    }
    item.verdict = v;
    if (v == Verdict::Yes)
      item.witness = (*vo.value == code_i())
                         ? "phi.i = i as codes"
                         : "extensional identity only; phi.i = " +
                               show_code(*vo.value);
  }
  return rep;
}

// Is phi.i literally the code i?  (The strong form of the identity-realizer
// condition; separate because its failure is expected, not an error.)
inline std::optional<bool> strict_identity_realizer(const RealizableFunctor& f,
                                                    Fuel fuel) {
  Outcome vo = apply(f.phi, code_i(), fuel);
  if (!vo.converged()) return std::nullopt;
  return *vo.value == code_i();
}

// The index-respecting repair: the repaired tracker sends i to i exactly and
// anything else through phi.  The combinatory calculus has no code-equality
// test, so the repair is a host-level tracker value, not a code; every
// checker accepts both forms.
inline TrackerFn psi_repair(const Code& phi) {
  return [phi](const Code& x, Fuel fuel) -> Outcome {
    if (x == code_i()) return Outcome{code_i(), 0};
    return apply(phi, x, fuel);
  };
}

}  // namespace perlab
