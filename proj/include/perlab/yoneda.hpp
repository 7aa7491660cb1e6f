#pragma once

// Natural transformations at a budget, the hom functor, the star
// (monotonized) functor it induces, and the evaluation isomorphism between a
// functor image and the transformations out of the matching hom functor.

#include "perlab/functor.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace perlab {

struct NatResult {
  Per per;  // universe codes acting naturally, grouped extensionally
  std::vector<std::string> excluded_by_fuel;
};

// Codes e that, at every per R of the family, track the image of F into the
// image of G, and whose squares with every hom n between family members
// commute: G(n).(e.h) ~ e.(F(n).h).  Both sides may leave the universe, so
// squares are compared through the semantic view of G at the target; h only
// needs one representative per class, since everything in sight tracks.
// Equivalence is the per-station exponential class, station by station.
inline NatResult nat_per(const RealizableFunctor& f,
                         const RealizableFunctor& g,
                         const std::vector<Per>& family,
                         const BudgetPtr& budget) {
  struct Station {
    Per fr;
    Per gr;
    ExpResult exp;
  };
  std::vector<Station> stations;
  stations.reserve(family.size());
  for (const Per& r : family) {
    Per fr = eval_object(f.expr, r, budget);
    Per gr = eval_object(g.expr, r, budget);
    ExpResult e = exponential(fr, gr, budget);
    stations.push_back({std::move(fr), std::move(gr), std::move(e)});
  }

  struct Square {
    std::size_t src;
    Code fn;  // action of F on the hom
    Code gn;  // action of G on the hom
    SemView view;
  };
  std::vector<Square> squares;
  std::vector<std::string> stuck_homs;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < family.size(); ++j)
      for (const Morphism& n : enumerate_homs(family[i], family[j], budget)) {
        Outcome fn = apply(f.phi, n.tracker, budget->fuel);
        Outcome gn = apply(g.phi, n.tracker, budget->fuel);
        if (!fn.converged() || !gn.converged()) {
          stuck_homs.push_back(show_code(n.tracker));
          continue;
        }
        squares.push_back({i, *fn.value, *gn.value,
                           functor_view(g.expr, family[j], budget)});
      }

  NatResult out;
  std::map<std::vector<std::size_t>, std::vector<Code>> groups;
  for (const Code& c : budget->universe) {
    std::vector<std::size_t> sig;
    bool in = true;
    bool stuck = false;
    for (const Station& st : stations) {
      auto it = st.exp.per.block_of.find(c.term());
      if (it == st.exp.per.block_of.end()) {
        for (const Code& ex : st.exp.excluded_by_fuel)
          if (ex == c) {
            stuck = true;
            break;
          }
        in = false;
        break;
      }
      sig.push_back(it->second);
    }
    if (!in) {
      if (stuck) out.excluded_by_fuel.push_back(show_code(c));
      continue;
    }
    if (!stuck_homs.empty()) stuck = true;

    Verdict natural = Verdict::Yes;
    for (const Square& sq : squares) {
      for (const auto& blk : stations[sq.src].fr.blocks) {
        const Code& h = blk.front();
        Outcome lhs = apply(c, h, budget->fuel);
        if (lhs.converged()) lhs = apply(sq.gn, *lhs.value, budget->fuel);
        Outcome rhs = apply(sq.fn, h, budget->fuel);
        if (rhs.converged()) rhs = apply(c, *rhs.value, budget->fuel);
        if (!lhs.converged() || !rhs.converged()) {
          natural = meet(natural, Verdict::Undecided);
          continue;
        }
        natural = meet(natural, sq.view.related(*lhs.value, *rhs.value));
        if (natural == Verdict::No) break;
      }
      if (natural == Verdict::No) break;
    }
    if (stuck) natural = meet(natural, Verdict::Undecided);
    if (natural == Verdict::Yes)
      groups[sig].push_back(c);
    else if (natural == Verdict::Undecided)
      out.excluded_by_fuel.push_back(show_code(c));
  }

  std::vector<std::vector<Code>> blocks;
  blocks.reserve(groups.size());
  for (auto& [sig, blk] : groups) blocks.push_back(std::move(blk));
  out.per = make_per(blocks, budget);
  return out;
}

// Maps-out-of-X as a functor: exp(X, Id) on objects, post-composition on
// trackers.
inline RealizableFunctor hom_functor(const Per& x) {
  return RealizableFunctor{fexp(x, fid()), code_b()};
}

struct StarResult {
  Per per;
  std::vector<std::string> excluded_by_fuel;
};

// F*X: natural transformations from maps-out-of-X into F.
inline StarResult star_functor(const RealizableFunctor& f, const Per& x,
                               const std::vector<Per>& family,
                               const BudgetPtr& budget) {
  NatResult n = nat_per(hom_functor(x), f, family, budget);
  return {std::move(n.per), std::move(n.excluded_by_fuel)};
}

// The action of F* on a tracker n from X to Y: precompose,
// e |-> \g. e.(g . n).
inline Code star_transport(const Code& n) {
  return lambda_code(
      {"e", "g"},
      oapp(ovar("e"), oapp(olift(code_b()), ovar("g"), olift(n))));
}

namespace detail {

// One comparison station per family member: the hom classes out of the base
// and the semantic view of F there.
struct AgreeStation {
  Per homs;
  SemView view;
};

inline std::vector<AgreeStation> agree_stations(const RealizableFunctor& f,
                                                const Per& base,
                                                const std::vector<Per>& family,
                                                const BudgetPtr& budget) {
  std::vector<AgreeStation> out;
  out.reserve(family.size());
  for (const Per& r : family)
    out.push_back({exponential(base, r, budget).per,
                   functor_view(f.expr, r, budget)});
  return out;
}

inline Verdict agree_at(const std::vector<AgreeStation>& stations,
                        const Code& e1, const Code& e2,
                        const BudgetPtr& budget) {
  Verdict v = Verdict::Yes;
  for (const AgreeStation& st : stations) {
    for (const auto& blk : st.homs.blocks) {
      Outcome a = apply(e1, blk.front(), budget->fuel);
      Outcome b = apply(e2, blk.front(), budget->fuel);
      if (!a.converged() || !b.converged()) {
        v = meet(v, Verdict::Undecided);
        continue;
      }
      v = meet(v, st.view.related(*a.value, *b.value));
      if (v == Verdict::No) return v;
    }
  }
  return v;
}

}  // namespace detail

// Pointwise agreement of two transformation candidates out of hom(X):
// related images in F R on every hom class at every station.
inline Verdict nat_agree(const Code& e1, const Code& e2,
                         const RealizableFunctor& f, const Per& x,
                         const std::vector<Per>& family,
                         const BudgetPtr& budget) {
  return detail::agree_at(detail::agree_stations(f, x, family, budget), e1,
                          e2, budget);
}

struct YonedaIso {
  Code forward;  // FX point to transformation: \x g. (phi.g).x
  Code back;     // transformation to FX point: \e. e.i
  Report report;
};

// The evaluation isomorphism between the image of F at X and the
// transformations out of hom(X), checked in both directions and naturally in
// X across the family.  X itself must belong to the family for the backward
// direction to have its identity argument available.  Sweeps visit one
// representative per class: every map in sight tracks, so verdicts are
// class-invariant.
inline YonedaIso yoneda_iso(const RealizableFunctor& f, const Per& x,
                            const std::vector<Per>& family,
                            const BudgetPtr& budget) {
  YonedaIso out{
      lambda_code({"x", "g"},
                  oapp(oapp(olift(f.phi), ovar("g")), ovar("x"))),
      lambda_code({"e"}, oapp(ovar("e"), olift(code_i()))),
      {}};

  Per fx = eval_object(f.expr, x, budget);
  SemView fview = functor_view(f.expr, x, budget);

  CheckResult& round1 = out.report.add("back after forward fixes " +
                                       show_functor(f.expr) + " at " +
                                       show_per(x));
  for (const auto& blk : fx.blocks) {
    const Code& p = blk.front();
    Outcome o = apply_chain({out.forward, p, code_i()}, budget->fuel);
    round1.checked += 1;
    if (!o.converged()) {
      round1.verdict = meet(round1.verdict, Verdict::Undecided);
      round1.excluded_by_fuel.push_back(show_code(p));
      continue;
    }
    Verdict v = fview.related(*o.value, p);
    round1.verdict = meet(round1.verdict, v);
    if (v == Verdict::No) {
      round1.witness = "round trip moves " + show_code(p);
      break;
    }
  }

  StarResult star = star_functor(f, x, family, budget);
  auto at_x = detail::agree_stations(f, x, family, budget);

  CheckResult& round2 =
      out.report.add("forward after back fixes the transformations at " +
                     show_per(x));
  for (const auto& blk : star.per.blocks) {
    const Code& e = blk.front();
    round2.checked += 1;
    Outcome point = apply(e, code_i(), budget->fuel);
    Outcome back_e = point.converged()
                         ? apply(out.forward, *point.value, budget->fuel)
                         : point;
    if (!back_e.converged()) {
      round2.verdict = meet(round2.verdict, Verdict::Undecided);
      round2.excluded_by_fuel.push_back(show_code(e));
      continue;
    }
    Verdict v = detail::agree_at(at_x, *back_e.value, e, budget);
    round2.verdict = meet(round2.verdict, v);
    if (v == Verdict::No) {
      round2.witness = "round trip moves " + show_code(e);
      break;
    }
  }

  // Naturality in the base: transporting a transformation along n agrees
  // with evaluating it at the identity, pushing the point through F, and
  // re-expanding at the target.
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (family[j] == x) continue;
    CheckResult& natx = out.report.add(
        "naturality of the evaluation iso along " + show_per(x) + " -> " +
        show_per(family[j]));
    auto at_y = detail::agree_stations(f, family[j], family, budget);
    for (const Morphism& n : enumerate_homs(x, family[j], budget)) {
      Code transport = star_transport(n.tracker);
      Outcome fn = apply(f.phi, n.tracker, budget->fuel);
      if (!fn.converged()) {
        natx.verdict = meet(natx.verdict, Verdict::Undecided);
        natx.excluded_by_fuel.push_back(show_code(n.tracker));
        continue;
      }
      for (const auto& blk : star.per.blocks) {
        const Code& e = blk.front();
        natx.checked += 1;
        Outcome lhs = apply(transport, e, budget->fuel);
        Outcome point = apply(e, code_i(), budget->fuel);
        if (point.converged())
          point = apply(*fn.value, *point.value, budget->fuel);
        Outcome rhs = point.converged()
                          ? apply(out.forward, *point.value, budget->fuel)
                          : point;
        if (!lhs.converged() || !rhs.converged()) {
          natx.verdict = meet(natx.verdict, Verdict::Undecided);
          natx.excluded_by_fuel.push_back(show_code(e));
          continue;
        }
        Verdict v = detail::agree_at(at_y, *lhs.value, *rhs.value, budget);
        natx.verdict = meet(natx.verdict, v);
        if (v == Verdict::No) {
          natx.witness = "square breaks at " + show_code(e) + " along " +
                         show_code(n.tracker);
          break;
        }
      }
      if (natx.verdict == Verdict::No) break;
    }
  }

  return out;
}

// Anti-monotonicity of maps-out-of: growing the source shrinks the hom per.
inline MonotoneReport check_hom_antitone(const std::vector<Per>& lattice,
                                         const BudgetPtr& budget) {
  MonotoneReport rep;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    for (std::size_t j = 0; j < lattice.size(); ++j) {
      if (!subper(lattice[i], lattice[j])) continue;
      for (const Per& r : lattice) {
        ++rep.checked;
        Per from_big = exponential(lattice[j], r, budget).per;
        Per from_small = exponential(lattice[i], r, budget).per;
        if (!subper(from_big, from_small)) {
          rep.monotone = false;
          if (!rep.witness) rep.witness = {lattice[i], lattice[j]};
          return rep;
        }
      }
    }
  return rep;
}

struct MonotonizeResult {
  MonotoneReport base;  // the raw object map across the family lattice
  MonotoneReport star;  // the induced transformation functor across it
  Report iso;           // evaluation-iso summary, one batch per base per
};

inline MonotonizeResult monotonize(const RealizableFunctor& f,
                                   const std::vector<Per>& family,
                                   const BudgetPtr& budget) {
  MonotonizeResult out;
  out.base = check_monotone(f.expr, family, budget);
  out.star = check_monotone(
      [&](const Per& r) { return star_functor(f, r, family, budget).per; },
      family);
  for (const Per& x : family)
    out.iso.append(yoneda_iso(f, x, family, budget).report);
  return out;
}

}  // namespace perlab
