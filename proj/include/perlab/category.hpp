#pragma once

// The category of pers at a fixed budget: tracked morphisms, composition,
// identities, extensional equality, isomorphism search, hom enumeration.
//
// A morphism R -> S is a code n such that n.a converges into dom S for every
// a in dom R, respecting classes.  check_tracker decides this three-valuedly:
// a definite violation wins over fuel exhaustion, and fuel exhaustion is
// never reported as falsity.
//
// Checking ops accept either a code or a host-level function as the tracker;
// a Morphism always carries a code, since only codes compose via the
// composition combinator.

#include "bracket.hpp"
#include "core.hpp"
#include "eval.hpp"
#include "per.hpp"
#include "term.hpp"
#include "universe.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace perlab {

using TrackerFn = std::function<Outcome(const Code&, Fuel)>;
using TrackerLike = std::variant<Code, TrackerFn>;

inline Outcome apply_tracker(const TrackerLike& t, const Code& a, Fuel fuel) {
  if (std::holds_alternative<Code>(t)) return apply(std::get<Code>(t), a, fuel);
  return std::get<TrackerFn>(t)(a, fuel);
}

struct TrackReport {
  Verdict verdict = Verdict::Yes;
  // For a No: a pair related in the source whose images are not related in
  // the target (an image landing outside the domain is the pair (a, a)).
  std::optional<std::pair<Code, Code>> witness;
  // Arguments whose image ran out of fuel; nonempty exactly when Undecided.
  std::vector<Code> undecided;
};

// Does t track r -> s?  One application per domain element: the image class
// must be defined and constant on every r-block.
inline TrackReport check_tracker(const Per& r, const Per& s,
                                 const TrackerLike& t, const BudgetPtr& budget) {
  if (!budget) throw ContractError("check_tracker needs a budget");
  if (r.budget) require_same_budget(r.budget, budget, "check_tracker(source)");
  if (s.budget) require_same_budget(s.budget, budget, "check_tracker(target)");

  TrackReport rep;
  std::vector<std::optional<std::size_t>> cls_of_block(r.class_count());
  std::vector<std::optional<Code>> first_of_block(r.class_count());
  for (const Code& a : r.dom()) {
    Outcome o = apply_tracker(t, a, budget->fuel);
    if (!o.converged()) {
      rep.undecided.push_back(a);
      continue;
    }
    auto cls = s.class_of(*o.value);
    if (!cls) {
      rep.verdict = Verdict::No;
      rep.witness = {a, a};
      rep.undecided.clear();
      return rep;
    }
    std::size_t rb = *r.class_of(a);
    if (first_of_block[rb]) {
      if (*cls_of_block[rb] != *cls) {
        rep.verdict = Verdict::No;
        rep.witness = {*first_of_block[rb], a};
        rep.undecided.clear();
        return rep;
      }
    } else {
      first_of_block[rb] = a;
      cls_of_block[rb] = cls;
    }
  }
  rep.verdict = rep.undecided.empty() ? Verdict::Yes : Verdict::Undecided;
  return rep;
}

// The same check against a semantic target view.  No class indexing is
// available, so relatedness is checked pairwise within each source block.
inline TrackReport check_tracker_view(const Per& r, const RelView& s,
                                      const TrackerLike& t, Fuel fuel) {
  TrackReport rep;
  for (const auto& blk : r.blocks) {
    std::vector<std::pair<Code, Code>> images;  // (argument, image)
    for (const Code& a : blk) {
      Outcome o = apply_tracker(t, a, fuel);
      if (!o.converged()) {
        rep.undecided.push_back(a);
        continue;
      }
      if (!s.in_dom(*o.value)) {
        rep.verdict = Verdict::No;
        rep.witness = {a, a};
        rep.undecided.clear();
        return rep;
      }
      images.push_back({a, *o.value});
    }
    for (std::size_t i = 0; i + 1 < images.size(); ++i)
      for (std::size_t j = i + 1; j < images.size(); ++j)
        if (!s.related(images[i].second, images[j].second)) {
          rep.verdict = Verdict::No;
          rep.witness = {images[i].first, images[j].first};
          rep.undecided.clear();
          return rep;
        }
  }
  rep.verdict = rep.undecided.empty() ? Verdict::Yes : Verdict::Undecided;
  return rep;
}

// A three-valued semantic relation, for targets whose relatedness is itself
// decided by bounded evaluation (functor images, approximated carriers).
// Undecided means some application inside the answer ran out of fuel.
struct SemView {
  std::function<Verdict(const Code&)> in_dom;
  std::function<Verdict(const Code&, const Code&)> related;
};

inline SemView sem_view_of(const Per& p) {
  return SemView{
      [p](const Code& c) { return p.in_dom(c) ? Verdict::Yes : Verdict::No; },
      [p](const Code& a, const Code& b) {
        return p.related(a, b) ? Verdict::Yes : Verdict::No;
      }};
}

// check_tracker against a three-valued target view.  The view is assumed
// transitive (every view here is built from pers), so images within a source
// block are compared consecutively rather than pairwise — a No on any link
// refutes the block, an all-Yes chain confirms it.
inline TrackReport check_tracker_sem(const Per& r, const SemView& s,
                                     const TrackerLike& t, Fuel fuel) {
  TrackReport rep;
  for (const auto& blk : r.blocks) {
    std::vector<std::pair<Code, Code>> images;  // (argument, image)
    for (const Code& a : blk) {
      Outcome o = apply_tracker(t, a, fuel);
      if (!o.converged()) {
        rep.undecided.push_back(a);
        continue;
      }
      Verdict in = s.in_dom(*o.value);
      if (in == Verdict::No) {
        rep.verdict = Verdict::No;
        rep.witness = {a, a};
        rep.undecided.clear();
        return rep;
      }
      if (in == Verdict::Undecided) {
        rep.undecided.push_back(a);
        continue;
      }
      images.push_back({a, *o.value});
    }
    for (std::size_t i = 0; i + 1 < images.size(); ++i) {
      Verdict v = s.related(images[i].second, images[i + 1].second);
      if (v == Verdict::No) {
        rep.verdict = Verdict::No;
        rep.witness = {images[i].first, images[i + 1].first};
        rep.undecided.clear();
        return rep;
      }
      if (v == Verdict::Undecided) rep.undecided.push_back(images[i].first);
    }
  }
  rep.verdict = rep.undecided.empty() ? Verdict::Yes : Verdict::Undecided;
  return rep;
}

struct Morphism {
  Per src;
  Per tgt;
  Code tracker;
  BudgetPtr budget;
};

inline Morphism make_morphism(Per src, Per tgt, const Code& tracker,
                              BudgetPtr budget) {
  TrackReport rep = check_tracker(src, tgt, tracker, budget);
  if (rep.verdict == Verdict::No)
    throw ContractError("tracker " + show_code(tracker) + " does not track: " +
                        show_code(rep.witness->first) + " vs " +
                        show_code(rep.witness->second));
  if (rep.verdict == Verdict::Undecided)
    throw ContractError("tracker " + show_code(tracker) +
                        " is undecided at this budget (first stuck argument " +
                        show_code(rep.undecided.front()) + ")");
  return Morphism{std::move(src), std::move(tgt), tracker, std::move(budget)};
}

inline Morphism identity(Per r, BudgetPtr budget) {
  Per copy = r;
  return make_morphism(std::move(copy), std::move(r), code_i(), std::move(budget));
}

inline Morphism compose(const Morphism& g, const Morphism& f) {
  if (f.tgt != g.src)
    throw ContractError("compose: inner target differs from outer source");
  require_same_budget(f.budget, g.budget, "compose");
  return make_morphism(f.src, g.tgt, comp(g.tracker, f.tracker), f.budget);
}

// Extensional equality: the same function on quotients.
inline bool equal_morphisms(const Morphism& f, const Morphism& g) {
  if (f.src != g.src || f.tgt != g.tgt)
    throw ContractError("equal_morphisms: endpoints differ");
  require_same_budget(f.budget, g.budget, "equal_morphisms");
  for (const Code& a : f.src.dom()) {
    Outcome fa = apply(f.tracker, a, f.budget->fuel);
    Outcome ga = apply(g.tracker, a, f.budget->fuel);
    if (!fa.converged() || !ga.converged())
      throw ContractError("equal_morphisms: application undecided at budget");
    if (!f.tgt.related(*fa.value, *ga.value)) return false;
  }
  return true;
}

// Smallest code in the universe tracking tgt -> src that inverts f on both
// sides, as a verified morphism; empty if none exists at this budget.
inline std::optional<Morphism> is_iso(const Morphism& f) {
  const BudgetPtr& budget = f.budget;
  // Quotients of different sizes cannot be in bijection.
  if (f.src.class_count() != f.tgt.class_count()) return std::nullopt;
  for (const Code& g : budget->universe) {
    if (check_tracker(f.tgt, f.src, g, budget).verdict != Verdict::Yes) continue;
    bool ok = true;
    for (const Code& a : f.src.dom()) {
      Outcome fa = apply(f.tracker, a, budget->fuel);
      if (!fa.converged()) {
        ok = false;
        break;
      }
      Outcome back = apply(g, *fa.value, budget->fuel);
      if (!back.converged() || !f.src.related(*back.value, a)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const Code& b : f.tgt.dom()) {
      Outcome gb = apply(g, b, budget->fuel);
      if (!gb.converged()) {
        ok = false;
        break;
      }
      Outcome fwd = apply(f.tracker, *gb.value, budget->fuel);
      if (!fwd.converged() || !f.tgt.related(*fwd.value, b)) {
        ok = false;
        break;
      }
    }
    if (ok) return make_morphism(f.tgt, f.src, g, budget);
  }
  return std::nullopt;
}

// One representative morphism per extensional equivalence class of trackers,
// ordered by representative; the representative is the least code.
inline std::vector<Morphism> enumerate_homs(const Per& r, const Per& s,
                                            const BudgetPtr& budget) {
  ExpResult e = exponential(r, s, budget);
  std::vector<Morphism> out;
  out.reserve(e.per.class_count());
  for (const auto& blk : e.per.blocks)
    out.push_back(make_morphism(r, s, blk.front(), budget));
  return out;
}

}  // namespace perlab
