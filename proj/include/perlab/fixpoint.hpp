#pragma once

// Least fixpoints of monotone functors, two ways.
//
// kleene_lfp iterates the object map from the empty per and stops at the
// first repeat; for a monotone map on the finite budget-relative lattice
// this limit equals the intersection of all pre-fixed points.  brute_lfp is
// that intersection taken literally — every per on a tiny carrier set is
// enumerated — and exists purely as an oracle to certify the iteration.

#include "core.hpp"
#include "functor.hpp"
#include "per.hpp"
#include "report.hpp"
#include "universe.hpp"

#include <string>
#include <vector>

namespace perlab {

struct FixpointResult {
  Per fixobject;
  std::size_t iterations = 0;
  std::vector<Per> trace;  // X0 = empty through the first repeat
  bool fixmap_verified = false;
  BudgetPtr budget;
};

// F X = X as relations, and code 2 tracks the fixmap both ways.  The carrier
// of F X may contain codes the stored X never mentions (and vice versa), so
// both directions run against semantic views.
inline bool verify_fixmap(const FunctorPtr& e, const Per& x,
                          const BudgetPtr& budget) {
  Per fx = eval_object(e, x, budget);
  if (!(fx == x)) return false;
  SemView xv = sem_view_of(x);
  SemView fxv = sem_view_of(fx);
  return check_tracker_sem(fx, xv, code_i(), budget->fuel).verdict ==
             Verdict::Yes &&
         check_tracker_sem(x, fxv, code_i(), budget->fuel).verdict ==
             Verdict::Yes;
}

// Ascending iteration from the empty per.  The chain must rise at every
// step — a drop means the object map is not monotone, and the iteration
// refuses rather than returning something that is not a least fixpoint.
inline FixpointResult kleene_lfp(const std::function<Per(const Per&)>& obj_map,
                                 const BudgetPtr& budget,
                                 std::size_t max_iter = 64) {
  FixpointResult out;
  out.budget = budget;
  out.trace.push_back(empty_per(budget));
  for (std::size_t k = 0; k < max_iter; ++k) {
    Per next = obj_map(out.trace.back());
    if (!subper(out.trace.back(), next))
      throw ContractError("object map is not monotone along the chain (step " +
                          std::to_string(k + 1) + ")");
    bool stable = next == out.trace.back();
    out.trace.push_back(std::move(next));
    ++out.iterations;
    if (stable) {
      out.fixobject = out.trace.back();
      return out;
    }
  }
  throw ContractError("no fixpoint at this budget (chain still rising after " +
                      std::to_string(max_iter) + " steps)");
}

inline FixpointResult kleene_lfp(const FunctorPtr& e, const BudgetPtr& budget,
                                 std::size_t max_iter = 64) {
  FixpointResult out = kleene_lfp(
      [&](const Per& r) { return eval_object(e, r, budget); }, budget,
      max_iter);
  out.fixmap_verified = verify_fixmap(e, out.fixobject, budget);
  return out;
}

inline FixpointResult kleene_lfp(const RealizableFunctor& f,
                                 const BudgetPtr& budget,
                                 std::size_t max_iter = 64) {
  return kleene_lfp(f.expr, budget, max_iter);
}

namespace detail {

// All partitions of `codes[i..]` appended to `blocks`, visiting each
// complete partition once.
inline void each_partition(const std::vector<Code>& codes, std::size_t i,
                           std::vector<std::vector<Code>>& blocks,
                           const std::function<void()>& visit) {
  if (i == codes.size()) {
    visit();
    return;
  }
  // Index-based: recursion grows `blocks`, so references would dangle.
  for (std::size_t b = 0, n = blocks.size(); b < n; ++b) {
    blocks[b].push_back(codes[i]);
    each_partition(codes, i + 1, blocks, visit);
    blocks[b].pop_back();
  }
  blocks.push_back({codes[i]});
  each_partition(codes, i + 1, blocks, visit);
  blocks.pop_back();
}

}  // namespace detail

// Every per on subsets of the given carrier codes: all set partitions of all
// subsets.  Three codes give fifteen pers.
inline std::vector<Per> enumerate_tiny_pers(std::vector<Code> codes,
                                            const BudgetPtr& budget) {
  sort_unique(codes);
  if (codes.size() > 3)
    throw ContractError("tiny per enumeration is capped at 3 carrier codes");
  std::vector<Per> out;
  std::size_t n = codes.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Code> subset;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) subset.push_back(codes[i]);
    std::vector<std::vector<Code>> blocks;
    detail::each_partition(subset, 0, blocks, [&] {
      out.push_back(make_per(blocks, budget));
    });
  }
  return out;
}

// The intersection of all pre-fixed points among the tiny pers — the
// definition of the least fixpoint read off literally.  An empty family
// intersects to the top per on the tiny carrier.
inline Per brute_lfp(const FunctorPtr& e, const std::vector<Code>& tiny,
                     const BudgetPtr& budget) {
  std::vector<Per> all = enumerate_tiny_pers(tiny, budget);
  bool found = false;
  Per acc;
  for (const Per& r : all) {
    if (!subper(eval_object(e, r, budget), r)) continue;
    if (!found) {
      acc = r;
      found = true;
    } else {
      acc = intersect_per(acc, r);
    }
  }
  if (!found) {
    std::vector<Code> codes = tiny;
    sort_unique(codes);
    return indiscrete_per(codes, budget);
  }
  return acc;
}

}  // namespace perlab
