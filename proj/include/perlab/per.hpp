#pragma once

// Partial equivalence relations (pers) over codes.
//
// A per is stored extensionally as its partition into equivalence classes:
// blocks of codes, each block sorted ascending, blocks ordered by least
// element.  Pers built by bounded constructions carry the budget they were
// computed under; combining pers whose budgets disagree is a contract
// violation, because the results would not be comparable.
//
// exponential(R, S, budget) is the per of trackers from R to S, with
// candidates drawn from the budget's universe and applications run under its
// fuel.  Candidates whose applications run out of fuel are reported
// separately: they are neither members nor non-members, and pretending
// either would poison downstream answers.

#include "bracket.hpp"
#include "core.hpp"
#include "eval.hpp"
#include "term.hpp"
#include "universe.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace perlab {

struct Per {
  std::vector<std::vector<Code>> blocks;  // canonical form, see above
  BudgetPtr budget;  // null for hand-declared pers
  std::unordered_map<Term, std::size_t, TermHash> block_of;

  bool in_dom(const Code& c) const { return block_of.count(c.term()) > 0; }

  std::optional<std::size_t> class_of(const Code& c) const {
    auto it = block_of.find(c.term());
    if (it == block_of.end()) return std::nullopt;
    return it->second;
  }

  bool related(const Code& a, const Code& b) const {
    auto ca = class_of(a);
    if (!ca) return false;
    auto cb = class_of(b);
    return cb && *ca == *cb;
  }

  std::size_t class_count() const { return blocks.size(); }

  std::size_t dom_size() const { return block_of.size(); }

  std::vector<Code> dom() const {
    std::vector<Code> out;
    out.reserve(dom_size());
    for (const auto& blk : blocks) out.insert(out.end(), blk.begin(), blk.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Extensional equality; the budget stamp is bookkeeping, not identity.
  bool operator==(const Per& o) const { return blocks == o.blocks; }
  bool operator!=(const Per& o) const { return blocks != o.blocks; }
};

inline Per make_per(std::vector<std::vector<Code>> blocks,
                    BudgetPtr budget = nullptr) {
  Per p;
  p.budget = std::move(budget);
  for (auto& blk : blocks) {
    if (blk.empty()) throw ContractError("per block must be nonempty");
    sort_unique(blk);
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  p.blocks = std::move(blocks);
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    for (const Code& c : p.blocks[i])
      if (!p.block_of.emplace(c.term(), i).second)
        throw ContractError("per blocks overlap at code " + show_code(c));
  return p;
}

inline Per empty_per(BudgetPtr budget = nullptr) {
  return make_per({}, std::move(budget));
}

inline Per indiscrete_per(std::vector<Code> codes, BudgetPtr budget = nullptr) {
  if (codes.empty()) return empty_per(std::move(budget));
  return make_per({std::move(codes)}, std::move(budget));
}

inline Per discrete_per(const std::vector<Code>& codes,
                        BudgetPtr budget = nullptr) {
  std::vector<std::vector<Code>> blocks;
  blocks.reserve(codes.size());
  for (const Code& c : codes) blocks.push_back({c});
  return make_per(std::move(blocks), std::move(budget));
}

inline std::string show_per(const Per& p) {
  std::string out = "{";
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (i) out += ", ";
    out += '{';
    for (std::size_t j = 0; j < p.blocks[i].size(); ++j) {
      if (j) out += ' ';
      out += show_code(p.blocks[i][j]);
    }
    out += '}';
  }
  return out + "}";
}

// Budget discipline: two stamped pers must agree; an unstamped per defers.
inline void require_compatible(const Per& a, const Per& b, const char* where) {
  if (a.budget && b.budget) require_same_budget(a.budget, b.budget, where);
}

inline BudgetPtr merge_stamps(const Per& a, const Per& b) {
  return a.budget ? a.budget : b.budget;
}

// R is a subrelation of S: a R b implies a S b.  Holds iff every R-block
// lands inside a single S-block.
inline bool subper(const Per& r, const Per& s) {
  require_compatible(r, s, "subper");
  for (const auto& blk : r.blocks) {
    auto cls = s.class_of(blk.front());
    if (!cls) return false;
    for (const Code& c : blk)
      if (s.class_of(c) != cls) return false;
  }
  return true;
}

// Meet: related in both.
inline Per intersect_per(const Per& a, const Per& b) {
  require_compatible(a, b, "intersect_per");
  std::vector<std::vector<Code>> blocks;
  for (const auto& ba : a.blocks) {
    // Split this a-block by which b-block its members fall into.
    std::map<std::size_t, std::vector<Code>> split;
    for (const Code& c : ba) {
      auto cls = b.class_of(c);
      if (cls) split[*cls].push_back(c);
    }
    for (auto& [cls, blk] : split) blocks.push_back(std::move(blk));
  }
  return make_per(std::move(blocks), merge_stamps(a, b));
}

// Cartesian product.  The carrier holds one code per (a, x) in dom R x dom S:
// the value of PAIR a x run under the budget's fuel, so components are stored
// normalized.  Two carrier codes are related iff their components are related
// in R and S respectively.  Note the carrier codes are usually *outside* the
// budget's universe; a per does not care, but exponentials into a product
// will only find universe codes that hit the literal carrier elements.
inline Per product(const Per& r, const Per& s, const BudgetPtr& budget) {
  if (!budget) throw ContractError("product needs a budget");
  if (r.budget) require_same_budget(r.budget, budget, "product(left)");
  if (s.budget) require_same_budget(s.budget, budget, "product(right)");
  require_compatible(r, s, "product");

  const Code pair = code_pair();
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Code>> groups;
  for (std::size_t i = 0; i < r.blocks.size(); ++i)
    for (const Code& a : r.blocks[i])
      for (std::size_t j = 0; j < s.blocks.size(); ++j)
        for (const Code& x : s.blocks[j]) {
          Outcome o = apply_chain({pair, a, x}, budget->fuel);
          if (!o.converged())
            throw ContractError("product: pairing (" + show_code(a) + ", " +
                                show_code(x) + ") ran out of fuel");
          groups[{i, j}].push_back(*o.value);
        }

  std::vector<std::vector<Code>> blocks;
  blocks.reserve(groups.size());
  for (auto& [key, blk] : groups) blocks.push_back(std::move(blk));
  return make_per(std::move(blocks), budget);
}

// A semantic view of a relation: membership and relatedness as predicates.
// Bounded constructions whose carriers are cut to the universe use these to
// answer questions about codes the stored blocks cannot see.
struct RelView {
  std::function<bool(const Code&)> in_dom;
  std::function<bool(const Code&, const Code&)> related;
};

inline RelView view_of(const Per& p) {
  return RelView{[p](const Code& c) { return p.in_dom(c); },
                 [p](const Code& a, const Code& b) { return p.related(a, b); }};
}

// ---- exponential per -------------------------------------------------------

struct ExpResult {
  Per per;
  std::vector<Code> excluded_by_fuel;  // candidates with undecided applications
};

// Trackers from R to S, drawn from the budget's universe.
//
// f is in the domain iff for all a ~R a', f.a and f.a' converge into dom S
// and f.a ~S f.a'; f ~ f' iff additionally f.a ~S f'.a on all of dom R.
// Given tracking, both reduce to the *signature* of f: the vector of
// S-classes hit per R-class.  f tracks iff the S-class of f.a is defined and
// constant on every R-block, and f ~ f' iff their signatures coincide, so
// one pass per candidate suffices and transitivity is automatic.
inline ExpResult exponential(const Per& r, const Per& s, const BudgetPtr& budget) {
  if (!budget) throw ContractError("exponential needs a budget");
  if (r.budget) require_same_budget(r.budget, budget, "exponential(source)");
  if (s.budget) require_same_budget(s.budget, budget, "exponential(target)");
  require_compatible(r, s, "exponential");

  const std::vector<Code> dom = r.dom();
  ExpResult out;

  // Empty source: every candidate tracks, all indistinguishable.
  if (dom.empty()) {
    out.per = indiscrete_per(budget->universe, budget);
    return out;
  }

  std::map<std::vector<std::size_t>, std::vector<Code>> groups;
  for (const Code& f : budget->universe) {
    std::vector<std::size_t> sig(r.class_count(), 0);
    std::vector<bool> seen(r.class_count(), false);
    bool excluded = false, tracks = true;
    for (const Code& a : dom) {
      Outcome o = apply(f, a, budget->fuel);
      if (!o.converged()) {
        excluded = true;
        break;
      }
      auto cls = s.class_of(*o.value);
      if (!cls) {
        tracks = false;
        break;
      }
      std::size_t rc = *r.class_of(a);
      if (seen[rc] && sig[rc] != *cls) {
        tracks = false;  // not constant on an R-block
        break;
      }
      seen[rc] = true;
      sig[rc] = *cls;
    }
    if (excluded)
      out.excluded_by_fuel.push_back(f);
    else if (tracks)
      groups[sig].push_back(f);
  }

  std::vector<std::vector<Code>> blocks;
  blocks.reserve(groups.size());
  for (auto& [sig, blk] : groups) blocks.push_back(std::move(blk));
  out.per = make_per(std::move(blocks), budget);
  return out;
}

}  // namespace perlab
