#pragma once

// Universes and budgets.
//
// A universe is a finite set of codes; a budget pairs a universe with a fuel
// bound.  Every bounded construction (exponentials, fixpoints, hom
// enumeration, ...) quantifies over a budget's universe and evaluates under
// its fuel, so results are always relative to an explicit budget.  Budgets
// are shared immutably; values derived under one budget refuse to mix with
// values derived under a different one.

#include "core.hpp"
#include "term.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace perlab {

struct UniverseSpec {
  enum class Kind { FirstCodes, TermsUpTo, Explicit };

  Kind kind = Kind::FirstCodes;
  std::uint64_t count = 0;      // FirstCodes: codes 0 .. count-1
  unsigned max_apps = 0;        // TermsUpTo: terms with at most this many applications
  std::vector<Code> explicit_codes;

  static UniverseSpec first_codes(std::uint64_t n) {
    UniverseSpec s;
    s.kind = Kind::FirstCodes;
    s.count = n;
    return s;
  }

  static UniverseSpec terms_up_to(unsigned apps) {
    UniverseSpec s;
    s.kind = Kind::TermsUpTo;
    s.max_apps = apps;
    return s;
  }

  static UniverseSpec explicit_set(std::vector<Code> codes) {
    UniverseSpec s;
    s.kind = Kind::Explicit;
    s.explicit_codes = std::move(codes);
    return s;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::FirstCodes: return "codes:" + std::to_string(count);
      case Kind::TermsUpTo: return "terms:" + std::to_string(max_apps);
      default: {
        std::string out = "explicit[";
        for (std::size_t i = 0; i < explicit_codes.size(); ++i) {
          if (i) out += ' ';
          out += show_code(explicit_codes[i]);
        }
        return out + "]";
      }
    }
  }
};

inline void sort_unique(std::vector<Code>& codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
}

inline std::vector<Code> enumerate_codes(const UniverseSpec& spec) {
  std::vector<Code> out;
  switch (spec.kind) {
    case UniverseSpec::Kind::FirstCodes: {
      out.reserve(spec.count);
      for (std::uint64_t i = 0; i < spec.count; ++i) out.push_back(Code(Integer(i)));
      break;
    }
    case UniverseSpec::Kind::TermsUpTo: {
      // Terms grouped by application count; apps(l r) = apps(l) + apps(r) + 1.
      std::vector<std::vector<Term>> by_apps(spec.max_apps + 1);
      by_apps[0] = {term_k(), term_s(), term_i()};
      for (unsigned n = 1; n <= spec.max_apps; ++n)
        for (unsigned i = 0; i < n; ++i)
          for (Term l : by_apps[i])
            for (Term r : by_apps[n - 1 - i])
              by_apps[n].push_back(term_app(l, r));
      for (auto& group : by_apps)
        for (Term t : group) out.push_back(Code(t));
      break;
    }
    default:
      out = spec.explicit_codes;
      break;
  }
  sort_unique(out);
  return out;
}

struct Budget {
  UniverseSpec spec;
  std::vector<Code> universe;  // ascending, duplicate-free
  Fuel fuel;
  std::unordered_map<Term, std::size_t, TermHash> position;  // term -> index

  bool contains(const Code& c) const { return position.count(c.term()) > 0; }

  std::size_t index_of(const Code& c) const {
    auto it = position.find(c.term());
    if (it == position.end())
      throw ContractError("code " + show_code(c) + " is outside the universe");
    return it->second;
  }
};

using BudgetPtr = std::shared_ptr<const Budget>;

inline BudgetPtr make_budget(const UniverseSpec& spec, Fuel fuel) {
  auto b = std::make_shared<Budget>();
  b->spec = spec;
  b->universe = enumerate_codes(spec);
  b->fuel = fuel;
  b->position.reserve(b->universe.size());
  for (std::size_t i = 0; i < b->universe.size(); ++i)
    b->position.emplace(b->universe[i].term(), i);
  return b;
}

// Budgets agree when they bound the same computations: same universe as a
// set and same fuel.  Identical pointers short-circuit.
inline bool same_budget(const BudgetPtr& a, const BudgetPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->fuel.max_steps == b->fuel.max_steps && a->universe == b->universe;
}

inline void require_same_budget(const BudgetPtr& a, const BudgetPtr& b,
                                const char* where) {
  if (!same_budget(a, b))
    throw ContractError(std::string(where) + ": operands carry different budgets");
}

}  // namespace perlab
