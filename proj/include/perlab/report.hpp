#pragma once

// Check reports: a flat list of named three-valued results with witnesses.
// Every higher-level checker (functor laws, fixpoints, algebras,
// naturality) speaks this shape, and the command-line driver renders it.

#include "core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace perlab {

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Yes;
  std::string witness;    // empty unless there is something to point at
  std::uint64_t checked = 0;  // how many ground cases this result covers
  std::vector<std::string> excluded_by_fuel;
  double ms = 0;  // wall time; stays 0 unless the caller opts into timing
};

struct Report {
  std::vector<CheckResult> items;

  CheckResult& add(std::string name) {
    items.push_back(CheckResult{std::move(name)});
    return items.back();
  }

  Verdict overall() const {
    Verdict v = Verdict::Yes;
    for (const auto& it : items) v = meet(v, it.verdict);
    return v;
  }

  bool all_yes() const { return overall() == Verdict::Yes; }

  std::size_t count(Verdict v) const {
    std::size_t n = 0;
    for (const auto& it : items)
      if (it.verdict == v) ++n;
    return n;
  }

  void append(const Report& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }
};

}  // namespace perlab
