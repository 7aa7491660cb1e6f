#pragma once

// Shared basics: the unbounded integer type, fuel, three-valued verdicts,
// and the error hierarchy used across the library.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace perlab {

using Integer = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition violations: mixing budgets, endpoint mismatches, ...
struct ContractError : Error {
  using Error::Error;
};

// A code's numeral would exceed the materialization bound.  Codes are kept
// in term form internally; only printing/sorting forces the numeral.
struct CodeTooLarge : Error {
  using Error::Error;
};

struct UnboundVariable : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// Evaluation budget for the combinatory kernel.  One unit of fuel pays for
// one contraction step; every kernel entry point takes fuel explicitly.
struct Fuel {
  std::uint64_t max_steps = 1;
};

inline Fuel fuel(std::uint64_t steps) {
  if (steps == 0) throw ContractError("fuel must be at least 1 step");
  return Fuel{steps};
}

// Three-valued answer for semantic checks.  `No` always comes with a
// witness at the reporting layer; `Undecided` means the deciding
// computation ran out of fuel, which is distinct from falsity everywhere.
enum class Verdict : std::uint8_t { Yes, No, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "undecided";
  }
}

// Combine verdicts of sub-checks: any No dominates, else any Undecided.
inline Verdict meet(Verdict a, Verdict b) {
  if (a == Verdict::No || b == Verdict::No) return Verdict::No;
  if (a == Verdict::Undecided || b == Verdict::Undecided) return Verdict::Undecided;
  return Verdict::Yes;
}

}  // namespace perlab
