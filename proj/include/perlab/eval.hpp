#pragma once

// The combinatory evaluator.
//
// apply(n, m, fuel) reduces App(decode n, decode m) by leftmost-outermost
// (normal-order) weak reduction:
//
//   I x -> x        K x y -> x        S f g x -> f x (g x)
//
// Under-applied combinators are normal forms.  The outcome is either
// Converged(code of the normal form, steps) or OutOfFuel; divergence at a
// budget is an ordinary value, never an exception.  Fuel counts contraction
// steps.  Two further resource guards fold into OutOfFuel: the whole term
// growing past one million nodes, and the reducer revisiting the exact same
// term (a certain loop under a deterministic strategy).
//
// An optional memo table keyed by (n, m, fuel) makes repeated sweeps cheap;
// results are identical with the table disabled.

#include "core.hpp"
#include "term.hpp"

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace perlab {

struct Outcome {
  std::optional<Code> value;  // empty <=> out of fuel
  std::uint64_t steps = 0;

  bool converged() const { return value.has_value(); }
};

namespace detail {

constexpr std::uint64_t kNodeGuard = 1'000'000;
constexpr std::uint64_t kSnapshotPeriod = 128;

struct EvalFrame {
  Term head = nullptr;
  std::vector<Term> args;  // back() is the innermost (leftmost) argument
  std::vector<Term> done;  // normalized arguments, innermost first
};

inline unsigned arity_of(std::uint8_t tag) {
  switch (tag) {
    case TAG_I: return 1;
    case TAG_K: return 2;
    case TAG_S: return 3;
    default: return 0;
  }
}

}  // namespace detail

// Reduce `root` to weak normal form.  Returns the normal form, or nullopt
// when fuel, the node guard, or loop detection cuts the run short.
// `steps` reports contractions performed either way.
inline std::optional<Term> normalize(Term root, Fuel fuel,
                                     std::uint64_t& steps) {
  steps = 0;
  std::uint64_t total = root->size;
  std::vector<detail::EvalFrame> stack;
  Term current = root;
  std::optional<Term> result;
  std::unordered_set<Term, TermHash> snapshots;

  while (true) {
    // Head-normalize `current`, contracting at the leftmost position.
    detail::EvalFrame frame;
    frame.head = current;
    snapshots.clear();
    std::uint64_t region_steps = 0;
    while (true) {
      while (frame.head->tag == TAG_APP) {
        frame.args.push_back(frame.head->right);
        frame.head = frame.head->left;
      }
      unsigned arity = detail::arity_of(frame.head->tag);
      std::size_t n = frame.args.size();
      if (arity == 0 || arity > n) break;  // head is normal
      if (steps >= fuel.max_steps) return std::nullopt;
      ++steps;
      switch (frame.head->tag) {
        case TAG_I: {
          frame.head = frame.args[n - 1];
          frame.args.pop_back();
          total -= 2;
          break;
        }
        case TAG_K: {
          Term a = frame.args[n - 1];
          Term b = frame.args[n - 2];
          frame.args.resize(n - 2);
          frame.head = a;
          total -= std::uint64_t(3) + b->size;
          break;
        }
        default: {  // S
          Term f = frame.args[n - 1];
          Term g = frame.args[n - 2];
          Term x = frame.args[n - 3];
          frame.args.resize(n - 3);
          frame.args.push_back(term_app(g, x));
          frame.args.push_back(x);
          frame.head = f;
          total += std::uint64_t(x->size) - 1;
          if (total > detail::kNodeGuard) return std::nullopt;
          break;
        }
      }
      if (++region_steps % detail::kSnapshotPeriod == 0) {
        Term snap = frame.head;
        for (auto it = frame.args.rbegin(); it != frame.args.rend(); ++it)
          snap = term_app(snap, *it);
        if (!snapshots.insert(snap).second) return std::nullopt;  // loop
      }
    }

    // Head is under-applied; arguments still need normalizing.
    if (frame.args.empty()) {
      result = frame.head;
    } else {
      stack.push_back(std::move(frame));
      current = stack.back().args.back();
      continue;
    }

    // Deliver the finished subterm upward.
    while (result) {
      if (stack.empty()) return result;
      detail::EvalFrame& top = stack.back();
      top.done.push_back(*result);
      result.reset();
      if (top.done.size() < top.args.size()) {
        current = top.args[top.args.size() - 1 - top.done.size()];
        break;
      }
      Term t = top.head;
      for (Term arg : top.done) t = term_app(t, arg);
      result = t;
      stack.pop_back();
    }
  }
}

namespace detail {

struct ApplyKey {
  Term redex;
  std::uint64_t fuel;
  bool operator==(const ApplyKey& o) const {
    return redex == o.redex && fuel == o.fuel;
  }
};

struct ApplyKeyHash {
  std::size_t operator()(const ApplyKey& k) const {
    return std::hash<const void*>()(k.redex) ^ (k.fuel * 0x9e3779b97f4a7c15ull);
  }
};

struct ApplyMemo {
  std::unordered_map<ApplyKey, Outcome, ApplyKeyHash> table;
  bool enabled = true;

  static ApplyMemo& instance() {
    static ApplyMemo memo;
    return memo;
  }
};

}  // namespace detail

inline void set_apply_memo(bool enabled) {
  detail::ApplyMemo::instance().enabled = enabled;
}

inline void clear_apply_memo() {
  detail::ApplyMemo::instance().table.clear();
}

// Reduce a code to the code of its normal form, under the shared memo.
inline Outcome normalize_code(const Code& c, Fuel fuel) {
  auto& memo = detail::ApplyMemo::instance();
  detail::ApplyKey key{c.term(), fuel.max_steps};
  if (memo.enabled) {
    auto it = memo.table.find(key);
    if (it != memo.table.end()) return it->second;
  }
  std::uint64_t steps = 0;
  std::optional<Term> nf = normalize(c.term(), fuel, steps);
  Outcome out;
  out.steps = steps;
  if (nf) out.value = Code(*nf);
  if (memo.enabled) memo.table.emplace(key, out);
  return out;
}

inline Outcome apply(const Code& n, const Code& m, Fuel fuel) {
  return normalize_code(Code(term_app(n.term(), m.term())), fuel);
}

// Left-fold application: apply_chain({f, a, b}) is (f a) b.
inline Outcome apply_chain(const std::vector<Code>& codes, Fuel fuel) {
  if (codes.empty()) throw ContractError("apply_chain needs a head");
  Outcome acc;
  acc.value = codes.front();
  for (std::size_t i = 1; i < codes.size(); ++i) {
    acc = apply(*acc.value, codes[i], fuel);
    if (!acc.converged()) return acc;
  }
  return acc;
}

}  // namespace perlab
