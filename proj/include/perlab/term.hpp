#pragma once

// SKI terms and their Goedel coding.
//
// Terms are hash-consed: structurally equal terms are the same node, so
// equality is pointer equality and shared subterms cost nothing.  A `Code`
// is a natural number under the bijection
//
//   encode(K) = 0, encode(S) = 1, encode(I) = 2,
//   encode(App(a, b)) = cantor(encode(a), encode(b)) + 3,
//   cantor(x, y) = (x + y)(x + y + 1)/2 + y,
//
// but it is represented by the (decoded) term itself; the numeral is
// materialized lazily, since the numeral of a deep term is astronomically
// large even when the term is small.  Materialization beyond a fixed bit
// bound throws CodeTooLarge rather than exhausting memory.

#include "core.hpp"

#include <concepts>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace perlab {

enum : std::uint8_t { TAG_K = 0, TAG_S = 1, TAG_I = 2, TAG_APP = 3 };

struct TermNode;
using Term = const TermNode*;

struct TermNode {
  std::uint8_t tag;
  Term left = nullptr;
  Term right = nullptr;
  std::uint32_t size = 1;    // node count, saturating
  std::uint32_t depth = 0;   // tree height, saturating
};

namespace detail {

constexpr std::uint32_t kSizeSat = 0x7fffffffu;
constexpr std::uint32_t kDepthSat = 0x7fffffffu;

struct AppKeyHash {
  std::size_t operator()(const std::pair<Term, Term>& k) const {
    auto a = reinterpret_cast<std::uintptr_t>(k.first);
    auto b = reinterpret_cast<std::uintptr_t>(k.second);
    std::size_t h = a * 0x9e3779b97f4a7c15ull;
    h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

struct TermStore {
  TermNode leaf_k{TAG_K};
  TermNode leaf_s{TAG_S};
  TermNode leaf_i{TAG_I};
  std::deque<TermNode> arena;
  std::unordered_map<std::pair<Term, Term>, Term, AppKeyHash> apps;
  std::unordered_map<Term, Integer> numerals;   // encode memo
  std::map<Integer, Term> terms;                // decode memo

  static TermStore& instance() {
    static TermStore store;
    return store;
  }
};

}  // namespace detail

inline Term term_k() { return &detail::TermStore::instance().leaf_k; }
inline Term term_s() { return &detail::TermStore::instance().leaf_s; }
inline Term term_i() { return &detail::TermStore::instance().leaf_i; }

inline Term term_app(Term l, Term r) {
  auto& store = detail::TermStore::instance();
  auto key = std::make_pair(l, r);
  auto it = store.apps.find(key);
  if (it != store.apps.end()) return it->second;
  TermNode node{TAG_APP, l, r};
  std::uint64_t sz = std::uint64_t(1) + l->size + r->size;
  node.size = sz > detail::kSizeSat ? detail::kSizeSat : std::uint32_t(sz);
  std::uint64_t dp = std::uint64_t(1) + std::max(l->depth, r->depth);
  node.depth = dp > detail::kDepthSat ? detail::kDepthSat : std::uint32_t(dp);
  store.arena.push_back(node);
  Term t = &store.arena.back();
  store.apps.emplace(key, t);
  return t;
}

inline Integer cantor_pair(const Integer& x, const Integer& y) {
  Integer s = x + y;
  return s * (s + 1) / 2 + y;
}

inline std::pair<Integer, Integer> cantor_unpair(const Integer& z) {
  // w = floor((sqrt(8z + 1) - 1) / 2), exact for cpp_int.
  Integer disc = 8 * z + 1;
  Integer w = (boost::multiprecision::sqrt(disc) - 1) / 2;
  Integer t = w * (w + 1) / 2;
  Integer y = z - t;
  return {w - y, y};
}

namespace detail {

// Numerals double in bit length with every level of term depth, so cap
// materialization.  Guarding depth first keeps the recursion shallow.
constexpr std::uint32_t kMaxEncodeDepth = 64;
constexpr std::uint64_t kMaxCodeBits = std::uint64_t(1) << 22;

inline const Integer& encode_impl(Term t) {
  auto& store = TermStore::instance();
  auto it = store.numerals.find(t);
  if (it != store.numerals.end()) return it->second;
  Integer value;
  switch (t->tag) {
    case TAG_K: value = 0; break;
    case TAG_S: value = 1; break;
    case TAG_I: value = 2; break;
    default: {
      const Integer& a = encode_impl(t->left);
      const Integer& b = encode_impl(t->right);
      value = cantor_pair(a, b) + 3;
      if (boost::multiprecision::msb(value) + 1 > kMaxCodeBits)
        throw CodeTooLarge("code numeral exceeds the materialization bound");
      break;
    }
  }
  return store.numerals.emplace(t, std::move(value)).first->second;
}

}  // namespace detail

inline const Integer& encode(Term t) {
  if (t->depth > detail::kMaxEncodeDepth)
    throw CodeTooLarge("term too deep for numeral materialization");
  return detail::encode_impl(t);
}

inline Term decode(const Integer& n) {
  if (n < 0) throw ContractError("codes are naturals");
  if (n == 0) return term_k();
  if (n == 1) return term_s();
  if (n == 2) return term_i();
  auto& store = detail::TermStore::instance();
  auto it = store.terms.find(n);
  if (it != store.terms.end()) return it->second;
  auto [x, y] = cantor_unpair(n - 3);
  Term t = term_app(decode(x), decode(y));
  store.terms.emplace(n, t);
  // Seed the encode memo so round trips never recompute.
  store.numerals.emplace(t, n);
  return t;
}

// A code: a natural number in term representation.  Equality is pointer
// equality thanks to hash-consing; ordering compares numerals.
class Code {
 public:
  Code() : t_(term_k()) {}
  explicit Code(Term t) : t_(t) {
    if (!t_) throw ContractError("null term is not a code");
  }
  explicit Code(const Integer& n) : t_(decode(n)) {}
  template <std::integral N>
  explicit Code(N n) : t_(decode(Integer(n))) {}

  Term term() const { return t_; }
  const Integer& integer() const { return encode(t_); }

  bool operator==(const Code& o) const { return t_ == o.t_; }
  bool operator!=(const Code& o) const { return t_ != o.t_; }
  bool operator<(const Code& o) const {
    if (t_ == o.t_) return false;
    return integer() < o.integer();
  }

 private:
  Term t_;
};

struct CodeHash {
  std::size_t operator()(const Code& c) const {
    return std::hash<const void*>()(c.term());
  }
};

struct TermHash {
  std::size_t operator()(Term t) const { return std::hash<const void*>()(t); }
};

// --- rendering and parsing of term literals ------------------------------
//
// Concrete syntax: `K | S | I | (t u)`, juxtaposition associating to the
// left inside parentheses, bare naturals denoting decoded codes.

inline void show_term_rec(Term t, std::string& out, bool parens) {
  switch (t->tag) {
    case TAG_K: out += 'K'; return;
    case TAG_S: out += 'S'; return;
    case TAG_I: out += 'I'; return;
    default: break;
  }
  if (parens) out += '(';
  // Flatten the left spine: ((a b) c) prints as (a b c).
  std::vector<Term> args;
  Term head = t;
  while (head->tag == TAG_APP) {
    args.push_back(head->right);
    head = head->left;
  }
  show_term_rec(head, out, false);
  for (auto it = args.rbegin(); it != args.rend(); ++it) {
    out += ' ';
    show_term_rec(*it, out, true);
  }
  if (parens) out += ')';
}

inline std::string show_term(Term t) {
  std::string out;
  show_term_rec(t, out, t->tag == TAG_APP);
  return out;
}

// Decimal numeral when small enough to read, otherwise a deterministic
// structural summary (big codes routinely exceed any printable length).
inline std::string show_code(const Code& c) {
  Term t = c.term();
  if (t->depth <= 24) {
    try {
      const Integer& n = encode(t);
      if (boost::multiprecision::msb(n == 0 ? Integer(1) : n) < 128)
        return n.str();
    } catch (const CodeTooLarge&) {
    }
  }
  return "#<code size=" + std::to_string(t->size) +
         " depth=" + std::to_string(t->depth) + ">";
}

namespace detail {

struct TermParser {
  const std::string& src;
  std::size_t pos = 0;

  explicit TermParser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                src[pos] == '\n' || src[pos] == '\r'))
      ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("term literal: " + msg + " at offset " +
                     std::to_string(pos));
  }

  Term atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (c == 'K') { ++pos; return term_k(); }
    if (c == 'S') { ++pos; return term_s(); }
    if (c == 'I') { ++pos; return term_i(); }
    if (c >= '0' && c <= '9') {
      std::size_t start = pos;
      while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') ++pos;
      return decode(Integer(src.substr(start, pos - start)));
    }
    if (c == '(') {
      ++pos;
      Term t = sequence();
      skip_ws();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
      return t;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Term sequence() {
    Term t = atom();
    while (true) {
      skip_ws();
      if (pos >= src.size() || src[pos] == ')') return t;
      t = term_app(t, atom());
    }
  }
};

}  // namespace detail

inline Term parse_term(const std::string& text) {
  detail::TermParser p(text);
  Term t = p.atom();  // application needs parentheses at top level
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

}  // namespace perlab
