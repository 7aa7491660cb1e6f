#pragma once

// Bracket abstraction: compiling lambda-style definitions with named
// variables down to closed S/K/I terms.  The translation is the plain
// three-clause one (no eta step):
//
//   [x] x      = I
//   [x] M      = K M            when x does not occur in M
//   [x] (M N)  = S [x]M [x]N    otherwise
//
// plus a handful of library combinators built with it.

#include "core.hpp"
#include "eval.hpp"
#include "term.hpp"

#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace perlab {

// Terms that may mention named variables.  Transient scaffolding only:
// everything is compiled to closed Terms before use.
struct OpenNode;
using Open = std::shared_ptr<const OpenNode>;

struct OpenNode {
  enum Kind { Var, Base, Apply } kind;
  std::string name;  // Var
  Term base = nullptr;  // Base
  Open left, right;  // Apply
};

inline Open ovar(std::string name) {
  auto n = std::make_shared<OpenNode>();
  n->kind = OpenNode::Var;
  n->name = std::move(name);
  return n;
}

inline Open olift(Term t) {
  auto n = std::make_shared<OpenNode>();
  n->kind = OpenNode::Base;
  n->base = t;
  return n;
}

inline Open olift(const Code& c) { return olift(c.term()); }

inline Open oapp(Open f, Open x) {
  auto n = std::make_shared<OpenNode>();
  n->kind = OpenNode::Apply;
  n->left = std::move(f);
  n->right = std::move(x);
  return n;
}

inline Open oapp(Open f, Open x, Open y) {
  return oapp(oapp(std::move(f), std::move(x)), std::move(y));
}

inline Open oapp(Open f, Open x, Open y, Open z) {
  return oapp(oapp(std::move(f), std::move(x), std::move(y)), std::move(z));
}

inline bool mentions(const Open& t, const std::string& name) {
  switch (t->kind) {
    case OpenNode::Var: return t->name == name;
    case OpenNode::Base: return false;
    default: return mentions(t->left, name) || mentions(t->right, name);
  }
}

inline Open abstract_var(const std::string& name, const Open& body) {
  if (body->kind == OpenNode::Var && body->name == name) return olift(term_i());
  if (!mentions(body, name)) return oapp(olift(term_k()), body);
  // body must be an application here: a lone variable either matched the
  // first clause or does not mention `name`.
  return oapp(olift(term_s()), abstract_var(name, body->left),
              abstract_var(name, body->right));
}

inline Term close_term(const Open& t) {
  switch (t->kind) {
    case OpenNode::Var:
      throw UnboundVariable("unbound variable '" + t->name + "'");
    case OpenNode::Base:
      return t->base;
    default:
      return term_app(close_term(t->left), close_term(t->right));
  }
}

// lambda({"x","y"}, body) compiles \x.\y.body to a closed term.
inline Term lambda(std::initializer_list<std::string> vars, Open body) {
  std::vector<std::string> vs(vars);
  for (auto it = vs.rbegin(); it != vs.rend(); ++it)
    body = abstract_var(*it, body);
  return close_term(body);
}

inline Code lambda_code(std::initializer_list<std::string> vars, Open body) {
  return Code(lambda(vars, std::move(body)));
}

// ---- library combinators ---------------------------------------------------

inline Code code_k() { return Code(term_k()); }
inline Code code_s() { return Code(term_s()); }
inline Code code_i() { return Code(term_i()); }

// B = S (K S) K, so B f g x reduces to f (g x).
inline Code code_b() {
  static const Term b =
      term_app(term_app(term_s(), term_app(term_k(), term_s())), term_k());
  return Code(b);
}

// comp(f, g): the unreduced term B f g, a code for the composite of the
// functions coded by f and g.
inline Code comp(const Code& f, const Code& g) {
  return Code(term_app(term_app(code_b().term(), f.term()), g.term()));
}

// PAIR = \x.\y.\z. z x y; FST/SND select via K and K I.
inline Code code_pair() {
  static const Term p =
      lambda({"x", "y", "z"}, oapp(ovar("z"), ovar("x"), ovar("y")));
  return Code(p);
}

inline Code code_fst() {
  static const Term t = lambda({"p"}, oapp(ovar("p"), olift(term_k())));
  return Code(t);
}

inline Code code_snd() {
  static const Term t = lambda(
      {"p"}, oapp(ovar("p"), olift(term_app(term_k(), term_i()))));
  return Code(t);
}

// pair_of(a, b): the normal form \z. z a b directly, no reduction needed.
inline Code pair_of(const Code& a, const Code& b) {
  return Code(lambda({"z"}, oapp(ovar("z"), olift(a), olift(b))));
}

// projection(a) = \x. x a = S I (K a): feed a fixed argument to a function.
inline Code projection(const Code& a) {
  return Code(lambda({"x"}, oapp(ovar("x"), olift(a))));
}

}  // namespace perlab
