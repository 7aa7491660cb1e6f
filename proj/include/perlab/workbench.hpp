#pragma once

// The workbench surface: s-expression declaration files that name pers,
// families, functors and algebras, assert properties of them, and run the
// fixpoint / initial-algebra / monotonization constructions.  Reports are
// deterministic given the same document and budget.

#include "perlab/algebra.hpp"
#include "perlab/fixpoint.hpp"
#include "perlab/yoneda.hpp"

#include <cctype>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace perlab {

struct WorkbenchError : std::runtime_error {
  std::size_t line;
  std::size_t col;
  WorkbenchError(std::size_t l, std::size_t c, const std::string& msg)
      : std::runtime_error("line " + std::to_string(l) + ", column " +
                           std::to_string(c) + ": " + msg),
        line(l),
        col(c) {}
};

struct Sexp {
  bool list = false;
  std::string atom;         // meaningful when !list
  std::vector<Sexp> items;  // meaningful when list
  std::size_t line = 1;
  std::size_t col = 1;
};

namespace detail {

struct Reader {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw WorkbenchError(line, col, msg);
  }

  bool done() const { return pos >= text.size(); }

  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_blank() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  Sexp read_form() {
    skip_blank();
    if (done()) fail("unexpected end of input");
    Sexp s;
    s.line = line;
    s.col = col;
    if (peek() == '(') {
      s.list = true;
      advance();
      while (true) {
        skip_blank();
        if (done()) throw WorkbenchError(s.line, s.col, "unclosed '('");
        if (peek() == ')') {
          advance();
          return s;
        }
        s.items.push_back(read_form());
      }
    }
    if (peek() == ')') fail("unexpected ')'");
    while (!done()) {
      char c = peek();
      if (c == '(' || c == ')' || c == ';' ||
          std::isspace(static_cast<unsigned char>(c)))
        break;
      s.atom += c;
      advance();
    }
    return s;
  }
};

}  // namespace detail

inline std::vector<Sexp> parse_workbench(const std::string& text) {
  detail::Reader r{text};
  std::vector<Sexp> forms;
  while (true) {
    r.skip_blank();
    if (r.done()) return forms;
    forms.push_back(r.read_form());
  }
}

inline std::string show_universe(const UniverseSpec& s) {
  switch (s.kind) {
    case UniverseSpec::Kind::FirstCodes:
      return "codes:" + std::to_string(s.count);
    case UniverseSpec::Kind::TermsUpTo:
      return "terms:" + std::to_string(s.max_apps);
    case UniverseSpec::Kind::Explicit:
      return "explicit:" + std::to_string(s.explicit_codes.size());
  }
  return "?";
}

struct WorkbenchOptions {
  std::optional<UniverseSpec> universe;  // overrides the document
  std::optional<Fuel> fuel;              // overrides the document and env
  std::size_t max_iter = 64;
  bool trace = false;    // record fixpoint iteration chains in witnesses
  bool din = false;      // add the tracker-consumer comparison to runs
  bool timings = false;  // stamp items with the wall time of their form
};

struct WorkbenchResult {
  Report report;
  BudgetPtr budget;  // null when no form ever needed one
};

class Workbench {
 public:
  explicit Workbench(WorkbenchOptions opts = {}) : opts_(std::move(opts)) {}

  WorkbenchResult run(const std::vector<Sexp>& forms) {
    WorkbenchResult out;
    for (const Sexp& f : forms) {
      std::size_t before = out.report.items.size();
      auto t0 = std::chrono::steady_clock::now();
      eval_form(f, out.report, /*declarations_only=*/false);
      if (opts_.timings) {
        // Every item carries the wall time of the whole form that made it.
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        for (std::size_t i = before; i < out.report.items.size(); ++i)
          out.report.items[i].ms = ms;
      }
    }
    out.budget = budget_;
    return out;
  }

  // Bind names and budget but skip asserts and runs; used by the CLI
  // subcommands that drive one construction directly.
  void declare(const std::vector<Sexp>& forms) {
    Report ignored;
    for (const Sexp& f : forms) eval_form(f, ignored, /*declarations_only=*/true);
  }

  BudgetPtr budget_in_scope(std::size_t line = 0, std::size_t col = 0) {
    return ensure_budget(line, col);
  }

  const Per& per(const std::string& name) {
    return resolve_per(name, 0, 0);
  }

  RealizableFunctor functor(const std::string& name) {
    return make_functor(resolve_functor(name, 0, 0));
  }

  std::vector<Per> per_family(const std::string& name) {
    return resolve_per_family(name, 0, 0);
  }

  std::vector<Algebra> algebra_family(const std::string& name,
                                      const std::string& functor_name) {
    return resolve_algebra_family(name, functor_name, 0, 0);
  }

  void run_fixpoint(const std::string& functor_name, Report& rep) {
    fixpoint_items(functor_name, 0, 0, rep);
  }

  void run_initial_algebra(const std::string& functor_name,
                           const std::string& family_name, Report& rep) {
    initial_algebra_items(functor_name, family_name, 0, 0, rep);
  }

  void run_monotonize(const std::string& functor_name,
                      const std::string& family_name, Report& rep) {
    monotonize_items(functor_name, family_name, 0, 0, rep);
  }

  void run_check_all(Report& rep) { check_all_items(rep); }

 private:
  WorkbenchOptions opts_;
  std::map<std::string, Per> pers_;
  std::map<std::string, FunctorPtr> functors_;
  std::map<std::string, std::pair<std::string, Algebra>> algebras_;
  std::map<std::string, std::vector<std::string>> families_;
  std::map<std::string, const char*> kinds_;
  std::vector<std::string> per_order_;
  std::vector<std::string> functor_order_;
  std::vector<std::string> algebra_order_;
  std::optional<UniverseSpec> doc_universe_;
  std::optional<Fuel> doc_fuel_;
  BudgetPtr budget_;

  [[noreturn]] static void fail(const Sexp& at, const std::string& msg) {
    throw WorkbenchError(at.line, at.col, msg);
  }

  static const Sexp& nth(const Sexp& form, std::size_t i,
                         const std::string& what) {
    if (!form.list || form.items.size() <= i)
      fail(form, "expected " + what);
    return form.items[i];
  }

  static const std::string& atom_of(const Sexp& s, const std::string& what) {
    if (s.list) fail(s, "expected " + what + ", found a list");
    return s.atom;
  }

  static std::uint64_t number(const Sexp& s) {
    const std::string& a = atom_of(s, "a number");
    if (a.empty() || a.find_first_not_of("0123456789") != std::string::npos)
      fail(s, "expected a number, found '" + a + "'");
    try {
      return std::stoull(a);
    } catch (const std::out_of_range&) {
      fail(s, "number '" + a + "' is out of range");
    }
  }

  static bool headed(const Sexp& s, const char* head) {
    return s.list && !s.items.empty() && !s.items[0].list &&
           s.items[0].atom == head;
  }

  void declare_name(const Sexp& at, const std::string& name,
                    const char* kind) {
    auto [it, fresh] = kinds_.emplace(name, kind);
    if (!fresh)
      fail(at, "duplicate name '" + name + "' (already a " +
                   std::string(it->second) + ")");
  }

  const Per& resolve_per(const std::string& name, std::size_t line,
                         std::size_t col) {
    auto it = pers_.find(name);
    if (it == pers_.end())
      throw WorkbenchError(line, col, "unknown per '" + name + "'");
    return it->second;
  }

  const FunctorPtr& resolve_functor(const std::string& name, std::size_t line,
                                    std::size_t col) {
    auto it = functors_.find(name);
    if (it == functors_.end())
      throw WorkbenchError(line, col, "unknown functor '" + name + "'");
    return it->second;
  }

  std::vector<Per> resolve_per_family(const std::string& name,
                                      std::size_t line, std::size_t col) {
    auto it = families_.find(name);
    if (it == families_.end())
      throw WorkbenchError(line, col, "unknown family '" + name + "'");
    std::vector<Per> out;
    out.reserve(it->second.size());
    for (const std::string& member : it->second)
      out.push_back(resolve_per(member, line, col));
    return out;
  }

  std::vector<Algebra> resolve_algebra_family(const std::string& name,
                                              const std::string& functor_name,
                                              std::size_t line,
                                              std::size_t col) {
    auto it = families_.find(name);
    if (it == families_.end())
      throw WorkbenchError(line, col, "unknown family '" + name + "'");
    std::vector<Algebra> out;
    out.reserve(it->second.size());
    for (const std::string& member : it->second) {
      auto ait = algebras_.find(member);
      if (ait == algebras_.end())
        throw WorkbenchError(line, col,
                             "family member '" + member + "' is not an algebra");
      if (ait->second.first != functor_name)
        throw WorkbenchError(line, col, "algebra '" + member +
                                            "' was declared for functor '" +
                                            ait->second.first + "', not '" +
                                            functor_name + "'");
      out.push_back(ait->second.second);
    }
    return out;
  }

  BudgetPtr ensure_budget(std::size_t line, std::size_t col) {
    if (budget_) return budget_;
    std::optional<UniverseSpec> u =
        opts_.universe ? opts_.universe : doc_universe_;
    std::optional<Fuel> f = opts_.fuel ? opts_.fuel : doc_fuel_;
    if (!u) throw WorkbenchError(line, col, "no universe in scope");
    if (!f) throw WorkbenchError(line, col, "no fuel in scope");
    budget_ = make_budget(*u, *f);
    return budget_;
  }

  FunctorPtr parse_functor_expr(const Sexp& s) {
    if (!s.list) {
      if (s.atom == "id") return fid();
      fail(s, "unknown functor expression '" + s.atom + "'");
    }
    const std::string& head = atom_of(nth(s, 0, "a functor form"),
                                      "a functor keyword");
    if (head == "const") {
      if (s.items.size() != 2) fail(s, "(const P) takes one per name");
      return fconst(resolve_per(atom_of(s.items[1], "a per name"),
                                s.items[1].line, s.items[1].col));
    }
    if (head == "prod") {
      if (s.items.size() != 3) fail(s, "(prod E E) takes two expressions");
      return fprod(parse_functor_expr(s.items[1]),
                   parse_functor_expr(s.items[2]));
    }
    if (head == "exp") {
      if (s.items.size() != 3) fail(s, "(exp P E) takes a per and an expression");
      return fexp(resolve_per(atom_of(s.items[1], "a per name"),
                              s.items[1].line, s.items[1].col),
                  parse_functor_expr(s.items[2]));
    }
    fail(s, "unknown functor expression '(" + head + " ...)'");
  }

  void eval_per(const Sexp& form) {
    const std::string& name = atom_of(nth(form, 1, "a per name"), "a per name");
    const Sexp& carrier_form = nth(form, 2, "(carrier ...)");
    const Sexp& classes_form = nth(form, 3, "(classes ...)");
    if (!headed(carrier_form, "carrier")) fail(carrier_form, "expected (carrier n ...)");
    if (!headed(classes_form, "classes")) fail(classes_form, "expected (classes (n ...) ...)");
    if (form.items.size() != 4) fail(form, "per form has extra parts");

    std::vector<Code> carrier;
    for (std::size_t i = 1; i < carrier_form.items.size(); ++i)
      carrier.push_back(Code(number(carrier_form.items[i])));
    std::vector<Code> sorted = carrier;
    sort_unique(sorted);
    if (sorted.size() != carrier.size())
      fail(carrier_form, "carrier repeats a code");

    std::vector<std::vector<Code>> blocks;
    std::size_t covered = 0;
    for (std::size_t i = 1; i < classes_form.items.size(); ++i) {
      const Sexp& cls = classes_form.items[i];
      if (!cls.list || cls.items.empty()) fail(cls, "expected a class (n ...)");
      std::vector<Code> blk;
      for (const Sexp& n : cls.items) {
        Code c(number(n));
        if (!std::binary_search(sorted.begin(), sorted.end(), c))
          fail(n, "class code " + n.atom + " is not in the carrier");
        blk.push_back(c);
      }
      covered += blk.size();
      blocks.push_back(std::move(blk));
    }
    if (covered != carrier.size())
      fail(classes_form, "classes do not partition the carrier");
    Per p;
    try {
      p = make_per(std::move(blocks));
    } catch (const ContractError& e) {
      fail(classes_form, e.what());
    }
    declare_name(nth(form, 1, "name"), name, "per");
    pers_.emplace(name, std::move(p));
    per_order_.push_back(name);
  }

  void eval_family(const Sexp& form) {
    const std::string& name =
        atom_of(nth(form, 1, "a family name"), "a family name");
    std::vector<std::string> members;
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const std::string& m = atom_of(form.items[i], "a member name");
      if (!kinds_.count(m))
        fail(form.items[i], "unknown family member '" + m + "'");
      members.push_back(m);
    }
    declare_name(nth(form, 1, "name"), name, "family");
    families_.emplace(name, std::move(members));
  }

  void eval_universe(const Sexp& form) {
    if (budget_) fail(form, "universe is already fixed for this run");
    if (doc_universe_) fail(form, "duplicate universe declaration");
    const Sexp& spec = nth(form, 1, "(codes N) or (terms K)");
    if (headed(spec, "codes") && spec.items.size() == 2)
      doc_universe_ = UniverseSpec::first_codes(number(spec.items[1]));
    else if (headed(spec, "terms") && spec.items.size() == 2)
      doc_universe_ = UniverseSpec::terms_up_to(
          static_cast<unsigned>(number(spec.items[1])));
    else
      fail(spec, "expected (codes N) or (terms K)");
  }

  void eval_fuel(const Sexp& form) {
    if (budget_) fail(form, "fuel is already fixed for this run");
    if (doc_fuel_) fail(form, "duplicate fuel declaration");
    std::uint64_t n = number(nth(form, 1, "a step count"));
    if (n == 0) fail(form, "fuel must be at least 1 step");
    doc_fuel_ = fuel(n);
  }

  void eval_functor(const Sexp& form) {
    const std::string& name =
        atom_of(nth(form, 1, "a functor name"), "a functor name");
    if (form.items.size() != 3) fail(form, "(functor NAME EXPR) takes one expression");
    FunctorPtr e = parse_functor_expr(form.items[2]);
    declare_name(nth(form, 1, "name"), name, "functor");
    functors_.emplace(name, std::move(e));
    functor_order_.push_back(name);
  }

  void eval_algebra(const Sexp& form) {
    const std::string& name =
        atom_of(nth(form, 1, "an algebra name"), "an algebra name");
    const Sexp* f_form = nullptr;
    const Sexp* carrier_form = nullptr;
    const Sexp* structure_form = nullptr;
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const Sexp& part = form.items[i];
      if (headed(part, "functor") && part.items.size() == 2)
        f_form = &part;
      else if (headed(part, "carrier") && part.items.size() == 2)
        carrier_form = &part;
      else if (headed(part, "structure") && part.items.size() == 2)
        structure_form = &part;
      else
        fail(part, "expected (functor F), (carrier P) or (structure CODE)");
    }
    if (!f_form || !carrier_form || !structure_form)
      fail(form, "algebra needs (functor F), (carrier P) and (structure CODE)");

    const std::string& fname = atom_of(f_form->items[1], "a functor name");
    const FunctorPtr& e =
        resolve_functor(fname, f_form->items[1].line, f_form->items[1].col);
    const Per& carrier =
        resolve_per(atom_of(carrier_form->items[1], "a per name"),
                    carrier_form->items[1].line, carrier_form->items[1].col);
    Code structure(number(structure_form->items[1]));
    BudgetPtr b = ensure_budget(form.line, form.col);
    Algebra a;
    try {
      a = make_algebra(make_functor(e), carrier, structure, b);
    } catch (const ContractError& err) {
      fail(*structure_form, err.what());
    }
    declare_name(nth(form, 1, "name"), name, "algebra");
    algebras_.emplace(name, std::make_pair(fname, std::move(a)));
    algebra_order_.push_back(name);
  }

  std::vector<Per> declared_lattice() const {
    std::vector<Per> out;
    out.reserve(per_order_.size());
    for (const std::string& n : per_order_) out.push_back(pers_.at(n));
    return out;
  }

  void eval_assert(const Sexp& form, Report& rep) {
    const Sexp& test = nth(form, 1, "an assert body");
    if (!test.list || test.items.empty())
      fail(test, "expected an assert form like (subper A B)");
    const std::string& head = atom_of(test.items[0], "an assert keyword");
    BudgetPtr b = ensure_budget(form.line, form.col);

    if (head == "subper") {
      if (test.items.size() != 3) fail(test, "(subper A B) takes two per names");
      const Per& a = resolve_per(atom_of(test.items[1], "a per name"),
                                 test.items[1].line, test.items[1].col);
      const Per& s = resolve_per(atom_of(test.items[2], "a per name"),
                                 test.items[2].line, test.items[2].col);
      CheckResult& item = rep.add("assert subper " + test.items[1].atom + " " +
                                  test.items[2].atom);
      item.checked = a.dom_size();
      if (!subper(a, s)) {
        item.verdict = Verdict::No;
        for (const auto& blk : a.blocks) {
          for (const Code& c : blk)
            if (!s.related(blk.front(), c)) {
              item.witness = show_code(blk.front()) + " ~ " + show_code(c) +
                             " in " + test.items[1].atom + " but not in " +
                             test.items[2].atom;
              return;
            }
        }
        item.witness = "inclusion fails";
      }
      return;
    }

    if (head == "morphism") {
      if (test.items.size() != 4)
        fail(test, "(morphism N A B) takes a code and two per names");
      Code t(number(test.items[1]));
      const Per& a = resolve_per(atom_of(test.items[2], "a per name"),
                                 test.items[2].line, test.items[2].col);
      const Per& s = resolve_per(atom_of(test.items[3], "a per name"),
                                 test.items[3].line, test.items[3].col);
      CheckResult& item =
          rep.add("assert morphism " + test.items[1].atom + " " +
                  test.items[2].atom + " " + test.items[3].atom);
      TrackReport tr = check_tracker(a, s, t, b);
      item.verdict = tr.verdict;
      item.checked = a.dom_size();
      for (const Code& c : tr.undecided)
        item.excluded_by_fuel.push_back(show_code(c));
      if (tr.verdict == Verdict::No) {
        item.witness = tr.witness ? "acts wrongly on " +
                                        show_code(tr.witness->first) + " ~ " +
                                        show_code(tr.witness->second)
                                  : "tracking fails";
      }
      return;
    }

    if (head == "monotone") {
      if (test.items.size() != 2) fail(test, "(monotone F) takes a functor name");
      const FunctorPtr& e = resolve_functor(atom_of(test.items[1], "a functor name"),
                                            test.items[1].line, test.items[1].col);
      CheckResult& item = rep.add("assert monotone " + test.items[1].atom);
      MonotoneReport mr = check_monotone(e, declared_lattice(), b);
      item.checked = mr.checked;
      if (!mr.monotone) {
        item.verdict = Verdict::No;
        item.witness = mr.witness ? "inclusion " + show_per(mr.witness->first) +
                                        " <= " + show_per(mr.witness->second) +
                                        " is not preserved"
                                  : "monotonicity fails";
      }
      return;
    }

    if (head == "realizable") {
      if (test.items.size() != 2) fail(test, "(realizable F) takes a functor name");
      const FunctorPtr& e = resolve_functor(atom_of(test.items[1], "a functor name"),
                                            test.items[1].line, test.items[1].col);
      CheckResult& item = rep.add("assert realizable " + test.items[1].atom);
      Report sub = check_realizable(make_functor(e), declared_lattice(), b);
      item.verdict = sub.overall();
      for (const CheckResult& s : sub.items) {
        item.checked += s.checked;
        for (const std::string& ex : s.excluded_by_fuel)
          item.excluded_by_fuel.push_back(ex);
        if (s.verdict == Verdict::No && item.witness.empty())
          item.witness = s.name + (s.witness.empty() ? "" : ": " + s.witness);
      }
      if (item.verdict == Verdict::No && item.witness.empty())
        item.witness = "functor laws fail";
      return;
    }

    if (head == "fixpoint") {
      if (test.items.size() != 3)
        fail(test, "(fixpoint F P) takes a functor name and a per name");
      const FunctorPtr& e = resolve_functor(atom_of(test.items[1], "a functor name"),
                                            test.items[1].line, test.items[1].col);
      const Per& expected = resolve_per(atom_of(test.items[2], "a per name"),
                                        test.items[2].line, test.items[2].col);
      CheckResult& item = rep.add("assert fixpoint " + test.items[1].atom +
                                  " " + test.items[2].atom);
      try {
        FixpointResult fr = kleene_lfp(e, b, opts_.max_iter);
        item.checked = fr.iterations;
        if (fr.fixobject != expected) {
          item.verdict = Verdict::No;
          item.witness = "least fixpoint is " + show_per(fr.fixobject);
        } else if (!fr.fixmap_verified) {
          item.verdict = Verdict::Undecided;
          item.excluded_by_fuel.push_back(
              "identity tracking unverified at this budget");
        }
      } catch (const ContractError& err) {
        item.verdict = Verdict::No;
        item.witness = err.what();
      }
      return;
    }

    fail(test, "unknown assert form '" + head + "'");
  }

  static void append_prefixed(Report& rep, const std::string& prefix,
                              const Report& sub) {
    for (CheckResult item : sub.items) {
      item.name = prefix + item.name;
      rep.items.push_back(std::move(item));
    }
  }

  void fixpoint_items(const std::string& fname, std::size_t line,
                      std::size_t col, Report& rep) {
    const FunctorPtr& e = resolve_functor(fname, line, col);
    BudgetPtr b = ensure_budget(line, col);
    CheckResult& item = rep.add("fixpoint of " + fname);
    try {
      FixpointResult fr = kleene_lfp(e, b, opts_.max_iter);
      item.checked = fr.iterations;
      item.witness = "converged to " + show_per(fr.fixobject) + " in " +
                     std::to_string(fr.iterations) + " iterations";
      if (opts_.trace) {
        item.witness += "; chain";
        for (const Per& p : fr.trace) item.witness += " " + show_per(p);
      }
      CheckResult& fix = rep.add("fixpoint identity tracking for " + fname);
      fix.checked = fr.fixobject.dom_size();
      if (!fr.fixmap_verified) {
        fix.verdict = Verdict::Undecided;
        fix.excluded_by_fuel.push_back(
            "identity tracking unverified at this budget");
      }
    } catch (const ContractError& err) {
      item.verdict = Verdict::No;
      item.witness = err.what();
    }
  }

  void initial_algebra_items(const std::string& fname,
                             const std::string& family_name, std::size_t line,
                             std::size_t col, Report& rep) {
    RealizableFunctor f = make_functor(resolve_functor(fname, line, col));
    std::vector<Algebra> family =
        resolve_algebra_family(family_name, fname, line, col);
    BudgetPtr b = ensure_budget(line, col);
    std::string prefix = fname + "/" + family_name + ": ";

    R0Result r0 = r0_approx(f, family, b);
    CheckResult& carrier = rep.add(prefix + "canonical carrier");
    carrier.checked = b->universe.size();
    carrier.witness = show_per(r0.per);
    for (std::size_t i = 0; i < r0.excluded_by_fuel; ++i)
      carrier.excluded_by_fuel.push_back("universe code stuck mid-cone");

    StructureMap c = structure_map_c(f, family, r0, b);
    append_prefixed(rep, prefix, c.report);
    append_prefixed(rep, prefix, check_initiality(f, family, r0, c.code, b));

    if (opts_.din && !family.empty()) {
      DinResult din = din_experiment(f, family, r0.per, b);
      CheckResult& item = rep.add(prefix + "tracker-consumer comparison");
      item.witness = din.equal ? "agrees with the canonical carrier"
                               : din.witness;
    }
  }

  void monotonize_items(const std::string& fname,
                        const std::string& family_name, std::size_t line,
                        std::size_t col, Report& rep) {
    RealizableFunctor f = make_functor(resolve_functor(fname, line, col));
    std::vector<Per> family = resolve_per_family(family_name, line, col);
    BudgetPtr b = ensure_budget(line, col);
    std::string prefix = fname + "/" + family_name + ": ";

    MonotonizeResult m = monotonize(f, family, b);
    CheckResult& base = rep.add(prefix + "monotone " + fname);
    base.checked = m.base.checked;
    if (!m.base.monotone) {
      base.verdict = Verdict::No;
      base.witness = "inclusion " + show_per(m.base.witness->first) + " <= " +
                     show_per(m.base.witness->second) + " is not preserved";
    }
    CheckResult& star = rep.add(prefix + "monotone " + fname + "*");
    star.checked = m.star.checked;
    if (!m.star.monotone) {
      star.verdict = Verdict::No;
      star.witness = "inclusion " + show_per(m.star.witness->first) + " <= " +
                     show_per(m.star.witness->second) + " is not preserved";
    }
    append_prefixed(rep, prefix, m.iso);
  }

  void check_all_items(Report& rep) {
    BudgetPtr b = ensure_budget(0, 0);
    std::vector<Per> lattice = declared_lattice();
    for (const std::string& name : functor_order_) {
      RealizableFunctor f = make_functor(functors_.at(name));
      append_prefixed(rep, name + ": ", check_realizable(f, lattice, b));
      CheckResult& mono = rep.add(name + ": monotone over declared pers");
      MonotoneReport mr = check_monotone(f.expr, lattice, b);
      mono.checked = mr.checked;
      if (!mr.monotone) {
        mono.verdict = Verdict::No;
        mono.witness = "inclusion " + show_per(mr.witness->first) + " <= " +
                       show_per(mr.witness->second) + " is not preserved";
      }
    }
    for (const std::string& name : algebra_order_) {
      const auto& [fname, alg] = algebras_.at(name);
      RealizableFunctor f = make_functor(functors_.at(fname));
      CheckResult& item = rep.add(name + ": structure tracks");
      Per image = eval_object(f.expr, alg.carrier, b);
      TrackReport tr = check_tracker(image, alg.carrier, alg.structure, b);
      item.verdict = tr.verdict;
      item.checked = image.dom_size();
      for (const Code& c : tr.undecided)
        item.excluded_by_fuel.push_back(show_code(c));
      if (tr.verdict == Verdict::No)
        item.witness = "structure stops tracking";
    }
  }

  void eval_run(const Sexp& form, Report& rep) {
    const std::string& what = atom_of(nth(form, 1, "a run keyword"), "a run keyword");
    if (what == "fixpoint") {
      const Sexp& f = nth(form, 2, "a functor name");
      fixpoint_items(atom_of(f, "a functor name"), f.line, f.col, rep);
      return;
    }
    if (what == "initial-algebra") {
      const Sexp& f = nth(form, 2, "a functor name");
      const Sexp& fam = nth(form, 3, "a family name");
      initial_algebra_items(atom_of(f, "a functor name"),
                            atom_of(fam, "a family name"), f.line, f.col, rep);
      return;
    }
    if (what == "monotonize") {
      const Sexp& f = nth(form, 2, "a functor name");
      const Sexp& fam = nth(form, 3, "a family name");
      monotonize_items(atom_of(f, "a functor name"),
                       atom_of(fam, "a family name"), f.line, f.col, rep);
      return;
    }
    if (what == "check-all") {
      ensure_budget(form.line, form.col);
      check_all_items(rep);
      return;
    }
    fail(form, "unknown run form '" + what + "'");
  }

  void eval_form(const Sexp& form, Report& rep, bool declarations_only) {
    if (!form.list || form.items.empty() || form.items[0].list)
      fail(form, "expected a form like (per ...), (assert ...), (run ...)");
    const std::string& head = form.items[0].atom;
    if (head == "per") return eval_per(form);
    if (head == "family") return eval_family(form);
    if (head == "universe") return eval_universe(form);
    if (head == "fuel") return eval_fuel(form);
    if (head == "functor") return eval_functor(form);
    if (head == "algebra") return eval_algebra(form);
    if (head == "assert") {
      if (!declarations_only) eval_assert(form, rep);
      return;
    }
    if (head == "run") {
      if (!declarations_only) eval_run(form, rep);
      return;
    }
    fail(form, "unknown form '" + head + "'");
  }
};

inline WorkbenchResult run_checks(const std::vector<Sexp>& forms,
                                  const WorkbenchOptions& opts = {}) {
  Workbench wb(opts);
  return wb.run(forms);
}

inline const char* status_of(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "pass";
    case Verdict::No:
      return "fail";
    case Verdict::Undecided:
      return "undecided";
  }
  return "?";
}

inline std::string emit_json(const Report& rep, const BudgetPtr& budget,
                             int version = 1) {
  nlohmann::ordered_json doc;
  doc["version"] = version;
  doc["budget"]["universe"] = budget ? show_universe(budget->spec) : "none";
  doc["budget"]["fuel"] = budget ? budget->fuel.max_steps : 0;
  doc["checks"] = nlohmann::ordered_json::array();
  for (const CheckResult& item : rep.items) {
    nlohmann::ordered_json c;
    c["name"] = item.name;
    c["status"] = status_of(item.verdict);
    c["witness"] = item.witness;
    c["checked"] = item.checked;
    c["excluded_by_fuel"] = item.excluded_by_fuel;
    c["ms"] = item.ms;
    doc["checks"].push_back(std::move(c));
  }
  return doc.dump(2) + "\n";
}

inline std::string emit_text(const Report& rep, const BudgetPtr& budget) {
  std::ostringstream out;
  for (const CheckResult& item : rep.items) {
    out << status_of(item.verdict);
    for (std::size_t i = std::string(status_of(item.verdict)).size(); i < 10;
         ++i)
      out << ' ';
    out << item.name;
    if (!item.witness.empty()) out << "  [" << item.witness << "]";
    out << "  (checked " << item.checked;
    if (!item.excluded_by_fuel.empty())
      out << ", " << item.excluded_by_fuel.size() << " excluded by fuel";
    out << ")";
    if (item.ms > 0) out << "  " << item.ms << "ms";
    out << "\n";
  }
  out << "----\n"
      << rep.items.size() << " checks: " << rep.count(Verdict::Yes)
      << " pass, " << rep.count(Verdict::No) << " fail, "
      << rep.count(Verdict::Undecided) << " undecided\n";
  if (budget)
    out << "budget universe=" << show_universe(budget->spec)
        << " fuel=" << budget->fuel.max_steps << "\n";
  return out.str();
}

inline int report_exit_code(const Report& rep) {
  return (rep.count(Verdict::No) == 0 && rep.count(Verdict::Undecided) == 0)
             ? 0
             : 1;
}

}  // namespace perlab
