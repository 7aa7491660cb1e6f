// perlab command-line driver: run workbench files, drive the fixpoint /
// initial-algebra / monotonization constructions by name, and poke at the
// underlying combinatory algebra (eval / encode / decode).

#include <CLI11.hpp>

#include "perlab/workbench.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace perlab;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

UniverseSpec parse_universe_flag(const std::string& text) {
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::string kind = text.substr(0, colon);
    std::string num = text.substr(colon + 1);
    if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos) {
      if (kind == "codes") return UniverseSpec::first_codes(std::stoull(num));
      if (kind == "terms")
        return UniverseSpec::terms_up_to(static_cast<unsigned>(std::stoull(num)));
    }
  }
  throw CLI::ValidationError("--universe", "expected codes:N or terms:K");
}

struct CommonFlags {
  std::string file;
  std::string universe;
  std::uint64_t fuel_steps = 0;
  std::uint64_t seed = 0;
  std::size_t max_iter = 64;
  std::string format = "text";
  bool timings = false;

  void attach(CLI::App* cmd, bool with_file = true) {
    if (with_file)
      cmd->add_option("file", file, "workbench file")
          ->required()
          ->check(CLI::ExistingFile);
    cmd->add_option("--fuel", fuel_steps,
                    "evaluation step budget (overrides the file)")
        ->envname("PERLAB_FUEL");
    cmd->add_option("--universe", universe,
                    "universe size, codes:N or terms:K (overrides the file)");
    cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", seed,
                    "seed for sampled property checks (exhaustive checks "
                    "ignore it)");
    cmd->add_option("--max-iter", max_iter, "fixpoint iteration cap");
    cmd->add_flag("--timings", timings,
                  "record wall time per form (breaks byte-identical output)");
  }

  WorkbenchOptions options() const {
    WorkbenchOptions opts;
    if (!universe.empty()) opts.universe = parse_universe_flag(universe);
    if (fuel_steps > 0) opts.fuel = fuel(fuel_steps);
    opts.max_iter = max_iter;
    opts.timings = timings;
    return opts;
  }

  int finish(const Report& rep, const BudgetPtr& budget) const {
    std::cout << (format == "json" ? emit_json(rep, budget)
                                   : emit_text(rep, budget));
    return report_exit_code(rep);
  }
};

// The named-construction subcommands skip the file's own asserts and runs:
// declarations bind, then the one requested construction executes.
int run_construction(const CommonFlags& flags, WorkbenchOptions opts,
                     const std::function<void(Workbench&, Report&)>& body) {
  Workbench wb(std::move(opts));
  wb.declare(parse_workbench(slurp(flags.file)));
  Report rep;
  auto t0 = std::chrono::steady_clock::now();
  body(wb, rep);
  if (flags.timings) {
    double ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    for (CheckResult& item : rep.items) item.ms = ms;
  }
  return flags.finish(rep, wb.budget_in_scope());
}

Fuel eval_fuel_flag(std::uint64_t steps) {
  return fuel(steps == 0 ? 10000 : steps);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perlab: a bounded realizability workbench over SKI codes"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  bool run_trace = false;
  bool run_din = false;
  CLI::App* cmd_run = app.add_subcommand(
      "run", "execute every form of a workbench file in order");
  run_flags.attach(cmd_run);
  cmd_run->add_flag("--trace", run_trace, "include fixpoint chains in witnesses");
  cmd_run->add_flag("--din-experiment", run_din,
                    "add the tracker-consumer carrier comparison");

  CommonFlags fix_flags;
  std::string fix_functor;
  bool fix_trace = false;
  CLI::App* cmd_fix = app.add_subcommand(
      "fixpoint", "iterate a declared functor to its least fixed per");
  fix_flags.attach(cmd_fix);
  cmd_fix->add_option("--functor", fix_functor, "declared functor name")
      ->required();
  cmd_fix->add_flag("--trace", fix_trace, "show the iteration chain");

  CommonFlags init_flags;
  std::string init_functor;
  std::string init_family;
  bool init_din = false;
  CLI::App* cmd_init = app.add_subcommand(
      "initial-algebra",
      "build the canonical recursion carrier for a functor over a family of "
      "algebras and verify initiality");
  init_flags.attach(cmd_init);
  cmd_init->add_option("--functor", init_functor, "declared functor name")
      ->required();
  cmd_init->add_option("--family", init_family, "declared family of algebras")
      ->required();
  cmd_init->add_flag("--din-experiment", init_din,
                     "add the tracker-consumer carrier comparison");

  CommonFlags mono_flags;
  std::string mono_functor;
  std::string mono_family;
  CLI::App* cmd_mono = app.add_subcommand(
      "monotonize",
      "check a functor and its transformation companion for monotonicity and "
      "verify the evaluation isomorphism");
  mono_flags.attach(cmd_mono);
  cmd_mono->add_option("--functor", mono_functor, "declared functor name")
      ->required();
  cmd_mono->add_option("--family", mono_family, "declared family of pers")
      ->required();

  std::vector<std::string> eval_terms;
  std::uint64_t eval_steps = 0;
  CLI::App* cmd_eval = app.add_subcommand(
      "eval", "apply term literals left to right and print the normal form");
  cmd_eval->add_option("terms", eval_terms, "term literals, e.g. '(K S)' or 15")
      ->required()
      ->expected(-1);
  cmd_eval->add_option("--fuel", eval_steps, "evaluation step budget")
      ->envname("PERLAB_FUEL");

  std::string encode_term;
  CLI::App* cmd_encode =
      app.add_subcommand("encode", "print the numeral of a term literal");
  cmd_encode->add_option("term", encode_term, "term literal, e.g. '(S (K I))'")
      ->required();

  std::string decode_numeral;
  CLI::App* cmd_decode =
      app.add_subcommand("decode", "print the term of a code numeral");
  cmd_decode->add_option("code", decode_numeral, "decimal numeral")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      WorkbenchOptions opts = run_flags.options();
      opts.trace = run_trace;
      opts.din = run_din;
      WorkbenchResult res = run_checks(parse_workbench(slurp(run_flags.file)),
                                       opts);
      return run_flags.finish(res.report, res.budget);
    }
    if (cmd_fix->parsed()) {
      WorkbenchOptions opts = fix_flags.options();
      opts.trace = fix_trace;
      return run_construction(fix_flags, std::move(opts),
                              [&](Workbench& wb, Report& rep) {
                                wb.run_fixpoint(fix_functor, rep);
                              });
    }
    if (cmd_init->parsed()) {
      WorkbenchOptions opts = init_flags.options();
      opts.din = init_din;
      return run_construction(init_flags, std::move(opts),
                              [&](Workbench& wb, Report& rep) {
                                wb.run_initial_algebra(init_functor,
                                                       init_family, rep);
                              });
    }
    if (cmd_mono->parsed()) {
      return run_construction(mono_flags, mono_flags.options(),
                              [&](Workbench& wb, Report& rep) {
                                wb.run_monotonize(mono_functor, mono_family,
                                                  rep);
                              });
    }
    if (cmd_eval->parsed()) {
      Term chained = parse_term(eval_terms[0]);
      for (std::size_t i = 1; i < eval_terms.size(); ++i)
        chained = term_app(chained, parse_term(eval_terms[i]));
      Outcome o = normalize_code(Code(chained), eval_fuel_flag(eval_steps));
      if (!o.converged()) {
        std::cout << "no normal form within " << o.steps << " steps\n";
        return 1;
      }
      std::cout << show_term(o.value->term()) << "\n";
      std::cout << "code:  " << show_code(*o.value) << "\n";
      std::cout << "steps: " << o.steps << "\n";
      return 0;
    }
    if (cmd_encode->parsed()) {
      Code c(parse_term(encode_term));
      std::cout << c.integer().str() << "\n";
      return 0;
    }
    if (cmd_decode->parsed()) {
      if (decode_numeral.empty() ||
          decode_numeral.find_first_not_of("0123456789") != std::string::npos)
        throw std::runtime_error("decode expects a decimal numeral");
      std::cout << show_term(Code(Integer(decode_numeral)).term()) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
