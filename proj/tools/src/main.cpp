#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace cli = quiverstair::cli;

namespace {

void add_report_flags(CLI::App& cmd, quiverstair::TolerancePolicy& tol, cli::ReportOptions& opts) {
  cmd.add_option("--tol-abs", tol.abs_floor, "absolute rank threshold floor")->check(CLI::NonNegativeNumber);
  cmd.add_option("--tol-rel", tol.rel_factor, "relative rank threshold factor")->check(CLI::NonNegativeNumber);
  auto* json = cmd.add_flag("--json", opts.json, "machine-readable report");
  cmd.add_flag("--text", "human-readable report (default)")->excludes(json);
  cmd.add_option("-o,--output", opts.output, "write the report to a file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical forms of chain and cycle quiver representations by unitary staircase reduction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "quiverstair 0.1.0");

  quiverstair::TolerancePolicy tol;
  const int env_status = cli::guarded(
      [&] {
        tol = cli::default_tolerance();
        return 0;
      },
      std::cerr);
  if (env_status != 0) return env_status;

  cli::ReportOptions report;
  std::string input;
  std::string truth;

  auto* canon = app.add_subcommand("canon", "interval decomposition of a chain representation");
  canon->add_option("input", input, "representation file")->required();
  add_report_flags(*canon, tol, report);

  auto* reg = app.add_subcommand("regularize", "walk summands and regular part of a cycle representation");
  reg->add_option("input", input, "representation file")->required();
  add_report_flags(*reg, tol, report);

  auto* verify = app.add_subcommand("verify", "decompose and compare against a ground-truth file");
  verify->add_option("input", input, "representation file")->required();
  verify->add_option("truth", truth, "ground-truth file written by gen")->required();
  add_report_flags(*verify, tol, report);

  cli::GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "write a planted, scrambled representation and its ground truth");
  gen->add_option("--spec", gen_opts.spec_path, "ground-truth style spec file");
  gen->add_option("--kind", gen_opts.kind, "chain or cycle")->check(CLI::IsMember({"chain", "cycle"}));
  gen->add_option("--orientations", gen_opts.orientations, "one '>' or '<' per arrow");
  gen->add_option("--label", gen_opts.labels, "summand label such as L(1,3) or G(2,5); repeatable");
  gen->add_option("--eig", gen_opts.eigs, "regular eigenvalue RE or RE,IM; repeatable");
  gen->add_option("--seed", gen_opts.seed, "scramble seed");
  gen->add_option("--noise", gen_opts.noise, "entrywise Gaussian noise relative to the largest arrow norm");
  gen->add_flag("--general-invertible", gen_opts.general_invertible, "scramble with invertible, not unitary, matrices");
  gen->add_option("--max-condition", gen_opts.max_condition, "condition bound for --general-invertible");
  gen->add_option("-o,--output", gen_opts.output, "representation file to write")->required();
  gen->add_option("--truth", gen_opts.truth_output, "ground-truth file (default <output>.truth.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInputError;
  }
  report.tol = tol;
  gen_opts.seed_given = gen->count("--seed") > 0;

  return cli::guarded(
      [&] {
        if (*canon) return cli::run_canon(input, report, std::cout);
        if (*reg) return cli::run_regularize(input, report, std::cout);
        if (*verify) return cli::run_verify(input, truth, report, std::cout);
        return cli::run_gen(gen_opts, std::cout);
      },
      std::cerr);
}
