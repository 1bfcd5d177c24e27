#include <CLI11.hpp>

#include "cma/runner.hpp"
#include "cma/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cma - a numerical laboratory for the complex Monge-Ampere equation"};
  app.set_version_flag("--version", cma::kToolVersion);
  app.require_subcommand(1);

  std::string instance, out, metric = "flat";
  std::uint64_t seed = 42;
  long trials = 100000;
  int samples = 20, frames = 32;
  bool inject_fault = false;

  auto* solve = app.add_subcommand("solve", "run an instance end to end");
  solve->add_option("--instance", instance, "instance JSON path")->required();
  solve->add_option("--out", out, "output directory");

  auto* conditions =
      app.add_subcommand("conditions", "evaluate the density conditions only");
  conditions->add_option("--instance", instance, "instance JSON path")->required();
  conditions->add_option("--out", out, "output directory");

  auto* lemmas = app.add_subcommand("lemmas", "random-trial inequality suites");
  lemmas->add_option("--seed", seed, "root seed");
  lemmas->add_option("--trials", trials, "trials per suite");
  lemmas->add_option("--out", out, "output directory");
  lemmas->add_flag("--inject-fault", inject_fault,
                   "negate the checks (validation hook)");

  auto* curvature = app.add_subcommand("curvature", "model metric curvature report");
  curvature->add_option("--metric", metric, "metric model name")->required();
  curvature->add_option("--samples", samples, "chart sample points");
  curvature->add_option("--frames", frames, "random frames per point");
  curvature->add_option("--seed", seed, "root seed");
  curvature->add_option("--out", out, "output directory");

  auto* report = app.add_subcommand("report", "summarize a finished run");
  report->add_option("--run", out, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return cma::cmd_solve(instance, out);
  if (conditions->parsed()) return cma::cmd_conditions(instance, out);
  if (lemmas->parsed()) return cma::cmd_lemmas(seed, trials, out, inject_fault);
  if (curvature->parsed())
    return cma::cmd_curvature(metric, samples, frames, seed, out);
  if (report->parsed()) return cma::cmd_report(out);
  return 2;
}
