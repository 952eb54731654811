#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softplast/errors.hpp"
#include "softplast/scenario.hpp"

using namespace softplast;

int main(int argc, char** argv) {
  CLI::App app{"quasistatic elastoplastic evolution with softening"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  std::string out_dir;
  int steps = -1;
  std::string verify = "";
  std::vector<int> laminate_k;
  std::uint64_t seed = 0;

  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the scenario)");
  run->add_option("--steps", steps, "number of uniform time steps");
  run->add_option("--verify", verify, "verification passes: all|energy|stability|none");
  run->add_option("--laminate", laminate_k, "laminate study refinement indices")
      ->delimiter(',');
  auto* seed_opt = run->add_option("--seed", seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);
  const bool have_seed = seed_opt->count() > 0;

  try {
    Scenario scenario = load_scenario(scenario_path);
    if (!out_dir.empty()) scenario.output.directory = out_dir;
    if (steps > 0) {
      scenario.steps = steps;
      scenario.explicit_times.reset();
    }
    if (!verify.empty()) {
      if (verify == "all") {
        scenario.verify.energy = true;
        scenario.verify.stability = true;
      } else if (verify == "energy") {
        scenario.verify.energy = true;
        scenario.verify.stability = false;
      } else if (verify == "stability") {
        scenario.verify.energy = false;
        scenario.verify.stability = true;
      } else if (verify == "none") {
        scenario.verify.energy = false;
        scenario.verify.stability = false;
        scenario.verify.laminate_study = false;
      } else {
        std::fprintf(stderr, "error: --verify must be all|energy|stability|none\n");
        return 2;
      }
    }
    if (!laminate_k.empty()) {
      scenario.verify.laminate_study = true;
      scenario.verify.laminate_k = laminate_k;
    }
    if (have_seed) scenario.solver.seed = seed;

    const RunReport report = run_scenario(scenario);
    switch (report.status) {
      case RunStatus::ok:
        std::printf("ok: t0=%.9g residual=%.3g out=%s\n", report.t0_detected,
                    report.energy_residual, scenario.output.directory.c_str());
        break;
      case RunStatus::solver_error:
        std::fprintf(stderr, "solver failure: %s\n", report.message.c_str());
        break;
      case RunStatus::verification_failure:
        std::fprintf(stderr, "verification failure: %s\n", report.message.c_str());
        break;
      case RunStatus::validation_error:
        std::fprintf(stderr, "validation error: %s\n", report.message.c_str());
        break;
    }
    return static_cast<int>(report.status);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const SolverFailure& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
