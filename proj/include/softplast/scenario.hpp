#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "softplast/evolution.hpp"

namespace softplast {

// Declarative description of one run: material, initial state, load program,
// time grid, solver knobs, verification passes and output targets. Parsed
// from versioned JSON; unknown keys are rejected.
struct Scenario {
  struct Verify {
    bool energy = false;
    bool stability = false;
    bool laminate_study = false;
    std::vector<int> laminate_k;
    int stability_samples = 10000;
    int stability_times = 20;
  };
  struct Output {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool plot = false;
  };

  double mu = 1.0;
  double kappa = 1.0;
  YieldSet yield = YieldSet::ball(1.0);
  double b_v = 0.5;

  DevTensor2 p0;
  double z0 = 0.0;

  LoadProgram load = LoadProgram::monotone_affine(SymTensor2{});
  double t_end = 1.0;
  int steps = 100;
  std::optional<std::vector<double>> explicit_times;

  SolverOptions solver;
  Verify verify;
  Output output;

  MaterialModel material() const;
  TimeGrid grid() const;
};

Scenario load_scenario(const std::filesystem::path& path);

// Exit statuses mirrored by the command-line front end.
enum class RunStatus : int {
  ok = 0,
  validation_error = 2,
  solver_error = 3,
  verification_failure = 4,
};

struct RunReport {
  RunStatus status = RunStatus::ok;
  std::string message;
  std::filesystem::path series_csv;
  std::filesystem::path summary_json;
  std::filesystem::path laminate_csv;  // empty unless the study ran
  double t0_detected = -1.0;
  double energy_residual = 0.0;
  double worst_stability_violation = 0.0;
};

// Runs the scenario and writes series.csv, summary.json and optional
// laminate.csv / plot.gp into the output directory (atomically, via
// temp-and-rename). Identical inputs produce byte-identical outputs.
RunReport run_scenario(const Scenario& scenario);

}  // namespace softplast
