#pragma once

#include <cstdint>
#include <vector>

#include "softplast/dissipation.hpp"
#include "softplast/tensor.hpp"

namespace softplast {

// Homogeneous Young-measure state: a frozen atom at (atom_p, atom_z) plus a
// symmetric pair of concentrations at infinity with cumulative direction
// conc_p, amplitude conc_zhat and branch weight alpha. Barycentre:
//   p = atom_p + conc_p,   z = atom_z + (2 alpha - 1) conc_zhat.
struct MeasureSummary {
  DevTensor2 atom_p;
  double atom_z = 0.0;
  DevTensor2 conc_p;
  double conc_zhat = 0.0;
  double alpha = 0.5;
};

inline DevTensor2 barycentre_p(const MeasureSummary& m) { return m.atom_p + m.conc_p; }
inline double barycentre_z(const MeasureSummary& m) {
  return m.atom_z + (2.0 * m.alpha - 1.0) * m.conc_zhat;
}

// The softening functional carried by the summary: the atom contributes
// V(atom_z), each concentration branch its recession value.
inline double measure_softening(const MeasureSummary& m, const SofteningPotential& v) {
  return v.value(m.atom_z) + m.alpha * v.recession(m.conc_zhat) +
         (1.0 - m.alpha) * v.recession(-m.conc_zhat);
}

struct EvolutionState {
  double t = 0.0;
  SymTensor2 e;       // elastic strain
  DevTensor2 p;       // plastic strain (barycentre)
  SymTensor2 sigma;   // C e
  MeasureSummary measure;
  double diss_H = 0.0;     // accumulated dissipation per unit area
  double work = 0.0;       // accumulated boundary work per unit area
  double v_total = 0.0;    // current measure_softening
  double work_error = 0.0; // accumulated bound on work-integration error
  bool path_dependent_summary = false;  // set when increments stop being
                                        // colinear and monotone
};

struct LoadProgram {
  struct Knot {
    double t;
    SymTensor2 strain;
  };

  // Ew(t) = t * xi0.
  static LoadProgram monotone_affine(const SymTensor2& xi0);
  static LoadProgram piecewise_linear(std::vector<Knot> knots);

  SymTensor2 at(double t) const;
  bool affine() const { return affine_; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  bool affine_ = true;
  SymTensor2 xi0_;
  std::vector<Knot> knots_;
};

struct TimeGrid {
  std::vector<double> times;  // strictly increasing, times.front() == 0
  static TimeGrid uniform(double t_end, int steps);
};

enum class WorkIntegration { exact_segment, trapezoid };

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  WorkIntegration work = WorkIntegration::exact_segment;
  bool check_initial_stability = true;
  int initial_stability_samples = 2000;
  std::uint64_t seed = 12345;
};

struct MeasureUpdate {
  MeasureSummary measure;
  double diss_increment = 0.0;
  double v_increment = 0.0;
  bool colinear = true;
};

// Closed-form return map for isotropic effective dissipation r_eff |.|:
// project the trial stress 2 mu (dev Ew - p_prev) onto the disk of radius
// r_eff and translate the overshoot into plastic flow.
DevTensor2 radial_return(double mu, double r_eff, const DevTensor2& p_prev,
                         const SymTensor2& ew);

// Numerical minimizer of Q(Ew - p) + effective_dissipation(p - p_prev, 0):
// Frank-Wolfe projection of the trial stress onto the zeta = 0 slice of the
// effective domain, with away steps on polytopes. Stops when the returned p
// satisfies the duality criterion (feasible stress + complementarity) within
// tol; throws SolverFailure past max_iter.
DevTensor2 prox_solve(const MaterialModel& model, const DevTensor2& p_prev,
                      const SymTensor2& ew, double tol, int max_iter);

// Measure bookkeeping for a plastic increment dp (the internal variable of
// the barycentre does not move): both concentration branches advance by dp,
// the amplitude grows by the optimal oscillation of dp, and
//   diss_increment + v_increment == effective_dissipation(dp, 0).
MeasureUpdate update_measure_and_energies(const MaterialModel& model,
                                          const EvolutionState& state,
                                          const DevTensor2& dp);

// One implicit step to the new load. Work is integrated assuming the load is
// affine on [state.t, t_new]; plastic segments of isotropic models are
// integrated exactly through the yield instant, anything else falls back to
// the trapezoid rule with a tracked error bound.
EvolutionState incremental_step(const MaterialModel& model, const EvolutionState& state,
                                double t_new, const SymTensor2& ew_new,
                                const SolverOptions& opts = {});

// Sequential incremental minimization over the grid (each step depends on the
// previous; states are immutable snapshots and safe to hand across threads).
// The initial state is admissible for the load at time 0 and is checked for
// stability when opts.check_initial_stability is set. Piecewise-linear load
// knots are merged into the grid.
std::vector<EvolutionState> run_evolution(const MaterialModel& model,
                                          const LoadProgram& load, const TimeGrid& grid,
                                          const DevTensor2& p0, double z0,
                                          const SolverOptions& opts = {});

// Q(e(T)) + diss_H(T) + v_total(T) - Q(e(0)) - v_total(0) - work(T).
double energy_balance_residual(const Elasticity& el,
                               const std::vector<EvolutionState>& record);

// Necessary-condition form of global stability: random homogeneous
// perturbations (p~, z~) with e~ = -p~ at scales {1e-4, 1e-2, 1, 1e2}.
// Returns the worst (largest) violation; nonpositive means stable.
double stability_check(const MaterialModel& model, const EvolutionState& state,
                       int n_samples, std::uint64_t seed);

}  // namespace softplast
