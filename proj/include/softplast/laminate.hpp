#pragma once

#include <Eigen/Core>

#include "softplast/dissipation.hpp"

namespace softplast {

// Layered field on the unit square reproducing the relaxation mechanism:
// along the lamination direction b each period of width 1/k splits into a
// quiet band A (width 1/k - 1/k^2) and two active bands B, C (width 1/(2k^2)
// each) carrying plastic strain beta k xi0s and internal-variable increments
// of opposite sign +-beta k |xi0s| / sqrt(3).
struct LaminateField {
  enum class Band { A, B, C };

  int k = 2;
  double beta = 1.0;
  DevTensor2 xi0s;
  Eigen::Vector2d direction;  // unit lamination normal b

  Band band_at(const Eigen::Vector2d& x) const;
  DevTensor2 plastic_at(const Eigen::Vector2d& x) const;
  double internal_at(const Eigen::Vector2d& x) const;

  double band_plastic_scale() const { return beta * k; }
  double band_internal_scale() const;
};

// Rank-one compatible lamination normal of a trace-free symmetric tensor:
// the unit b with xi0s = sym(a (x) b) for some a.
Eigen::Vector2d lamination_direction(const DevTensor2& xi0s);

LaminateField build_laminate(int k, const DevTensor2& xi0s, double beta);

// Cell sum over the unit square of H(p, z) + V(z0 + z) - V(z0), sampled on an
// axis-aligned grid fine enough to resolve every active band by >= 4 cells.
// Converges to effective_dissipation(beta xi0s, 0) at rate O(1/k) on the
// ball benchmark.
double discrete_functional(const LaminateField& field, const YieldSet& k,
                           const SofteningPotential& v, double z0);

// Occupancy fractions and the exact cell averages of (p, z) for a given
// per-axis resolution; test hook for the band arithmetic.
struct LaminateAverages {
  double frac_a = 0.0, frac_b = 0.0, frac_c = 0.0;
  DevTensor2 mean_p;
  double mean_z = 0.0;
};
LaminateAverages laminate_averages(const LaminateField& field, int cells_per_axis);

// Search controls for the iterated lamination envelopes.
struct LaminationSearch {
  int lambda_points = 65;    // coarse grid on the mixing weight
  int direction_count = 4;   // offset directions (multiples of pi/4)
  int rho_points = 25;       // log-spaced offset magnitudes
  double rho_min = 1e-2;
  double rho_max = 1e4;
  int refine_rounds = 160;   // pattern-search refinement iterations
  long max_evals = 200'000'000;  // budget on underlying cost evaluations
};

struct IteratedEnvelope {
  double g0 = 0.0;  // H(xi, theta) + V(z0 + theta) - V(z0)
  double g1 = 0.0;  // one lamination
  double g2 = 0.0;  // two laminations; the convex envelope up to search error
  bool budget_exhausted = false;
};

// Numerically evaluates the once- and twice-laminated envelopes of the
// increment cost at (xi, theta). Satisfies
//   effective_dissipation <= g2 <= g1 <= g0
// pointwise; g2 approaches the effective dissipation from above as the
// search budget grows.
IteratedEnvelope iterated_envelope(const YieldSet& k, const SofteningPotential& v,
                                   double z0, const DevTensor2& xi, double theta,
                                   const LaminationSearch& search = {});

}  // namespace softplast
