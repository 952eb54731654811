#pragma once

#include <Eigen/Core>

#include "softplast/dissipation.hpp"

namespace softplast {

struct EnvelopeGrid {
  int n_s = 256;
  int n_theta = 256;
  double s_max = 2.0;
  double theta_max = 2.0;
};

struct EnvelopeTable {
  Eigen::VectorXd s;         // n_s nodes on [0, s_max]
  Eigen::VectorXd theta;     // n_theta nodes on [-theta_max, theta_max]
  Eigen::ArrayXXd raw;       // recession cost G(s xi_dir, theta), s rows
  Eigen::ArrayXXd envelope;  // lower convex envelope of the samples
};

// Independent check of the effective dissipation: samples the recession cost
// of the section s -> s * xi_dir on a rectangular grid and convexifies it by
// iterated pairwise chords (exact 1D lower hulls along a fan of lattice
// directions, swept to a fixed point). Agrees with effective_dissipation to
// O(grid spacing) wherever the optimal chords fit inside the grid box.
//
// Requires |xi_dir| = 1 and at least 8 nodes per axis.
EnvelopeTable envelope_oracle(const YieldSet& k, const SofteningPotential& v,
                              const DevTensor2& xi_dir, const EnvelopeGrid& grid);

}  // namespace softplast
