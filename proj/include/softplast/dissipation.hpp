#pragma once

#include <vector>

#include <Eigen/Core>

#include "softplast/softening.hpp"
#include "softplast/tensor.hpp"
#include "softplast/yield_set.hpp"

namespace softplast {

// One-dimensional convexification data for an increment (dxi, dtheta):
// dtheta = alpha * amplitude + (1 - alpha) * (-amplitude), and `value` is the
// effective dissipation of the increment.
struct IncrementDecomposition {
  double alpha = 0.5;      // weight of the +amplitude branch, in [0, 1]
  double amplitude = 0.0;  // oscillation amplitude, >= 0
  double value = 0.0;      // effective_dissipation(dxi, dtheta)
};

// All operations below are pure given immutable YieldSet / SofteningPotential
// values and safe to evaluate concurrently.

// Recession cost of an increment: support(xi, theta) - b |theta|.
// Nonnegative, 1-homogeneous, nonconvex in theta.
double recession_cost(const YieldSet& k, const SofteningPotential& v,
                      const DevTensor2& xi, double theta);

// Minimizer over t >= 0 of recession_cost(xi, t); golden-section search with
// absolute tolerance 1e-12 on [0, B|xi|/(a_K - b_V)]. Zero for xi = 0.
double oscillation_amplitude(const YieldSet& k, const SofteningPotential& v,
                             const DevTensor2& xi);

// Convex envelope of the recession cost: flat in theta on [-t*, t*] at the
// level recession_cost(xi, t*), equal to the recession cost outside.
double effective_dissipation(const YieldSet& k, const SofteningPotential& v,
                             const DevTensor2& xi, double theta);

IncrementDecomposition decompose_increment(const YieldSet& k,
                                           const SofteningPotential& v,
                                           const DevTensor2& dxi, double dtheta);

// Membership in the effective admissible set: (sigma, zeta -/+ b) in K for
// both signs.
bool effective_domain_contains(const YieldSet& k, const SofteningPotential& v,
                               const DevTensor2& sigma, double zeta,
                               double tol = 0.0);

// The zeta = 0 slice of the effective admissible set, which supports
// effective_dissipation(., 0). For a polytope K this is a convex polygon in
// orthonormal deviator coordinates (counterclockwise vertex list).
std::vector<Eigen::Vector2d> effective_domain_slice(const YieldSet& k,
                                                    const SofteningPotential& v);

// effective_dissipation on unit deviators; for balls and ellipsoids the slice
// is a disk of this radius.
double effective_radius(const YieldSet& k, const SofteningPotential& v);

// Elasticity + yield set + softening, validated jointly (b_V < a_K).
struct MaterialModel {
  Elasticity elastic;
  YieldSet yield;
  SofteningPotential softening;

  MaterialModel(const Elasticity& el, const YieldSet& k, const SofteningPotential& v);

  bool isotropic_flow() const { return yield.kind() != YieldSet::Kind::polytope; }
  // radius of the effective flow disk; defined for isotropic flow only
  double effective_radius() const;

 private:
  double r_eff_ = 0.0;
};

}  // namespace softplast
