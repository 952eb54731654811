#pragma once

#include <vector>

#include "softplast/yield_set.hpp"

namespace softplast {

// Concave softening potential V with linear growth. The built-in family is
// V(theta) = b (1 - sqrt(1 + theta^2)); tabulated potentials are accepted as
// an extension point (linear interpolation inside the table, asymptote slope
// outside) and validated against the same concavity/slope constraints.
//
// Construction checks, on a sample grid:
//   -M <= V'' <= 0, V'(theta) -> -sign(theta) b, and the strict recession
//   gap -b|t| < V(theta + t) - V(theta) for t != 0.
class SofteningPotential {
 public:
  static SofteningPotential sqrt_family(double asymptote_slope);
  static SofteningPotential tabulated(const std::vector<double>& thetas,
                                      const std::vector<double>& values,
                                      double asymptote_slope);

  double value(double theta) const;             // V(theta)
  double recession(double theta) const;         // -b |theta|
  double asymptote() const { return b_; }       // b (named b_V in messages)
  double curvature_bound() const { return m_; } // M with -M <= V'' <= 0

 private:
  SofteningPotential() = default;
  void validate() const;

  bool tabulated_ = false;
  double b_ = 0.5;
  double m_ = 0.5;
  std::vector<double> grid_;
  std::vector<double> table_;
};

}  // namespace softplast
