#include "softplast/softening.hpp"

#include <algorithm>
#include <cmath>

#include "softplast/errors.hpp"

namespace softplast {

namespace {
constexpr double kTableTol = 1e-6;
}

SofteningPotential SofteningPotential::sqrt_family(double asymptote_slope) {
  if (!(asymptote_slope > 0.0))
    throw ValidationError("SofteningPotential: b_V must be > 0");
  SofteningPotential v;
  v.tabulated_ = false;
  v.b_ = asymptote_slope;
  v.m_ = asymptote_slope;  // |V''| peaks at b at theta = 0
  v.validate();
  return v;
}

SofteningPotential SofteningPotential::tabulated(const std::vector<double>& thetas,
                                                 const std::vector<double>& values,
                                                 double asymptote_slope) {
  if (!(asymptote_slope > 0.0))
    throw ValidationError("SofteningPotential: b_V must be > 0");
  if (thetas.size() != values.size() || thetas.size() < 4)
    throw ValidationError("SofteningPotential: table needs >= 4 matched samples");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1]))
      throw ValidationError("SofteningPotential: table abscissae must increase");

  SofteningPotential v;
  v.tabulated_ = true;
  v.b_ = asymptote_slope;
  v.grid_ = thetas;
  v.table_ = values;

  // Second differences must be nonpositive and bounded below.
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < thetas.size(); ++i) {
    const double hl = thetas[i] - thetas[i - 1];
    const double hr = thetas[i + 1] - thetas[i];
    const double sl = (values[i] - values[i - 1]) / hl;
    const double sr = (values[i + 1] - values[i]) / hr;
    const double curv = (sr - sl) / (0.5 * (hl + hr));
    if (curv > kTableTol)
      throw ValidationError("SofteningPotential: table violates concavity (V'' <= 0)");
    m = std::max(m, -curv);
  }
  v.m_ = m;

  // End slopes must already sit on the asymptote.
  const std::size_t n = thetas.size();
  const double slope_lo = (values[1] - values[0]) / (thetas[1] - thetas[0]);
  const double slope_hi = (values[n - 1] - values[n - 2]) / (thetas[n - 1] - thetas[n - 2]);
  if (std::abs(slope_lo - asymptote_slope) > kTableTol ||
      std::abs(slope_hi + asymptote_slope) > kTableTol)
    throw ValidationError(
        "SofteningPotential: table end slopes must approach -sign(theta) b_V");

  v.validate();
  return v;
}

double SofteningPotential::value(double theta) const {
  if (!tabulated_) return b_ * (1.0 - std::sqrt(1.0 + theta * theta));
  if (theta <= grid_.front())
    return table_.front() + b_ * (theta - grid_.front());
  if (theta >= grid_.back())
    return table_.back() - b_ * (theta - grid_.back());
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), theta);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double w = (theta - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return (1.0 - w) * table_[i - 1] + w * table_[i];
}

double SofteningPotential::recession(double theta) const { return -b_ * std::abs(theta); }

void SofteningPotential::validate() const {
  // Sampled checks of the standing inequalities. Tables check curvature at
  // their own breakpoints during construction; re-sampling a piecewise-linear
  // interpolant at a finer pitch would overshoot the bound.
  const double lo = tabulated_ ? grid_.front() : -8.0;
  const double hi = tabulated_ ? grid_.back() : 8.0;
  if (!tabulated_) {
    const int n = 160;
    const double h = (hi - lo) / n;
    for (int i = 1; i < n; ++i) {
      const double t = lo + i * h;
      const double curv = (value(t + h) - 2.0 * value(t) + value(t - h)) / (h * h);
      if (curv > 1e-7)
        throw ValidationError("SofteningPotential: V'' <= 0 fails on sample grid");
      if (curv < -curvature_bound() - 1e-6)
        throw ValidationError("SofteningPotential: V'' >= -M_V fails on sample grid");
    }
  }
  // Strict recession gap on interior shifts.
  for (int i = 0; i <= 8; ++i) {
    const double theta = lo / 2 + i * (hi - lo) / 16.0;
    for (double t : {0.25, 1.0, 3.0, -0.25, -1.0, -3.0}) {
      if (!(recession(t) < value(theta + t) - value(theta) + 1e-12))
        throw ValidationError(
            "SofteningPotential: strict recession gap V_inf(t) < V(theta+t) - V(theta) fails");
    }
  }
}

}  // namespace softplast
