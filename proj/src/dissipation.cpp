#include "softplast/dissipation.hpp"

#include <algorithm>
#include <cmath>

#include "softplast/errors.hpp"

namespace softplast {
namespace {

void require_coercive(const YieldSet& k, const SofteningPotential& v) {
  if (!(v.asymptote() < k.yield_height()))
    throw ValidationError("softening asymptote must be below yield height a_K");
}

// Golden-section minimization of a unimodal function on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double recession_cost(const YieldSet& k, const SofteningPotential& v,
                      const DevTensor2& xi, double theta) {
  return k.support(xi, theta) + v.recession(theta);
}

namespace {

// dH/dtheta for the smooth yield sets.
double support_slope(const YieldSet& k, const DevTensor2& xi, double theta) {
  const double h = k.support(xi, theta);
  if (h == 0.0) return 0.0;
  if (k.kind() == YieldSet::Kind::ball) return k.radius() * k.radius() * theta / h;
  const double sz = k.zeta_scale();
  return sz * sz * theta / h;
}

}  // namespace

double oscillation_amplitude(const YieldSet& k, const SofteningPotential& v,
                             const DevTensor2& xi) {
  require_coercive(k, v);
  const double n = norm(xi);
  if (n == 0.0) return 0.0;
  // Beyond t_max the cost exceeds its value at 0, so the minimizer is inside.
  const double t_max = k.outer_radius() * n / (k.yield_height() - v.asymptote());
  auto cost = [&](double t) { return recession_cost(k, v, xi, t); };

  if (k.kind() == YieldSet::Kind::polytope)
    return golden_min(cost, 0.0, t_max, 1e-12);

  // Golden section cannot place a flat minimum past the rounding-noise floor
  // (~1e-8 relative), so bracket coarsely and polish the stationarity
  // equation dH/dtheta = b_V, whose left side is strictly increasing.
  const double coarse = golden_min(cost, 0.0, t_max, std::max(1e-6, 1e-9 * t_max));
  const double b = v.asymptote();
  const double w = 1e-3 * (1.0 + coarse);
  double lo = std::max(0.0, coarse - w);
  double hi = std::min(t_max, coarse + w);
  if (support_slope(k, xi, lo) - b < 0.0 && support_slope(k, xi, hi) - b > 0.0) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (support_slope(k, xi, mid) - b < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return golden_min(cost, 0.0, t_max, 1e-12);
}

double effective_dissipation(const YieldSet& k, const SofteningPotential& v,
                             const DevTensor2& xi, double theta) {
  const double t_star = oscillation_amplitude(k, v, xi);
  const double a = std::abs(theta);
  return recession_cost(k, v, xi, std::max(a, t_star));
}

IncrementDecomposition decompose_increment(const YieldSet& k,
                                           const SofteningPotential& v,
                                           const DevTensor2& dxi, double dtheta) {
  IncrementDecomposition out;
  const double t_star = oscillation_amplitude(k, v, dxi);
  const double a = std::abs(dtheta);
  if (a >= t_star) {
    out.amplitude = a;
    out.alpha = dtheta >= 0.0 ? 1.0 : 0.0;
    if (a == 0.0) out.alpha = 0.5;
  } else {
    out.amplitude = t_star;
    out.alpha = 0.5 * (1.0 + dtheta / t_star);
  }
  out.value = recession_cost(k, v, dxi, out.amplitude);
  return out;
}

bool effective_domain_contains(const YieldSet& k, const SofteningPotential& v,
                               const DevTensor2& sigma, double zeta, double tol) {
  const double b = v.asymptote();
  return k.contains(sigma, zeta - b, tol) && k.contains(sigma, zeta + b, tol);
}

std::vector<Eigen::Vector2d> effective_domain_slice(const YieldSet& k,
                                                    const SofteningPotential& v) {
  require_coercive(k, v);
  const double b = v.asymptote();
  if (k.kind() != YieldSet::Kind::polytope) {
    const double r = effective_radius(k, v);
    std::vector<Eigen::Vector2d> circle;
    const int n = 256;
    circle.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * M_PI * i / n;
      circle.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return circle;
  }

  // Clip a generous square by the zeta = b slice of every face half-space.
  const double big = 2.0 * k.outer_radius() + 1.0;
  std::vector<Eigen::Vector2d> poly = {
      {-big, -big}, {big, -big}, {big, big}, {-big, big}};
  for (const auto& f : k.faces()) {
    const Eigen::Vector2d n2{f.normal.x(), f.normal.y()};
    const double rhs = f.offset - f.normal.z() * b;
    if (n2.norm() < 1e-14) continue;  // horizontal face: never binds (b < a_K)
    std::vector<Eigen::Vector2d> next;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Vector2d& p = poly[i];
      const Eigen::Vector2d& q = poly[(i + 1) % m];
      const double dp = n2.dot(p) - rhs;
      const double dq = n2.dot(q) - rhs;
      if (dp <= 0.0) next.push_back(p);
      if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
        const double t = dp / (dp - dq);
        next.push_back(p + t * (q - p));
      }
    }
    poly = std::move(next);
    if (poly.empty()) break;
  }
  if (poly.size() < 3)
    throw ValidationError("effective_domain_slice: empty slice (b_V too close to a_K)");
  return poly;
}

double effective_radius(const YieldSet& k, const SofteningPotential& v) {
  require_coercive(k, v);
  return effective_dissipation(k, v, from_ortho({1.0, 0.0}), 0.0);
}

MaterialModel::MaterialModel(const Elasticity& el, const YieldSet& k,
                             const SofteningPotential& v)
    : elastic(el), yield(k), softening(v) {
  require_coercive(k, v);
  if (isotropic_flow()) r_eff_ = softplast::effective_radius(k, v);
}

double MaterialModel::effective_radius() const {
  if (!isotropic_flow())
    throw ValidationError(
        "MaterialModel::effective_radius: flow is anisotropic (use prox_solve)");
  return r_eff_;
}

}  // namespace softplast
