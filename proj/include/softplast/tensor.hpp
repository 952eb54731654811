#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace softplast {

struct DevTensor2;

// Symmetric 2x2 tensor, stored as its three independent components.
struct SymTensor2 {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  constexpr SymTensor2() = default;
  constexpr SymTensor2(double a11, double a12, double a22)
      : m11(a11), m12(a12), m22(a22) {}

  static constexpr SymTensor2 identity() { return {1.0, 0.0, 1.0}; }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << m11, m12, m12, m22;
    return m;
  }
};

// Trace-free symmetric 2x2 tensor. Only (d11, d12) are stored; the (2,2)
// entry is -d11 by construction, so the trace-free invariant cannot drift.
struct DevTensor2 {
  double d11 = 0.0;
  double d12 = 0.0;

  constexpr DevTensor2() = default;
  constexpr DevTensor2(double a11, double a12) : d11(a11), d12(a12) {}

  constexpr SymTensor2 sym() const { return {d11, d12, -d11}; }

  Eigen::Matrix2d matrix() const { return sym().matrix(); }
};

inline constexpr double trace(const SymTensor2& m) { return m.m11 + m.m22; }

inline constexpr DevTensor2 deviatoric(const SymTensor2& m) {
  const double half_tr = 0.5 * (m.m11 + m.m22);
  return {m.m11 - half_tr, m.m12};
}

inline constexpr double dot(const SymTensor2& a, const SymTensor2& b) {
  return a.m11 * b.m11 + 2.0 * a.m12 * b.m12 + a.m22 * b.m22;
}

inline constexpr double dot(const DevTensor2& a, const DevTensor2& b) {
  return 2.0 * (a.d11 * b.d11 + a.d12 * b.d12);
}

inline double norm(const SymTensor2& m) { return std::sqrt(dot(m, m)); }

// Frobenius norm; the off-stored (2,2) entry doubles both components.
inline double norm(const DevTensor2& d) {
  return std::sqrt(2.0 * (d.d11 * d.d11 + d.d12 * d.d12));
}

inline constexpr SymTensor2 operator+(const SymTensor2& a, const SymTensor2& b) {
  return {a.m11 + b.m11, a.m12 + b.m12, a.m22 + b.m22};
}
inline constexpr SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) {
  return {a.m11 - b.m11, a.m12 - b.m12, a.m22 - b.m22};
}
inline constexpr SymTensor2 operator*(double s, const SymTensor2& a) {
  return {s * a.m11, s * a.m12, s * a.m22};
}
inline constexpr SymTensor2 operator-(const SymTensor2& a) { return -1.0 * a; }

inline constexpr DevTensor2 operator+(const DevTensor2& a, const DevTensor2& b) {
  return {a.d11 + b.d11, a.d12 + b.d12};
}
inline constexpr DevTensor2 operator-(const DevTensor2& a, const DevTensor2& b) {
  return {a.d11 - b.d11, a.d12 - b.d12};
}
inline constexpr DevTensor2 operator*(double s, const DevTensor2& a) {
  return {s * a.d11, s * a.d12};
}
inline constexpr DevTensor2 operator-(const DevTensor2& a) { return -1.0 * a; }

inline constexpr SymTensor2 operator+(const SymTensor2& a, const DevTensor2& b) {
  return a + b.sym();
}
inline constexpr SymTensor2 operator-(const SymTensor2& a, const DevTensor2& b) {
  return a - b.sym();
}

// Orthonormal plane coordinates for deviators: the map x = sqrt(2)*(d11, d12)
// turns the Frobenius inner product into the Euclidean one. All Euclidean
// geometry on deviators (projections, support points) runs in these
// coordinates.
inline Eigen::Vector2d ortho(const DevTensor2& d) {
  constexpr double rt2 = 1.4142135623730951;
  return {rt2 * d.d11, rt2 * d.d12};
}

inline DevTensor2 from_ortho(const Eigen::Vector2d& x) {
  constexpr double inv_rt2 = 0.7071067811865476;
  return {inv_rt2 * x.x(), inv_rt2 * x.y()};
}

// Isotropic plane elasticity: shear modulus mu, modulus of compression kappa.
struct Elasticity {
  double mu = 1.0;
  double kappa = 1.0;

  Elasticity(double mu_, double kappa_) : mu(mu_), kappa(kappa_) {
    if (!(mu > 0.0)) throw std::invalid_argument("Elasticity: mu must be > 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("Elasticity: kappa must be > 0");
  }
};

// C e = 2 mu dev(e) + kappa tr(e) I.
inline SymTensor2 apply_elasticity(const Elasticity& el, const SymTensor2& e) {
  const SymTensor2 d = deviatoric(e).sym();
  const double p = el.kappa * trace(e);
  return {2.0 * el.mu * d.m11 + p, 2.0 * el.mu * d.m12, 2.0 * el.mu * d.m22 + p};
}

// Stored energy density Q(e) = mu |dev e|^2 + kappa/2 tr(e)^2 = 1/2 (C e) : e.
inline double elastic_energy(const Elasticity& el, const SymTensor2& e) {
  const DevTensor2 d = deviatoric(e);
  const double tr = trace(e);
  return el.mu * dot(d, d) + 0.5 * el.kappa * tr * tr;
}

}  // namespace softplast
