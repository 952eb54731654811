#include "softplast/yield_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "softplast/errors.hpp"

namespace softplast {
namespace {

Eigen::Vector3d lift(const DevTensor2& xi, double theta) {
  const Eigen::Vector2d x = ortho(xi);
  return {x.x(), x.y(), theta};
}

constexpr double kFaceTol = 1e-12;

// Enumerate supporting planes of the convex hull by brute force over vertex
// triples. Small vertex lists only.
std::vector<YieldSet::Face> hull_faces(const std::vector<Eigen::Vector3d>& v) {
  std::vector<YieldSet::Face> faces;
  const int n = static_cast<int>(v.size());
  double scale = 0.0;
  for (const auto& p : v) scale = std::max(scale, p.norm());
  const double tol = kFaceTol * std::max(1.0, scale);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector3d nrm = (v[j] - v[i]).cross(v[k] - v[i]);
        const double len = nrm.norm();
        if (len < tol) continue;
        nrm /= len;
        double lo = std::numeric_limits<double>::max();
        double hi = std::numeric_limits<double>::lowest();
        for (const auto& p : v) {
          const double d = nrm.dot(p - v[i]);
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
        YieldSet::Face face;
        if (hi <= tol) {
          face.normal = nrm;
        } else if (lo >= -tol) {
          face.normal = -nrm;
        } else {
          continue;  // plane cuts through the hull
        }
        face.offset = face.normal.dot(v[i]);
        bool dup = false;
        for (const auto& f : faces) {
          if ((f.normal - face.normal).norm() < 1e-9 &&
              std::abs(f.offset - face.offset) < 1e-9 * std::max(1.0, scale)) {
            dup = true;
            break;
          }
        }
        if (!dup) faces.push_back(face);
      }
    }
  }
  return faces;
}

}  // namespace

YieldSet YieldSet::ball(double radius) {
  if (!(radius > 0.0))
    throw ValidationError("YieldSet::ball: radius must be > 0");
  YieldSet k;
  k.kind_ = Kind::ball;
  k.radius_ = radius;
  k.yield_height_ = radius;
  k.inner_radius_ = radius;
  k.outer_radius_ = radius;
  return k;
}

YieldSet YieldSet::ellipsoid(double s_sigma, double s_zeta) {
  if (!(s_sigma > 0.0))
    throw ValidationError("YieldSet::ellipsoid: s_sigma must be > 0");
  if (!(s_zeta > 0.0))
    throw ValidationError("YieldSet::ellipsoid: s_zeta must be > 0");
  YieldSet k;
  k.kind_ = Kind::ellipsoid;
  k.s_sigma_ = s_sigma;
  k.s_zeta_ = s_zeta;
  k.yield_height_ = s_zeta;
  k.inner_radius_ = std::min(s_sigma, s_zeta);
  k.outer_radius_ = std::max(s_sigma, s_zeta);
  return k;
}

YieldSet YieldSet::polytope(const std::vector<Eigen::Vector3d>& vertices) {
  if (vertices.size() < 4)
    throw ValidationError("YieldSet::polytope: need at least 4 vertices");
  YieldSet k;
  k.kind_ = Kind::polytope;
  k.vertices_.reserve(vertices.size());
  constexpr double rt2 = 1.4142135623730951;
  for (const auto& v : vertices)
    k.vertices_.push_back({rt2 * v.x(), rt2 * v.y(), v.z()});

  k.faces_ = hull_faces(k.vertices_);
  if (k.faces_.empty())
    throw ValidationError("YieldSet::polytope: degenerate vertex set (no hull faces)");

  double inner = std::numeric_limits<double>::max();
  double outer = 0.0;
  double height = 0.0;
  for (const auto& f : k.faces_) inner = std::min(inner, f.offset);
  for (const auto& v : k.vertices_) {
    outer = std::max(outer, v.norm());
    height = std::max(height, v.z());
  }
  if (!(inner > 0.0))
    throw ValidationError(
        "YieldSet::polytope: origin must be in the interior (inscribed radius A > 0)");
  k.inner_radius_ = inner;
  k.outer_radius_ = outer;
  k.yield_height_ = height;

  const double tol = 1e-10 * std::max(1.0, outer);
  for (const auto& v : k.vertices_) {
    const Eigen::Vector3d mirrored{v.x(), v.y(), -v.z()};
    const Eigen::Vector3d axis{0.0, 0.0, v.z()};
    for (const auto& f : k.faces_) {
      if (f.normal.dot(mirrored) > f.offset + tol)
        throw ValidationError(
            "YieldSet::polytope: set must be symmetric under zeta -> -zeta");
      if (f.normal.dot(axis) > f.offset + tol)
        throw ValidationError(
            "YieldSet::polytope: (sigma, zeta) in K must imply (0, zeta) in K");
    }
  }
  return k;
}

double YieldSet::support(const DevTensor2& xi, double theta) const {
  const Eigen::Vector3d y = lift(xi, theta);
  switch (kind_) {
    case Kind::ball:
      return radius_ * y.norm();
    case Kind::ellipsoid: {
      const double a = s_sigma_ * s_sigma_ * (y.x() * y.x() + y.y() * y.y());
      const double b = s_zeta_ * s_zeta_ * y.z() * y.z();
      return std::sqrt(a + b);
    }
    case Kind::polytope: {
      double best = std::numeric_limits<double>::lowest();
      for (const auto& v : vertices_) best = std::max(best, v.dot(y));
      return best;
    }
  }
  return 0.0;
}

bool YieldSet::contains(const DevTensor2& sigma, double zeta, double tol) const {
  const Eigen::Vector3d y = lift(sigma, zeta);
  switch (kind_) {
    case Kind::ball:
      return y.norm() <= radius_ + tol;
    case Kind::ellipsoid: {
      const double q = (y.x() * y.x() + y.y() * y.y()) / (s_sigma_ * s_sigma_) +
                       y.z() * y.z() / (s_zeta_ * s_zeta_);
      return q <= 1.0 + tol;
    }
    case Kind::polytope: {
      for (const auto& f : faces_)
        if (f.normal.dot(y) > f.offset + tol) return false;
      return true;
    }
  }
  return false;
}

double YieldSet::radius() const {
  if (kind_ != Kind::ball) throw ValidationError("YieldSet::radius: not a ball");
  return radius_;
}

double YieldSet::sigma_scale() const {
  if (kind_ != Kind::ellipsoid)
    throw ValidationError("YieldSet::sigma_scale: not an ellipsoid");
  return s_sigma_;
}

double YieldSet::zeta_scale() const {
  if (kind_ != Kind::ellipsoid)
    throw ValidationError("YieldSet::zeta_scale: not an ellipsoid");
  return s_zeta_;
}

}  // namespace softplast
