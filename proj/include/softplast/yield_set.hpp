#pragma once

#include <vector>

#include <Eigen/Core>

#include "softplast/tensor.hpp"

namespace softplast {

// Convex set of admissible (stress, internal force) pairs in the space of
// trace-free symmetric 2x2 tensors times R. Internally everything lives in
// orthonormal coordinates y = (sqrt(2) s11, sqrt(2) s12, zeta), so Euclidean
// distances and dot products agree with the tensor ones.
//
// Construction enforces: the set contains a centered ball of radius A > 0 and
// fits in one of radius B, it is symmetric under zeta -> -zeta, and
// (sigma, zeta) in K implies (0, zeta) in K. Balls and ellipsoids satisfy the
// standing strict-convexity assumption; polytopes do not and are flagged
// non-conforming (they exist as an exact brute-force harness).
class YieldSet {
 public:
  enum class Kind { ball, ellipsoid, polytope };

  struct Face {
    Eigen::Vector3d normal;  // unit
    double offset;           // face plane is {y : normal . y = offset}
  };

  static YieldSet ball(double radius);
  static YieldSet ellipsoid(double s_sigma, double s_zeta);
  // Vertices given as (d11, d12, zeta) tensor components.
  static YieldSet polytope(const std::vector<Eigen::Vector3d>& vertices);

  Kind kind() const { return kind_; }
  bool conforming() const { return kind_ != Kind::polytope; }

  // Support function H(xi, theta) = sup over the set of sigma:xi + zeta theta.
  double support(const DevTensor2& xi, double theta) const;

  bool contains(const DevTensor2& sigma, double zeta, double tol = 0.0) const;

  // Height of the set along the internal-force axis: support(0, 1).
  double yield_height() const { return yield_height_; }
  // Radii of the largest inscribed and smallest enclosing centered balls.
  double inner_radius() const { return inner_radius_; }
  double outer_radius() const { return outer_radius_; }

  double radius() const;       // ball only
  double sigma_scale() const;  // ellipsoid only
  double zeta_scale() const;   // ellipsoid only

  // Polytope accessors (orthonormal coordinates).
  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }

 private:
  YieldSet() = default;

  Kind kind_ = Kind::ball;
  double radius_ = 1.0;
  double s_sigma_ = 1.0;
  double s_zeta_ = 1.0;
  double yield_height_ = 1.0;
  double inner_radius_ = 1.0;
  double outer_radius_ = 1.0;
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<Face> faces_;
};

}  // namespace softplast
