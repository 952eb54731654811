#include <doctest.h>

#include <random>

#include "softplast/tensor.hpp"

using namespace softplast;

namespace {

SymTensor2 random_sym(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), g(rng)};
}

}  // namespace

TEST_CASE("deviatoric split") {
  // identity has no deviatoric part
  const DevTensor2 d0 = deviatoric(SymTensor2::identity());
  CHECK(d0.d11 == 0.0);
  CHECK(d0.d12 == 0.0);

  // diag(2, 0) -> diag(1, -1)
  const DevTensor2 d1 = deviatoric({2.0, 0.0, 0.0});
  CHECK(d1.d11 == doctest::Approx(1.0));
  CHECK(d1.d12 == 0.0);
  CHECK(d1.sym().m22 == doctest::Approx(-1.0));

  // already trace-free: fixed point
  const SymTensor2 m{1.0, 3.0, -1.0};
  const DevTensor2 d2 = deviatoric(m);
  CHECK(d2.d11 == 1.0);
  CHECK(d2.d12 == 3.0);

  // reassembling trace and deviator recovers the tensor
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const SymTensor2 a = random_sym(rng);
    const SymTensor2 back = deviatoric(a).sym() + (0.5 * trace(a)) * SymTensor2::identity();
    CHECK(norm(back - a) < 1e-15);
  }
}

TEST_CASE("elasticity application") {
  const Elasticity unit(1.0, 1.0);
  // trace-free input: pure shear scaling
  const SymTensor2 c1 = apply_elasticity(unit, {1.0, 0.0, -1.0});
  CHECK(c1.m11 == doctest::Approx(2.0));
  CHECK(c1.m22 == doctest::Approx(-2.0));
  CHECK(c1.m12 == 0.0);
  // identity input: deviator vanishes
  const SymTensor2 c2 = apply_elasticity(unit, SymTensor2::identity());
  CHECK(c2.m11 == doctest::Approx(2.0));
  CHECK(c2.m22 == doctest::Approx(2.0));
  CHECK(c2.m12 == 0.0);

  // general case against the defining formula, plus the energy identity
  const Elasticity el(2.0, 3.0);
  const SymTensor2 e{1.0, 1.0, 0.0};
  const SymTensor2 ce = apply_elasticity(el, e);
  const DevTensor2 ed = deviatoric(e);
  const SymTensor2 expected =
      (2.0 * el.mu) * ed.sym() + (el.kappa * trace(e)) * SymTensor2::identity();
  CHECK(norm(ce - expected) < 1e-14);
  CHECK(dot(ce, e) == doctest::Approx(2.0 * elastic_energy(el, e)).epsilon(1e-14));
}

TEST_CASE("energy density values") {
  const Elasticity unit(1.0, 1.0);
  CHECK(elastic_energy(unit, SymTensor2{}) == 0.0);
  CHECK(elastic_energy(unit, {1.0, 0.0, -1.0}) == doctest::Approx(2.0));
  CHECK(elastic_energy(unit, SymTensor2::identity()) == doctest::Approx(2.0));
}

TEST_CASE("quadratic form bounds and linearity") {
  std::mt19937_64 rng(42);
  const Elasticity el(0.7, 2.3);
  const double alpha_c = std::min(2.0 * el.mu, 2.0 * el.kappa) / 2.0;
  const double beta_c = std::max(2.0 * el.mu, 2.0 * el.kappa) / 2.0;
  for (int i = 0; i < 10000; ++i) {
    const SymTensor2 e = random_sym(rng, i % 7 ? 1.0 : 100.0);
    const double q = elastic_energy(el, e);
    const double n2 = dot(e, e);
    CHECK(q >= alpha_c * n2 * (1.0 - 1e-12));
    CHECK(q <= beta_c * n2 * (1.0 + 1e-12));
    CHECK(norm(apply_elasticity(el, e)) <= 2.0 * beta_c * std::sqrt(n2) * (1.0 + 1e-12));
  }
  for (int i = 0; i < 1000; ++i) {
    const SymTensor2 a = random_sym(rng);
    const SymTensor2 b = random_sym(rng);
    const SymTensor2 lhs = apply_elasticity(el, 0.3 * a + (-1.7) * b);
    const SymTensor2 rhs =
        0.3 * apply_elasticity(el, a) + (-1.7) * apply_elasticity(el, b);
    CHECK(norm(lhs - rhs) < 1e-12 * (1.0 + norm(rhs)));
    // deviatoric and spherical subspaces are invariant
    const SymTensor2 cd = apply_elasticity(el, deviatoric(a).sym());
    CHECK(std::abs(trace(cd)) < 1e-14 * (1.0 + norm(cd)));
  }
}

TEST_CASE("elasticity rejects nonpositive moduli") {
  CHECK_THROWS(Elasticity(0.0, 1.0));
  CHECK_THROWS(Elasticity(1.0, -2.0));
}

TEST_CASE("deviator norm uses both off-stored entries") {
  const DevTensor2 d{3.0, 4.0};
  CHECK(norm(d) == doctest::Approx(std::sqrt(2.0 * 25.0)));
  CHECK(ortho(d).norm() == doctest::Approx(norm(d)));
  const DevTensor2 back = from_ortho(ortho(d));
  CHECK(back.d11 == doctest::Approx(3.0));
  CHECK(back.d12 == doctest::Approx(4.0));
}
