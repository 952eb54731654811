#include <doctest.h>

#include <cmath>
#include <random>

#include "softplast/errors.hpp"
#include "softplast/evolution.hpp"

using namespace softplast;

namespace {

constexpr double kRt3 = 1.7320508075688772;

MaterialModel ball_model(double mu = 1.0, double kappa = 1.0) {
  return MaterialModel(Elasticity(mu, kappa), YieldSet::ball(1.0),
                       SofteningPotential::sqrt_family(0.5));
}

MaterialModel octa_model() {
  const std::vector<Eigen::Vector3d> verts = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                              {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  return MaterialModel(Elasticity(1.0, 1.0), YieldSet::polytope(verts),
                       SofteningPotential::sqrt_family(0.3));
}

// Shear load with |dev| = 1 per unit time.
const SymTensor2 kShear{1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0)};

DevTensor2 random_dev(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

}  // namespace

TEST_CASE("radial return") {
  const double r = kRt3 / 2.0;
  // zero trial stress
  CHECK(norm(radial_return(1.0, r, {0.1, -0.2}, SymTensor2{0.1, -0.2, -0.1})) ==
        doctest::Approx(norm(DevTensor2{0.1, -0.2})));
  // exactly at yield: no flow
  const SymTensor2 at_yield = (kRt3 / 4.0) * kShear;
  CHECK(norm(radial_return(1.0, r, {0, 0}, at_yield)) == doctest::Approx(0.0));
  // past yield: overshoot turns into flow along the trial direction
  const SymTensor2 past = 0.6 * kShear;
  const DevTensor2 p = radial_return(1.0, r, {0, 0}, past);
  CHECK(norm(p) == doctest::Approx((1.2 - r) / 2.0).epsilon(1e-12));
  CHECK(norm(p) == doctest::Approx(0.16699).epsilon(1e-4));
  const DevTensor2 dir_trial = deviatoric(past);
  CHECK(p.d11 * dir_trial.d12 == doctest::Approx(p.d12 * dir_trial.d11).epsilon(1e-12));
}

TEST_CASE("prox solve agrees with the return map on the ball") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double mu = u(rng);
    const MaterialModel model = ball_model(mu);
    const DevTensor2 p_prev = random_dev(rng, 0.3);
    const SymTensor2 ew =
        random_dev(rng, 0.7).sym() + (0.3 * u(rng)) * SymTensor2::identity();
    const DevTensor2 a = radial_return(mu, model.effective_radius(), p_prev, ew);
    const DevTensor2 b = prox_solve(model, p_prev, ew, 1e-10, 20000);
    CHECK(norm(a - b) <= 1e-6);
  }
  // elastic trial: unchanged
  const MaterialModel model = ball_model();
  const DevTensor2 p0{0.05, 0.0};
  const SymTensor2 small = 0.2 * kShear;
  CHECK(norm(prox_solve(model, p0, small, 1e-10, 10) - p0) == 0.0);
}

TEST_CASE("prox solve against a brute-force grid on the polytope") {
  const MaterialModel model = octa_model();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const DevTensor2 p_prev = random_dev(rng, 0.2);
    const SymTensor2 ew = random_dev(rng, 1.2).sym();
    const DevTensor2 got = prox_solve(model, p_prev, ew, 1e-10, 50000);

    // exhaustive minimization of mu |dev(ew) - p|^2 + H_eff(p - p_prev, 0);
    // the box covers the largest possible plastic move
    const double half = norm(deviatoric(ew) - p_prev) / std::sqrt(2.0) + 0.25;
    const int n = 200;
    double best = 1e300;
    DevTensor2 argbest;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const DevTensor2 p{p_prev.d11 - half + 2.0 * half * i / (n - 1),
                           p_prev.d12 - half + 2.0 * half * j / (n - 1)};
        const DevTensor2 ee = deviatoric(ew) - p;
        const double cost =
            model.elastic.mu * dot(ee, ee) +
            effective_dissipation(model.yield, model.softening, p - p_prev, 0.0);
        if (cost < best) {
          best = cost;
          argbest = p;
        }
      }
    }
    const double cell = 2.0 * half / (n - 1);
    CHECK(norm(got - argbest) <= 2.0 * cell * std::sqrt(2.0));
  }
}

TEST_CASE("prox solve reports nonconvergence with diagnostics") {
  const MaterialModel model = octa_model();
  const SymTensor2 far = 5.0 * kShear;
  CHECK_THROWS_AS(prox_solve(model, {0, 0}, far, 1e-12, 1), SolverFailure);
  try {
    prox_solve(model, {0, 0}, far, 1e-12, 1);
  } catch (const SolverFailure& f) {
    CHECK(f.iterations == 1);
    CHECK(std::isfinite(f.residual));
  }
}

TEST_CASE("measure update bookkeeping") {
  const MaterialModel model = ball_model();
  EvolutionState state;
  state.measure.atom_z = 1.0;
  state.v_total = measure_softening(state.measure, model.softening);

  // zero increment: nothing moves
  const MeasureUpdate none = update_measure_and_energies(model, state, {0, 0});
  CHECK(none.diss_increment == 0.0);
  CHECK(none.v_increment == 0.0);
  CHECK(none.measure.conc_zhat == 0.0);

  // |dp| = s: dissipation (2/sqrt3) s, softening -s/(2 sqrt3)
  const double s = 0.37;
  const DevTensor2 dp = (s / 2.0) * DevTensor2{1.0, 1.0};
  const MeasureUpdate upd = update_measure_and_energies(model, state, dp);
  CHECK(norm(dp) == doctest::Approx(s));
  CHECK(upd.diss_increment == doctest::Approx(2.0 / kRt3 * s).epsilon(1e-10));
  CHECK(upd.v_increment == doctest::Approx(-s / (2.0 * kRt3)).epsilon(1e-10));
  CHECK(upd.measure.alpha == 0.5);
  // increment identity: diss + v == effective_dissipation(dp, 0)
  const double heff = effective_dissipation(model.yield, model.softening, dp, 0.0);
  CHECK(upd.diss_increment + upd.v_increment == doctest::Approx(heff).epsilon(1e-12));

  // two colinear steps match one combined step
  EvolutionState mid = state;
  mid.measure = upd.measure;
  const MeasureUpdate second = update_measure_and_energies(model, mid, 2.0 * dp);
  const MeasureUpdate combined = update_measure_and_energies(model, state, 3.0 * dp);
  CHECK(upd.diss_increment + second.diss_increment ==
        doctest::Approx(combined.diss_increment).epsilon(1e-11));
  CHECK(upd.v_increment + second.v_increment ==
        doctest::Approx(combined.v_increment).epsilon(1e-11));
  CHECK(second.measure.conc_zhat == doctest::Approx(combined.measure.conc_zhat).epsilon(1e-11));
  CHECK(second.colinear);
  // a reversed increment is flagged
  const MeasureUpdate reversed = update_measure_and_energies(model, mid, -1.0 * dp);
  CHECK_FALSE(reversed.colinear);

  // the softening functional of the summary does not depend on the branch
  // weight: both concentration branches carry the same recession value
  MeasureSummary m = upd.measure;
  m.alpha = 0.3;
  const double v_low = measure_softening(m, model.softening);
  m.alpha = 0.7;
  CHECK(v_low == doctest::Approx(measure_softening(m, model.softening)).epsilon(1e-15));
  CHECK(v_low == doctest::Approx(model.softening.value(m.atom_z) -
                                 model.softening.asymptote() * m.conc_zhat)
                     .epsilon(1e-14));
}

TEST_CASE("incremental step elastic, plastic and idle") {
  const MaterialModel model = ball_model();
  EvolutionState state;
  state.measure.atom_z = 1.0;
  state.v_total = measure_softening(state.measure, model.softening);

  // trial inside the effective domain: purely elastic
  const SymTensor2 small = 0.25 * kShear;
  const EvolutionState s1 = incremental_step(model, state, 0.25, small);
  CHECK(norm(s1.p) == 0.0);
  CHECK(norm(deviatoric(s1.sigma)) == doctest::Approx(0.5));
  CHECK(s1.diss_H == 0.0);

  // plastic step
  const SymTensor2 big = 0.6 * kShear;
  const EvolutionState s2 = incremental_step(model, s1, 0.6, big);
  CHECK(norm(s2.p) == doctest::Approx((1.2 - kRt3 / 2.0) / 2.0).epsilon(1e-12));
  CHECK(norm(deviatoric(s2.sigma)) == doctest::Approx(kRt3 / 2.0).epsilon(1e-12));

  // zero increment: nothing changes
  const EvolutionState s3 = incremental_step(model, s2, 0.7, big);
  CHECK(norm(s3.p - s2.p) == 0.0);
  CHECK(s3.diss_H == s2.diss_H);
  CHECK(s3.work == s2.work);
}

TEST_CASE("worked shear evolution") {
  const MaterialModel model = ball_model();
  const LoadProgram load = LoadProgram::monotone_affine(kShear);
  const double t0 = kRt3 / 4.0;
  const double t_end = 2.0 * t0;
  const auto record =
      run_evolution(model, load, TimeGrid::uniform(t_end, 1000), {0, 0}, 1.0);

  // p(t) = 0 before t0, |p(t)| = t - t0 after; |sigma| = min(2t, sqrt3/2)
  for (std::size_t i = 0; i < record.size(); i += 37) {
    const EvolutionState& s = record[i];
    const double expect_p = std::max(0.0, s.t - t0);
    CHECK(norm(s.p) == doctest::Approx(expect_p).epsilon(1e-10));
    const double expect_sig = std::min(2.0 * s.t, kRt3 / 2.0);
    CHECK(norm(deviatoric(s.sigma)) == doctest::Approx(expect_sig).epsilon(1e-10));
  }

  const EvolutionState& last = record.back();
  CHECK(norm(last.p) == doctest::Approx(t0).epsilon(1e-10));
  CHECK(last.measure.conc_zhat == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(last.diss_H == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(std::abs(energy_balance_residual(model.elastic, record)) <= 1e-10);

  // atom immutability and the per-step drift identity
  for (std::size_t i = 1; i < record.size(); ++i) {
    const EvolutionState& a = record[i - 1];
    const EvolutionState& b = record[i];
    CHECK(b.measure.atom_z == 1.0);
    CHECK(norm(b.measure.atom_p) == 0.0);
    const double lhs = (b.diss_H - a.diss_H) + (b.v_total - a.v_total);
    const double rhs = effective_dissipation(model.yield, model.softening, b.p - a.p, 0.0);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
    // barycentre identities
    CHECK(norm(barycentre_p(b.measure) - b.p) <= 1e-14);
    CHECK(barycentre_z(b.measure) == doctest::Approx(1.0));
    // time regularity: |dp| <= |dEw| along the monotone ray
    CHECK(norm(b.p - a.p) <= (b.t - a.t) * (1.0 + 1e-10));
    CHECK(b.diss_H >= a.diss_H);
    // monotone loading: stress norm nondecreasing, bounded by r_eff at yield
    CHECK(norm(deviatoric(b.sigma)) >= norm(deviatoric(a.sigma)) - 1e-12);
    CHECK(norm(deviatoric(b.sigma)) <= model.effective_radius() + 1e-12);
  }

  // rate independence: halving the step leaves the nodal states unchanged
  const auto fine =
      run_evolution(model, load, TimeGrid::uniform(t_end, 2000), {0, 0}, 1.0);
  CHECK(norm(fine.back().p - last.p) <= 1e-10);
  CHECK(norm(fine.back().e - last.e) <= 1e-10);
  CHECK(std::abs(fine.back().diss_H - last.diss_H) <= 1e-8);
}

TEST_CASE("elastic-only run balances stored energy against work") {
  const MaterialModel model = ball_model();
  const double t_end = 0.3;  // below the yield time sqrt(3)/4
  const auto record = run_evolution(model, LoadProgram::monotone_affine(kShear),
                                    TimeGrid::uniform(t_end, 100), {0, 0}, 1.0);
  const EvolutionState& last = record.back();
  CHECK(norm(last.p) == 0.0);
  CHECK(elastic_energy(model.elastic, last.e) ==
        doctest::Approx(model.elastic.mu * t_end * t_end).epsilon(1e-13));
  CHECK(last.work == doctest::Approx(model.elastic.mu * t_end * t_end).epsilon(1e-13));
  CHECK(std::abs(energy_balance_residual(model.elastic, record)) <= 1e-14);
}

TEST_CASE("each incremental minimizer beats random competitors") {
  std::mt19937_64 rng(909);
  for (const MaterialModel& model : {ball_model(), octa_model()}) {
    const LoadProgram load = LoadProgram::monotone_affine(kShear);
    const auto record =
        run_evolution(model, load, TimeGrid::uniform(1.0, 40), {0, 0}, 0.5);
    for (std::size_t i = 5; i < record.size(); i += 7) {
      const EvolutionState& prev = record[i - 1];
      const EvolutionState& cur = record[i];
      const SymTensor2 ew = cur.e + cur.p.sym();
      const double achieved =
          elastic_energy(model.elastic, cur.e) +
          effective_dissipation(model.yield, model.softening, cur.p - prev.p, 0.0);
      for (int trial = 0; trial < 200; ++trial) {
        const DevTensor2 p = cur.p + random_dev(rng, trial % 2 ? 1e-3 : 0.3);
        const double competitor =
            elastic_energy(model.elastic, ew - p) +
            effective_dissipation(model.yield, model.softening, p - prev.p, 0.0);
        CHECK(achieved <= competitor + 1e-10);
      }
    }
  }
}

TEST_CASE("pure rotation load stays elastic at zero") {
  const MaterialModel model = ball_model();
  const LoadProgram load = LoadProgram::monotone_affine(SymTensor2{});
  const auto record = run_evolution(model, load, TimeGrid::uniform(1.0, 50), {0, 0}, 0.0);
  for (const auto& s : record) {
    CHECK(norm(s.p) == 0.0);
    CHECK(norm(s.e) == 0.0);
    CHECK(s.diss_H == 0.0);
    CHECK(s.work == 0.0);
  }
  CHECK(energy_balance_residual(model.elastic, record) == 0.0);
}

TEST_CASE("energy balance with trapezoid integration converges") {
  const MaterialModel model = ball_model();
  const LoadProgram load = LoadProgram::monotone_affine(kShear);
  const double t_end = kRt3 / 2.0;
  SolverOptions opts;
  opts.work = WorkIntegration::trapezoid;
  // odd step counts put the yield instant strictly inside a step, so the
  // trapezoid rule sees the kink and its error is visible
  double residual_prev = 0.0;
  for (int n : {101, 1001}) {
    const auto record =
        run_evolution(model, load, TimeGrid::uniform(t_end, n), {0, 0}, 1.0, opts);
    const double res = std::abs(energy_balance_residual(model.elastic, record));
    CHECK(res <= 5.0 / n);
    CHECK(res <= record.back().work_error + 1e-12);
    if (n == 1001) CHECK(res < residual_prev);
    residual_prev = res;
    // exact mode integrates through the same kink analytically
    const auto exact =
        run_evolution(model, load, TimeGrid::uniform(t_end, n), {0, 0}, 1.0);
    CHECK(std::abs(energy_balance_residual(model.elastic, exact)) <= 1e-10);
  }
}

TEST_CASE("piecewise linear loads integrate with tracked error") {
  const MaterialModel model = ball_model();
  const LoadProgram load = LoadProgram::piecewise_linear(
      {{0.0, SymTensor2{}}, {0.5, 0.5 * kShear}, {1.0, 0.9 * kShear}});
  const auto record = run_evolution(model, load, TimeGrid::uniform(1.0, 200), {0, 0}, 1.0);
  const double res = std::abs(energy_balance_residual(model.elastic, record));
  CHECK(res <= record.back().work_error + 1e-10);
  // the knot at t = 0.5 was merged into the grid
  bool found = false;
  for (const auto& s : record) found = found || std::abs(s.t - 0.5) < 1e-15;
  CHECK(found);
}

TEST_CASE("stability check accepts stable states and flags unstable ones") {
  const MaterialModel model = ball_model();

  // unstressed state
  EvolutionState rest;
  rest.measure.atom_z = 0.0;
  CHECK(stability_check(model, rest, 4000, 9) <= 0.0);

  // mid-evolution state from the worked example
  const auto record = run_evolution(model, LoadProgram::monotone_affine(kShear),
                                    TimeGrid::uniform(0.65, 300), {0, 0}, 1.0);
  CHECK(stability_check(model, record.back(), 10000, 10) <= 0.0);

  // hand-built state past the effective yield surface
  EvolutionState bad;
  bad.e = 0.6 * kShear;
  bad.sigma = apply_elasticity(model.elastic, bad.e);
  bad.measure.atom_z = 1.0;
  CHECK(norm(deviatoric(bad.sigma)) == doctest::Approx(1.2));
  CHECK(stability_check(model, bad, 10000, 11) >= 1e-3);
}

TEST_CASE("initial stability gate rejects unstable initial data") {
  const MaterialModel model = ball_model();
  // a large initial plastic strain against zero boundary data leaves the
  // stress far outside the effective domain at t = 0
  const LoadProgram load = LoadProgram::monotone_affine(kShear);
  CHECK_THROWS_AS(
      run_evolution(model, load, TimeGrid::uniform(0.5, 10), {2.0, 0.0}, 0.0),
      SolverFailure);
}

TEST_CASE("polytope evolution runs through the proximal solver") {
  const MaterialModel model = octa_model();
  CHECK_THROWS_AS(model.effective_radius(), ValidationError);
  const LoadProgram load = LoadProgram::monotone_affine(kShear);
  const auto record = run_evolution(model, load, TimeGrid::uniform(1.2, 150), {0, 0}, 0.5);

  const EvolutionState& last = record.back();
  CHECK(norm(last.p) > 0.1);  // well past yield
  for (std::size_t i = 1; i < record.size(); ++i) {
    const EvolutionState& a = record[i - 1];
    const EvolutionState& b = record[i];
    // projected stress stays inside the effective domain
    CHECK(effective_domain_contains(model.yield, model.softening,
                                    deviatoric(b.sigma), 0.0, 1e-9));
    // drift identity holds for anisotropic flow too
    const double lhs = (b.diss_H - a.diss_H) + (b.v_total - a.v_total);
    const double rhs =
        effective_dissipation(model.yield, model.softening, b.p - a.p, 0.0);
    CHECK(std::abs(lhs - rhs) <= 1e-11);
  }
  // work integration falls back to the trapezoid rule on plastic steps and
  // reports its error bound
  CHECK(last.work_error > 0.0);
  CHECK(std::abs(energy_balance_residual(model.elastic, record)) <=
        last.work_error + 1e-10);

  // a starved solver surfaces as a failure with the step index attached
  SolverOptions starved;
  starved.max_iter = 1;
  starved.tol = 1e-14;
  try {
    run_evolution(model, load, TimeGrid::uniform(1.2, 10), {0, 0}, 0.5, starved);
    CHECK(false);
  } catch (const SolverFailure& f) {
    CHECK(f.time_index >= 1);
  }
}

TEST_CASE("path-dependent summaries are flagged on load reversal") {
  const MaterialModel model = ball_model();
  const LoadProgram load = LoadProgram::piecewise_linear(
      {{0.0, SymTensor2{}}, {1.0, 1.0 * kShear}, {2.0, -1.0 * kShear}});
  const auto record = run_evolution(model, load, TimeGrid::uniform(2.0, 400), {0, 0}, 1.0);
  CHECK(record.back().path_dependent_summary);
  CHECK_FALSE(record[record.size() / 4].path_dependent_summary);
}
