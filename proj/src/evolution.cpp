#include "softplast/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "softplast/errors.hpp"

namespace softplast {

LoadProgram LoadProgram::monotone_affine(const SymTensor2& xi0) {
  LoadProgram l;
  l.affine_ = true;
  l.xi0_ = xi0;
  return l;
}

LoadProgram LoadProgram::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2)
    throw ValidationError("LoadProgram: piecewise linear load needs >= 2 knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].t > knots[i - 1].t))
      throw ValidationError("LoadProgram: knot times must be strictly increasing");
  if (knots.front().t < 0.0)
    throw ValidationError("LoadProgram: knot times must be >= 0");
  LoadProgram l;
  l.affine_ = false;
  l.knots_ = std::move(knots);
  return l;
}

SymTensor2 LoadProgram::at(double t) const {
  if (affine_) return t * xi0_;
  if (t <= knots_.front().t) return knots_.front().strain;
  if (t >= knots_.back().t) return knots_.back().strain;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (t <= knots_[i].t) {
      const double w = (t - knots_[i - 1].t) / (knots_[i].t - knots_[i - 1].t);
      return (1.0 - w) * knots_[i - 1].strain + w * knots_[i].strain;
    }
  }
  return knots_.back().strain;
}

TimeGrid TimeGrid::uniform(double t_end, int steps) {
  if (!(t_end > 0.0)) throw ValidationError("TimeGrid: t_end must be > 0");
  if (steps < 1) throw ValidationError("TimeGrid: steps must be >= 1");
  TimeGrid g;
  g.times.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i)
    g.times.push_back(t_end * static_cast<double>(i) / steps);
  return g;
}

DevTensor2 radial_return(double mu, double r_eff, const DevTensor2& p_prev,
                         const SymTensor2& ew) {
  const DevTensor2 trial = 2.0 * mu * (deviatoric(ew) - p_prev);
  const double n = norm(trial);
  // relative slack keeps repeated idle steps from accreting ulp-sized flow
  if (n <= r_eff * (1.0 + 1e-14)) return p_prev;
  const double gamma = (n - r_eff) / (2.0 * mu);
  return p_prev + (gamma / n) * trial;
}

namespace {

// Largest inner product with the slice of the effective domain.
Eigen::Vector2d slice_support_point(const MaterialModel& model,
                                    const std::vector<Eigen::Vector2d>& polygon,
                                    const Eigen::Vector2d& dir) {
  if (model.isotropic_flow()) {
    const double n = dir.norm();
    if (n == 0.0) return {model.effective_radius(), 0.0};
    return (model.effective_radius() / n) * dir;
  }
  Eigen::Vector2d best = polygon.front();
  double bv = dir.dot(best);
  for (const auto& v : polygon) {
    const double val = dir.dot(v);
    if (val > bv) {
      bv = val;
      best = v;
    }
  }
  return best;
}

}  // namespace

DevTensor2 prox_solve(const MaterialModel& model, const DevTensor2& p_prev,
                      const SymTensor2& ew, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ValidationError("prox_solve: tol must be > 0");
  const double mu = model.elastic.mu;
  const DevTensor2 trial = 2.0 * mu * (deviatoric(ew) - p_prev);
  if (effective_domain_contains(model.yield, model.softening, trial, 0.0,
                                1e-14 * (1.0 + norm(trial))))
    return p_prev;

  std::vector<Eigen::Vector2d> polygon;
  if (!model.isotropic_flow())
    polygon = effective_domain_slice(model.yield, model.softening);

  const Eigen::Vector2d target = ortho(trial);
  // Frank-Wolfe with exact line search; iterates are convex combinations of
  // support points, so the projected stress stays feasible throughout.
  std::vector<double> weights(polygon.size(), 0.0);
  Eigen::Vector2d sigma = Eigen::Vector2d::Zero();
  if (!polygon.empty()) {
    weights[0] = 1.0;
    sigma = polygon[0];
  }
  auto satisfied = [&](const Eigen::Vector2d& s) {
    const DevTensor2 dp = from_ortho((target - s) / (2.0 * mu));
    const double heff = effective_dissipation(model.yield, model.softening, dp, 0.0);
    const double compl_res = std::abs(dot(from_ortho(s), dp) - heff);
    return compl_res <= tol * (1.0 + norm(dp));
  };

  double gap = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    if (satisfied(sigma)) return p_prev + from_ortho((target - sigma) / (2.0 * mu));
    const Eigen::Vector2d g = target - sigma;

    std::size_t fw_idx = 0;
    Eigen::Vector2d fw;
    if (polygon.empty()) {
      fw = slice_support_point(model, polygon, g);
    } else {
      double bv = g.dot(polygon[0]);
      for (std::size_t i = 1; i < polygon.size(); ++i) {
        const double val = g.dot(polygon[i]);
        if (val > bv) {
          bv = val;
          fw_idx = i;
        }
      }
      fw = polygon[fw_idx];
    }
    gap = g.dot(fw - sigma);

    // Away steps over the active vertex set give linear convergence on
    // polygonal slices, where plain Frank-Wolfe zig-zags.
    Eigen::Vector2d step_dir = fw - sigma;
    double step_max = 1.0;
    std::size_t away_idx = polygon.size();
    if (!polygon.empty()) {
      double worst = 0.0;
      bool found = false;
      for (std::size_t i = 0; i < polygon.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        const double val = g.dot(polygon[i]);
        if (!found || val < worst) {
          worst = val;
          away_idx = i;
          found = true;
        }
      }
      if (found && g.dot(sigma - polygon[away_idx]) > gap && weights[away_idx] < 1.0) {
        step_dir = sigma - polygon[away_idx];
        step_max = weights[away_idx] / (1.0 - weights[away_idx]);
      } else {
        away_idx = polygon.size();
      }
    }

    const double denom = step_dir.squaredNorm();
    if (denom <= 0.0) break;
    const double step = std::clamp(g.dot(step_dir) / denom, 0.0, step_max);
    if (!polygon.empty()) {
      if (away_idx < polygon.size()) {
        for (auto& w : weights) w *= (1.0 + step);
        weights[away_idx] -= step;
      } else {
        for (auto& w : weights) w *= (1.0 - step);
        weights[fw_idx] += step;
      }
    }
    sigma += step * step_dir;
  }

  const DevTensor2 last = p_prev + from_ortho((target - sigma) / (2.0 * mu));
  throw SolverFailure("prox_solve: duality criterion not met within max_iter", last,
                      gap / (2.0 * mu), max_iter);
}

MeasureUpdate update_measure_and_energies(const MaterialModel& model,
                                          const EvolutionState& state,
                                          const DevTensor2& dp) {
  MeasureUpdate out;
  out.measure = state.measure;
  if (norm(dp) == 0.0) return out;

  const double amp = oscillation_amplitude(model.yield, model.softening, dp);
  out.measure.conc_p = state.measure.conc_p + dp;
  out.measure.conc_zhat = state.measure.conc_zhat + amp;
  out.measure.alpha = 0.5;
  out.diss_increment = model.yield.support(dp, amp);
  out.v_increment = model.softening.recession(amp);

  // Colinear and monotone against the accumulated concentration direction?
  const double nc = norm(state.measure.conc_p);
  if (nc > 0.0) {
    const double proj = dot(state.measure.conc_p, dp);
    const double cross = std::abs(state.measure.conc_p.d11 * dp.d12 -
                                  state.measure.conc_p.d12 * dp.d11);
    out.colinear = proj >= 0.0 && cross <= 1e-12 * nc * norm(dp);
  }
  return out;
}

namespace {

DevTensor2 minimize_step(const MaterialModel& model, const DevTensor2& p_prev,
                         const SymTensor2& ew, const SolverOptions& opts) {
  if (model.isotropic_flow())
    return radial_return(model.elastic.mu, model.effective_radius(), p_prev, ew);
  return prox_solve(model, p_prev, ew, opts.tol, opts.max_iter);
}

struct WorkIncrement {
  double value = 0.0;
  double error = 0.0;
};

// Work of the boundary load over one step, with Ew affine on [t0, t1].
// sigma : dEw/dt splits into a spherical part (always affine in t) and a
// deviatoric part (affine while elastic, frozen after the yield instant on
// monotone isotropic segments).
WorkIncrement integrate_work(const MaterialModel& model, const EvolutionState& prev,
                             const EvolutionState& next, const SymTensor2& dew,
                             double dt, const SolverOptions& opts) {
  WorkIncrement out;
  if (dt <= 0.0) return out;
  const double rate_tr = trace(dew) / dt;
  const DevTensor2 rate_dev = (1.0 / dt) * deviatoric(dew);

  // Spherical part: tr sigma(t) = 2 kappa tr e(t) is affine (tr p = 0), so
  // the trapezoid is exact. sigma : dEw = dev : dev + tr sigma tr dEw / 2.
  const double sph0 = model.elastic.kappa * trace(prev.e);
  const double sph1 = model.elastic.kappa * trace(next.e);
  out.value += 0.5 * (sph0 + sph1) * rate_tr * dt;

  const DevTensor2 s0 = deviatoric(prev.sigma);
  const DevTensor2 s1 = deviatoric(next.sigma);
  const DevTensor2 dp = next.p - prev.p;

  if (norm(dp) == 0.0) {
    // Elastic: deviatoric stress affine in t.
    out.value += 0.5 * dot(s0 + s1, rate_dev) * dt;
    return out;
  }

  const bool exact_requested = opts.work == WorkIntegration::exact_segment;
  if (exact_requested && model.isotropic_flow()) {
    // Elastic predictor sd(t) = s0 + 2 mu (t - t0) rate_dev hits the yield
    // circle |sd| = r_eff at t_y, after which the stress is frozen at s1
    // whenever the flow stays radial.
    const double r = model.effective_radius();
    const DevTensor2 d = 2.0 * model.elastic.mu * rate_dev;
    const double a = dot(d, d);
    const double b = 2.0 * dot(s0, d);
    const double c = dot(s0, s0) - r * r;
    double ty = 0.0;
    bool have_ty = false;
    if (c >= -1e-12 * r * r) {
      ty = 0.0;  // started on (or numerically at) the yield surface
      have_ty = true;
    } else if (a > 0.0) {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double root = (-b + std::sqrt(disc)) / (2.0 * a);
        if (root >= 0.0 && root <= dt) {
          ty = root;
          have_ty = true;
        }
      }
    }
    if (have_ty) {
      // Radial flow keeps the stress pinned where the predictor first hits
      // the circle; if that point differs from the final stress the path
      // slides along the circle and only the trapezoid bound applies.
      const DevTensor2 sy = s0 + ty * d;
      if (norm(sy - s1) <= 1e-9 * (1.0 + r)) {
        out.value += 0.5 * dot(s0 + sy, rate_dev) * ty;  // affine branch
        out.value += dot(s1, rate_dev) * (dt - ty);      // frozen branch
        return out;
      }
    }
  }

  // Fallback: trapezoid with a kink-error bound.
  out.value += 0.5 * dot(s0 + s1, rate_dev) * dt;
  out.error += 0.5 * norm(s1 - s0) * norm(rate_dev) * dt;
  return out;
}

}  // namespace

EvolutionState incremental_step(const MaterialModel& model, const EvolutionState& state,
                                double t_new, const SymTensor2& ew_new,
                                const SolverOptions& opts) {
  EvolutionState next = state;
  next.t = t_new;
  next.p = minimize_step(model, state.p, ew_new, opts);
  next.e = ew_new - next.p;
  next.sigma = apply_elasticity(model.elastic, next.e);

  const DevTensor2 dp = next.p - state.p;
  const MeasureUpdate upd = update_measure_and_energies(model, state, dp);
  next.measure = upd.measure;
  next.diss_H = state.diss_H + upd.diss_increment;
  next.v_total = state.v_total + upd.v_increment;
  if (!upd.colinear) next.path_dependent_summary = true;

  const SymTensor2 ew_old = state.e + state.p.sym();
  const WorkIncrement w =
      integrate_work(model, state, next, ew_new - ew_old, t_new - state.t, opts);
  next.work = state.work + w.value;
  next.work_error = state.work_error + w.error;
  return next;
}

std::vector<EvolutionState> run_evolution(const MaterialModel& model,
                                          const LoadProgram& load, const TimeGrid& grid,
                                          const DevTensor2& p0, double z0,
                                          const SolverOptions& opts) {
  if (grid.times.size() < 2)
    throw ValidationError("run_evolution: time grid needs at least 2 nodes");
  for (std::size_t i = 1; i < grid.times.size(); ++i)
    if (!(grid.times[i] > grid.times[i - 1]))
      throw ValidationError("run_evolution: time grid must be strictly increasing");

  std::vector<double> times = grid.times;
  if (!load.affine()) {
    for (const auto& k : load.knots())
      if (k.t > times.front() && k.t < times.back()) times.push_back(k.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                times.end());
  }

  EvolutionState init;
  init.t = times.front();
  init.p = p0;
  init.e = load.at(init.t) - p0;
  init.sigma = apply_elasticity(model.elastic, init.e);
  init.measure.atom_p = p0;
  init.measure.atom_z = z0;
  init.v_total = measure_softening(init.measure, model.softening);

  if (opts.check_initial_stability) {
    const double worst =
        stability_check(model, init, opts.initial_stability_samples, opts.seed);
    if (worst > 1e-9)
      throw SolverFailure("run_evolution: initial state fails the stability check",
                          p0, worst, 0);
  }

  std::vector<EvolutionState> record;
  record.reserve(times.size());
  record.push_back(init);
  for (std::size_t i = 1; i < times.size(); ++i) {
    try {
      record.push_back(
          incremental_step(model, record.back(), times[i], load.at(times[i]), opts));
    } catch (SolverFailure& f) {
      f.time_index = static_cast<int>(i);
      throw;
    }
  }
  return record;
}

double energy_balance_residual(const Elasticity& el,
                               const std::vector<EvolutionState>& record) {
  if (record.empty()) return 0.0;
  const EvolutionState& a = record.front();
  const EvolutionState& b = record.back();
  return elastic_energy(el, b.e) + b.diss_H + b.v_total - elastic_energy(el, a.e) -
         a.v_total - b.work;
}

double stability_check(const MaterialModel& model, const EvolutionState& state,
                       int n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  static constexpr double scales[4] = {1e-4, 1e-2, 1.0, 1e2};

  const double q0 = elastic_energy(model.elastic, state.e);
  const double v0 = model.softening.value(state.measure.atom_z);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    Eigen::Vector3d u{gauss(rng), gauss(rng), gauss(rng)};
    const double n = u.norm();
    if (n == 0.0) continue;
    u /= n;
    const double scale = scales[i % 4];
    const DevTensor2 dp = from_ortho({scale * u.x(), scale * u.y()});
    const double dz = scale * u.z();
    const double cost = elastic_energy(model.elastic, state.e - dp.sym()) +
                        model.yield.support(dp, dz) +
                        model.softening.value(state.measure.atom_z + dz);
    worst = std::max(worst, q0 + v0 - cost);
  }
  return worst;
}

}  // namespace softplast
