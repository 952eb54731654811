#include "softplast/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "softplast/errors.hpp"

namespace softplast {

double LaminateField::band_internal_scale() const {
  return beta * k * norm(xi0s) / std::sqrt(3.0);
}

LaminateField::Band LaminateField::band_at(const Eigen::Vector2d& x) const {
  const double s = direction.dot(x);
  const double period = 1.0 / k;
  double u = s - std::floor(s * k) * period;
  if (u >= period) u -= period;  // guard the floating edge
  const double a_width = period - 1.0 / (static_cast<double>(k) * k);
  const double half_bc = 0.5 / (static_cast<double>(k) * k);
  if (u < a_width) return Band::A;
  if (u < a_width + half_bc) return Band::B;
  return Band::C;
}

DevTensor2 LaminateField::plastic_at(const Eigen::Vector2d& x) const {
  return band_at(x) == Band::A ? DevTensor2{} : band_plastic_scale() * xi0s;
}

double LaminateField::internal_at(const Eigen::Vector2d& x) const {
  switch (band_at(x)) {
    case Band::A:
      return 0.0;
    case Band::B:
      return band_internal_scale();
    case Band::C:
      return -band_internal_scale();
  }
  return 0.0;
}

Eigen::Vector2d lamination_direction(const DevTensor2& xi0s) {
  if (norm(xi0s) == 0.0)
    throw ValidationError("lamination_direction: xi0s must be nonzero");
  // Eigenvectors of a trace-free symmetric matrix come in an orthonormal pair
  // (u+, u-) with opposite eigenvalues; b = (u+ - u-)/sqrt(2) makes
  // xi0s = sym(a (x) b) rank-one compatible.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(xi0s.matrix());
  const Eigen::Vector2d minus = eig.eigenvectors().col(0);
  const Eigen::Vector2d plus = eig.eigenvectors().col(1);
  Eigen::Vector2d b = (plus - minus).normalized();
  return b;
}

LaminateField build_laminate(int k, const DevTensor2& xi0s, double beta) {
  if (k < 2) throw ValidationError("build_laminate: refinement index k must be >= 2");
  if (norm(xi0s) == 0.0)
    throw ValidationError("build_laminate: xi0s must be nonzero");
  LaminateField f;
  f.k = k;
  f.beta = beta;
  f.xi0s = xi0s;
  f.direction = lamination_direction(xi0s);
  return f;
}

namespace {

struct BandCounts {
  long a = 0, b = 0, c = 0;
  long total() const { return a + b + c; }
};

BandCounts count_cells(const LaminateField& field, int n) {
  BandCounts counts;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d cell{x, (j + 0.5) * h};
      switch (field.band_at(cell)) {
        case LaminateField::Band::A: ++counts.a; break;
        case LaminateField::Band::B: ++counts.b; break;
        case LaminateField::Band::C: ++counts.c; break;
      }
    }
  }
  return counts;
}

int resolution_for(const LaminateField& field) {
  // >= 4 cells across each active band of width 1/(2k^2), measured along the
  // (possibly diagonal) lamination direction.
  const double kk = static_cast<double>(field.k) * field.k;
  return static_cast<int>(std::ceil(8.0 * std::sqrt(2.0) * kk)) + 1;
}

}  // namespace

double discrete_functional(const LaminateField& field, const YieldSet& k,
                           const SofteningPotential& v, double z0) {
  const int n = resolution_for(field);
  const BandCounts counts = count_cells(field, n);
  const double cell = 1.0 / (static_cast<double>(n) * n);

  // The integrand is constant on each band.
  if (field.beta == 0.0) return 0.0;
  const DevTensor2 p = field.band_plastic_scale() * field.xi0s;
  const double z = field.band_internal_scale();
  const double fb = k.support(p, z) + v.value(z0 + z) - v.value(z0);
  const double fc = k.support(p, -z) + v.value(z0 - z) - v.value(z0);
  return cell * (static_cast<double>(counts.b) * fb + static_cast<double>(counts.c) * fc);
}

LaminateAverages laminate_averages(const LaminateField& field, int cells_per_axis) {
  const BandCounts counts = count_cells(field, cells_per_axis);
  const double total = static_cast<double>(counts.total());
  LaminateAverages avg;
  avg.frac_a = counts.a / total;
  avg.frac_b = counts.b / total;
  avg.frac_c = counts.c / total;
  avg.mean_p = ((counts.b + counts.c) / total) * (field.band_plastic_scale() * field.xi0s);
  avg.mean_z = ((counts.b - counts.c) / total) * field.band_internal_scale();
  return avg;
}

namespace {

// Shared machinery for the lamination envelopes: minimize
//   lambda f(x + (1 - lambda) rho d) + (1 - lambda) f(x - lambda rho d)
// over the mixing weight lambda, scale rho >= 0 and direction d in the
// (xi-direction, theta) plane. Includes the trivial split, so the result
// never exceeds f(x).
class LaminationPass {
 public:
  LaminationPass(std::function<double(const Eigen::Vector2d&)> f,
                 const LaminationSearch& search, long* evals)
      : f_(std::move(f)), search_(search), evals_(evals) {}

  double minimize(const Eigen::Vector2d& x, bool* exhausted) const {
    double best = eval_split(x, 0.5, 0.0, {1.0, 0.0});  // trivial: f(x)
    double b_lambda = 0.5, b_rho = 0.0;
    Eigen::Vector2d b_dir{1.0, 0.0};

    const double scale = 1.0 + x.norm();
    std::vector<double> rhos;
    rhos.reserve(search_.rho_points);
    const double lmin = std::log(search_.rho_min);
    const double lmax = std::log(search_.rho_max);
    for (int i = 0; i < search_.rho_points; ++i) {
      const double w = static_cast<double>(i) / (search_.rho_points - 1);
      rhos.push_back(scale * std::exp(lmin + w * (lmax - lmin)));
    }

    for (int di = 0; di < search_.direction_count; ++di) {
      const double ang = M_PI * di / search_.direction_count;
      const Eigen::Vector2d d{std::cos(ang), std::sin(ang)};
      for (int li = 0; li < search_.lambda_points; ++li) {
        const double lam = static_cast<double>(li) / (search_.lambda_points - 1);
        for (const double rho : rhos) {
          if (*evals_ >= search_.max_evals) {
            if (exhausted) *exhausted = true;
            return best;
          }
          const double val = eval_split(x, lam, rho, d);
          if (val < best) {
            best = val;
            b_lambda = lam;
            b_rho = rho;
            b_dir = d;
          }
        }
      }
    }

    // Pattern-search refinement. Moves include the coordinated
    // (1 - lambda) /= c, rho *= c proposal that walks the concentration
    // valley lambda -> 1, rho -> infinity at fixed mass.
    double step = 0.5;
    for (int round = 0; round < search_.refine_rounds; ++round) {
      bool improved = false;
      const double lam_gap = std::min(b_lambda, 1.0 - b_lambda);
      struct Move {
        double lam, rho, ang_off;
      };
      const double ang0 = std::atan2(b_dir.y(), b_dir.x());
      const double c = 1.0 + step;
      std::vector<Move> moves = {
          {b_lambda, b_rho * c, 0.0},
          {b_lambda, b_rho / c, 0.0},
          {std::min(1.0, b_lambda + step * std::max(lam_gap, 1e-3)), b_rho, 0.0},
          {std::max(0.0, b_lambda - step * std::max(lam_gap, 1e-3)), b_rho, 0.0},
          {1.0 - (1.0 - b_lambda) / c, b_rho * c, 0.0},
          {1.0 - (1.0 - b_lambda) * c, b_rho / c, 0.0},
          {b_lambda / c, b_rho * c, 0.0},
          {b_lambda * c, b_rho / c, 0.0},
          {b_lambda, b_rho, step * 0.5},
          {b_lambda, b_rho, -step * 0.5},
      };
      for (const auto& m : moves) {
        if (*evals_ >= search_.max_evals) {
          if (exhausted) *exhausted = true;
          return best;
        }
        if (m.lam < 0.0 || m.lam > 1.0 || m.rho < 0.0) continue;
        const Eigen::Vector2d d{std::cos(ang0 + m.ang_off), std::sin(ang0 + m.ang_off)};
        const double val = eval_split(x, m.lam, m.rho, d);
        if (val < best - 1e-15 * (1.0 + std::abs(best))) {
          best = val;
          b_lambda = m.lam;
          b_rho = m.rho;
          b_dir = d;
          improved = true;
        }
      }
      if (!improved) step *= 0.6;
      if (step < 1e-9) break;
    }
    return best;
  }

 private:
  double eval_split(const Eigen::Vector2d& x, double lam, double rho,
                    const Eigen::Vector2d& d) const {
    *evals_ += 2;
    if (rho == 0.0 || lam == 0.0 || lam == 1.0) return f_(x);
    const Eigen::Vector2d xp = x + (1.0 - lam) * rho * d;
    const Eigen::Vector2d xm = x - lam * rho * d;
    return lam * f_(xp) + (1.0 - lam) * f_(xm);
  }

  std::function<double(const Eigen::Vector2d&)> f_;
  const LaminationSearch& search_;
  long* evals_;
};

}  // namespace

IteratedEnvelope iterated_envelope(const YieldSet& k, const SofteningPotential& v,
                                   double z0, const DevTensor2& xi, double theta,
                                   const LaminationSearch& search) {
  IteratedEnvelope out;
  // Coordinates (s, u): the point s * xi_dir with internal increment u.
  const double n = norm(xi);
  const DevTensor2 xi_dir = n > 0.0 ? (1.0 / n) * xi : from_ortho({1.0, 0.0});

  auto g0 = [&](const Eigen::Vector2d& su) {
    const DevTensor2 p = su.x() * xi_dir;
    return k.support(p, su.y()) + v.value(z0 + su.y()) - v.value(z0);
  };

  long evals = 0;
  bool exhausted = false;
  const Eigen::Vector2d x{n, theta};
  out.g0 = g0(x);

  // Inner pass gets a leaner grid: it runs once per outer probe. The
  // direction fan keeps both axes.
  LaminationSearch inner = search;
  inner.lambda_points = std::max(9, search.lambda_points / 2 + 1);
  inner.rho_points = std::max(9, search.rho_points * 2 / 3);
  inner.refine_rounds = std::max(20, search.refine_rounds / 2);

  LaminationPass pass1(g0, search, &evals);
  out.g1 = pass1.minimize(x, &exhausted);

  LaminationPass inner_pass(g0, inner, &evals);
  auto g1_fn = [&](const Eigen::Vector2d& su) {
    return inner_pass.minimize(su, &exhausted);
  };
  LaminationPass pass2(g1_fn, search, &evals);
  out.g2 = pass2.minimize(x, &exhausted);
  out.g2 = std::min(out.g2, out.g1);
  out.budget_exhausted = exhausted;
  return out;
}

}  // namespace softplast
