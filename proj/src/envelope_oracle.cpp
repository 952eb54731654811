#include "softplast/envelope_oracle.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "softplast/errors.hpp"

namespace softplast {
namespace {

// Exact lower convex hull of the samples along one grid line (monotone chain
// on the graph (index, value)), written back in place.
void convexify_line(std::vector<double>& vals) {
  const std::size_t n = vals.size();
  if (n < 3) return;
  static thread_local std::vector<std::size_t> hull;
  hull.clear();
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull[hull.size() - 1];
      // drop b if it lies on or above chord a--i
      const double lhs = (vals[b] - vals[a]) * static_cast<double>(i - a);
      const double rhs = (vals[i] - vals[a]) * static_cast<double>(b - a);
      if (lhs >= rhs) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() && hull[seg + 1] < i) ++seg;
    const std::size_t a = hull[seg];
    const std::size_t b = hull[std::min(seg + 1, hull.size() - 1)];
    if (a == b || i <= a) continue;
    const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
    const double chord = (1.0 - w) * vals[a] + w * vals[b];
    if (chord < vals[i]) vals[i] = chord;
  }
}

// One sweep: chord-convexify every grid line of direction (di, dj).
double sweep_direction(Eigen::ArrayXXd& f, int di, int dj) {
  const int nr = static_cast<int>(f.rows());
  const int nc = static_cast<int>(f.cols());
  double max_drop = 0.0;
  std::vector<double> line;
  std::vector<std::pair<int, int>> idx;
  for (int i0 = 0; i0 < nr; ++i0) {
    for (int j0 = 0; j0 < nc; ++j0) {
      const int pi = i0 - di, pj = j0 - dj;
      if (pi >= 0 && pi < nr && pj >= 0 && pj < nc) continue;  // not a line start
      line.clear();
      idx.clear();
      for (int i = i0, j = j0; i >= 0 && i < nr && j >= 0 && j < nc; i += di, j += dj) {
        line.push_back(f(i, j));
        idx.emplace_back(i, j);
      }
      if (line.size() < 3) continue;
      convexify_line(line);
      for (std::size_t t = 0; t < idx.size(); ++t) {
        double& cell = f(idx[t].first, idx[t].second);
        if (line[t] < cell) {
          max_drop = std::max(max_drop, cell - line[t]);
          cell = line[t];
        }
      }
    }
  }
  return max_drop;
}

}  // namespace

EnvelopeTable envelope_oracle(const YieldSet& k, const SofteningPotential& v,
                              const DevTensor2& xi_dir, const EnvelopeGrid& grid) {
  if (grid.n_s < 8 || grid.n_theta < 8)
    throw ValidationError("envelope_oracle: need at least 8 grid points per axis");
  if (std::abs(norm(xi_dir) - 1.0) > 1e-9)
    throw ValidationError("envelope_oracle: xi_dir must be a unit deviator");
  if (!(grid.s_max > 0.0) || !(grid.theta_max > 0.0))
    throw ValidationError("envelope_oracle: grid extents must be positive");

  EnvelopeTable table;
  table.s = Eigen::VectorXd::LinSpaced(grid.n_s, 0.0, grid.s_max);
  table.theta = Eigen::VectorXd::LinSpaced(grid.n_theta, -grid.theta_max, grid.theta_max);
  table.raw.resize(grid.n_s, grid.n_theta);
  for (int i = 0; i < grid.n_s; ++i) {
    const DevTensor2 xi = table.s[i] * xi_dir;
    for (int j = 0; j < grid.n_theta; ++j)
      table.raw(i, j) = recession_cost(k, v, xi, table.theta[j]);
  }

  table.envelope = table.raw;
  // Primitive lattice directions; (0,1) alone would already pin the
  // theta-chords, the rest guard against structure the section might hide.
  static constexpr std::array<std::pair<int, int>, 16> dirs = {{
      {0, 1}, {1, 0}, {1, 1}, {1, -1}, {1, 2}, {1, -2}, {2, 1}, {2, -1},
      {1, 3}, {1, -3}, {3, 1}, {3, -1}, {2, 3}, {2, -3}, {3, 2}, {3, -2},
  }};
  const double stop = 1e-13 * (1.0 + table.raw.maxCoeff());
  for (int round = 0; round < 12; ++round) {
    double drop = 0.0;
    for (const auto& [di, dj] : dirs)
      drop = std::max(drop, sweep_direction(table.envelope, di, dj));
    if (drop < stop) break;
  }
  return table;
}

}  // namespace softplast
