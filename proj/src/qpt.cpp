#include "morsegap/qpt.hpp"

#include "morsegap/error.hpp"
#include "morsegap/hamiltonians.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace morsegap {

void ClassicalEnergyParams::validate() const {
  if (p < 2) throw ValidationError("p must be >= 2");
  if (k != 2) throw ValidationError("catalyst power k must equal 2");
  if (!(b >= 0.0 && b <= 1.0)) throw ValidationError("b must lie in [0,1]");
}

namespace {

void check_args(double s, double theta) {
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("s must lie in [0,1]");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ValidationError("theta must lie in [0,pi]");
}

double e_raw(double s, double t, const ClassicalEnergyParams& q) {
  const double c = std::cos(t);
  return -s * q.b * std::pow(std::sin(t), q.p) + s * (1.0 - q.b) * c * c - (1.0 - s) * c;
}

double de_raw(double s, double t, const ClassicalEnergyParams& q) {
  const double sn = std::sin(t), c = std::cos(t);
  return -s * q.b * q.p * std::pow(sn, q.p - 1) * c - 2.0 * s * (1.0 - q.b) * c * sn + (1.0 - s) * sn;
}

double d2e_raw(double s, double t, const ClassicalEnergyParams& q) {
  const double sn = std::sin(t), c = std::cos(t);
  const double zp = (q.p - 1) * std::pow(sn, q.p - 2) * c * c - std::pow(sn, q.p);
  return -s * q.b * q.p * zp - 2.0 * s * (1.0 - q.b) * std::cos(2.0 * t) + (1.0 - s) * c;
}

struct Minimum {
  double theta, e;
};

// Brent in [lo, hi], then Newton on de/dtheta kept inside the bracket.
Minimum polish(double s, double lo, double hi, const ClassicalEnergyParams& q) {
  auto f = [&](double t) { return e_raw(s, t, q); };
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, 40);
  double t = r.first;
  // Newton on de/dtheta; linear (factor 2/3) where the minimum is quartic-flat
  for (int it = 0; it < 100; ++it) {
    const double d1 = de_raw(s, t, q), d2 = d2e_raw(s, t, q);
    if (d1 == 0.0 || !(d2 > 0.0)) break;
    const double next = t - d1 / d2;
    if (!(next >= lo && next <= hi)) break;
    if (!(std::abs(de_raw(s, next, q)) < std::abs(d1))) break;
    if (std::abs(next - t) < 1e-15) break;
    t = next;
  }
  // boundary minima of the closed interval
  for (double edge : {0.0, std::numbers::pi})
    if (std::abs(t - edge) < 1e-7 && e_raw(s, edge, q) <= e_raw(s, t, q)) t = edge;
  return {t, e_raw(s, t, q)};
}

std::vector<Minimum> local_minima(double s, int n, const ClassicalEnergyParams& q) {
  const double h = std::numbers::pi / n;
  std::vector<double> e(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) e[static_cast<std::size_t>(k)] = e_raw(s, k * h, q);
  std::vector<Minimum> out;
  for (int k = 0; k <= n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const bool left = k == 0 || e[ku] <= e[ku - 1];
    const bool right = k == n || e[ku] < e[ku + 1];
    if (left && right)
      out.push_back(polish(s, std::max(0.0, (k - 1) * h), std::min(std::numbers::pi, (k + 1) * h), q));
  }
  return out;
}

Minimum global_min(double s, int n, const ClassicalEnergyParams& q, std::optional<Plateau>* plateau) {
  auto mins = local_minima(s, n, q);
  std::sort(mins.begin(), mins.end(), [](const Minimum& a, const Minimum& b) {
    return a.e < b.e || (a.e == b.e && a.theta < b.theta);
  });
  if (plateau && mins.size() >= 2 && mins[1].e - mins[0].e < 1e-10 &&
      std::abs(mins[1].theta - mins[0].theta) > 1e-6)
    *plateau = Plateau{s, mins[0].theta, mins[1].theta};
  return mins.front();
}

// Local minimum in the basin containing theta0 (grid descent, then polish).
Minimum descend(double s, double theta0, int n, const ClassicalEnergyParams& q) {
  const double h = std::numbers::pi / n;
  auto e = [&](double t) { return e_raw(s, std::clamp(t, 0.0, std::numbers::pi), q); };
  double t = std::clamp(theta0, 0.0, std::numbers::pi);
  double dir = e(t + h) < e(t) ? 1.0 : (e(t - h) < e(t) ? -1.0 : 0.0);
  if (dir != 0.0) {
    while (true) {
      const double next = std::clamp(t + dir * h, 0.0, std::numbers::pi);
      if (next == t || e(next) >= e(t)) break;
      t = next;
    }
  }
  return polish(s, std::max(0.0, t - h), std::min(std::numbers::pi, t + h), q);
}

struct JumpResult {
  double s_mid = 0.0;
  double jump = 0.0;
};

// Bisect [lo, hi] keeping the half with the larger |delta theta| until the
// interval is at most 1e-7 wide (and at least three levels deep).
JumpResult refine_jump(double lo, double hi, double t_lo, double t_hi,
                       const std::function<double(double, double, double)>& theta_at) {
  for (int level = 0; level < 3 || hi - lo > 1e-7; ++level) {
    if (level > 60) break;
    const double mid = 0.5 * (lo + hi);
    const double t_mid = theta_at(mid, t_lo, t_hi);
    if (std::abs(t_mid - t_lo) >= std::abs(t_hi - t_mid)) {
      hi = mid;
      t_hi = t_mid;
    } else {
      lo = mid;
      t_lo = t_mid;
    }
  }
  return {0.5 * (lo + hi), std::abs(t_hi - t_lo)};
}

std::size_t max_step(const std::vector<double>& v) {
  std::size_t best = 0;
  double d = -1.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (std::abs(v[i + 1] - v[i]) > d) d = std::abs(v[i + 1] - v[i]), best = i;
  return best;
}

} // namespace

double classical_energy(double s, double theta, const ClassicalEnergyParams& params) {
  params.validate();
  check_args(s, theta);
  return e_raw(s, theta, params);
}

double classical_energy_dtheta(double s, double theta, const ClassicalEnergyParams& params) {
  params.validate();
  check_args(s, theta);
  return de_raw(s, theta, params);
}

double classical_energy_d2theta(double s, double theta, const ClassicalEnergyParams& params) {
  params.validate();
  check_args(s, theta);
  return d2e_raw(s, theta, params);
}

std::string to_string(TransitionOrder order) {
  return order == TransitionOrder::first ? "first" : "second_or_higher";
}

std::vector<double> unit_grid(int n) {
  if (n < 2) throw ValidationError("grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return g;
}

QptReport minimizer_curve(const std::vector<double>& s_grid, const ClassicalEnergyParams& q,
                          int theta_resolution, double jump_threshold) {
  q.validate();
  if (theta_resolution < 256) throw ValidationError("theta resolution must be >= 256");
  if (!(jump_threshold > 0.0)) throw ValidationError("jump threshold must be positive");
  if (s_grid.size() < 2) throw ValidationError("s grid needs at least two points");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    check_args(s_grid[i], 0.0);
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw ValidationError("s grid must be increasing");
  }
  const int n = theta_resolution;
  QptReport rep;
  rep.s_grid = s_grid;
  rep.jump_threshold = jump_threshold;
  for (double s : s_grid) {
    std::optional<Plateau> pl;
    const Minimum m = global_min(s, n, q, &pl);
    rep.theta_star.push_back(m.theta);
    rep.e_star.push_back(m.e);
    if (pl) rep.plateaus.push_back(*pl);
  }

  const std::size_t last = s_grid.size() - 1;
  rep.theta_tracked.assign(s_grid.size(), 0.0);
  rep.e_tracked.assign(s_grid.size(), 0.0);
  rep.theta_tracked[last] = rep.theta_star[last];
  rep.e_tracked[last] = rep.e_star[last];
  for (std::size_t i = last; i-- > 0;) {
    const Minimum m = descend(s_grid[i], rep.theta_tracked[i + 1], n, q);
    rep.theta_tracked[i] = m.theta;
    rep.e_tracked[i] = m.e;
  }

  {
    const std::size_t i = max_step(rep.theta_star);
    const auto r = refine_jump(s_grid[i], s_grid[i + 1], rep.theta_star[i], rep.theta_star[i + 1],
                               [&](double s, double, double) { return global_min(s, n, q, nullptr).theta; });
    rep.jump = r.jump;
    if (r.jump > jump_threshold) {
      rep.order = TransitionOrder::first;
      rep.s_c = r.s_mid;
      // the two minima cross in energy inside the grid interval; that is the plateau
      const double ta = rep.theta_star[i], tb = rep.theta_star[i + 1];
      auto gap = [&](double s) { return descend(s, ta, n, q).e - descend(s, tb, n, q).e; };
      double lo = s_grid[i], hi = s_grid[i + 1];
      const double glo = gap(lo), ghi = gap(hi);
      if (rep.plateaus.empty() && glo * ghi < 0.0) {
        std::uintmax_t iters = 100;
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        const auto root = boost::math::tools::toms748_solve(gap, lo, hi, glo, ghi, tol, iters);
        const double sx = 0.5 * (root.first + root.second);
        rep.plateaus.push_back({sx, descend(sx, ta, n, q).theta, descend(sx, tb, n, q).theta});
      }
    }
  }
  {
    const std::size_t i = max_step(rep.theta_tracked);
    // the tracked branch arrives from above, so every probe descends from the upper end
    const auto r = refine_jump(s_grid[i], s_grid[i + 1], rep.theta_tracked[i], rep.theta_tracked[i + 1],
                               [&](double s, double, double t_hi) { return descend(s, t_hi, n, q).theta; });
    rep.tracked_jump = r.jump;
    if (r.jump > jump_threshold) rep.s_spinodal = r.s_mid;
  }
  return rep;
}

namespace {

Matrix flip_symmetric_basis(int N) {
  const int side = N + 1;
  const int dim = side / 2 + side % 2;
  Matrix B = Matrix::Zero(side, dim);
  for (int m = 0, col = 0; m <= N - m; ++m, ++col) {
    if (m == N - m) {
      B(m, col) = 1.0;
    } else {
      B(m, col) = B(N - m, col) = std::sqrt(0.5);
    }
  }
  return B;
}

double gap_at(const ReducedPSpinParams& params, double s, double b, const Matrix* basis) {
  Matrix H = build_pspin_reduced(params, s, b);
  if (basis) H = basis->transpose() * H * (*basis);
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

} // namespace

std::vector<GapScanRow> finite_size_gap_scan(const std::vector<int>& N_list, int p, double b,
                                             int s_resolution) {
  if (s_resolution < 3) throw ValidationError("s resolution must be >= 3");
  if (N_list.empty()) throw ValidationError("empty N list");
  std::vector<GapScanRow> rows;
  const auto grid = unit_grid(s_resolution);
  for (int N : N_list) {
    ReducedPSpinParams params{N, p, 2};
    params.validate();
    std::optional<Matrix> basis;
    if (p % 2 == 0) basis = flip_symmetric_basis(N);
    const Matrix* bp = basis ? &*basis : nullptr;
    std::size_t best = 0;
    double best_gap = INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double g = gap_at(params, grid[i], b, bp);
      if (g < best_gap) best_gap = g, best = i;
    }
    const double lo = grid[best > 0 ? best - 1 : 0];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    auto r = boost::math::tools::brent_find_minima([&](double s) { return gap_at(params, s, b, bp); }, lo, hi, 40);
    GapScanRow row{N, best_gap, grid[best]};
    if (r.second < best_gap) row = {N, r.second, r.first};
    rows.push_back(row);
  }
  return rows;
}

} // namespace morsegap
