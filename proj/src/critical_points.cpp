#include "morsegap/critical_points.hpp"

#include "morsegap/error.hpp"
#include "morsegap/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace morsegap {

std::string to_string(CriticalKind kind) {
  switch (kind) {
  case CriticalKind::minimum: return "minimum";
  case CriticalKind::saddle: return "saddle";
  case CriticalKind::maximum: return "maximum";
  }
  return "unknown";
}

void CriticalSearchOptions::validate() const {
  if (grid_density < 16) throw ValidationError("grid density must be >= 16");
  if (!(tol_grad > 0.0) || !(tol_nondegen > 0.0) || !(tol_dedup > 0.0) || !(tol_flat >= 0.0))
    throw ValidationError("tolerances must be positive");
  if (max_newton < 1) throw ValidationError("max_newton must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

namespace {

struct Eigen2 {
  double mu_plus, mu_minus;
  std::array<double, 2> e_plus, e_minus;
};

Eigen2 eigen2(const Hessian2& h) {
  const double mean = 0.5 * (h.ss + h.ll);
  const double rad = std::hypot(0.5 * (h.ss - h.ll), h.sl);
  const double phi = 0.5 * std::atan2(2.0 * h.sl, h.ss - h.ll);
  return {mean + rad, mean - rad, {std::cos(phi), std::sin(phi)}, {-std::sin(phi), std::cos(phi)}};
}


// K1 (s-like axis) and K2 Taylor coefficients with their axes.
struct AxisAssignment {
  double K1, K2;
  std::array<double, 2> a1, a2;
};

AxisAssignment assign_axes(const Hessian2& h) {
  const Eigen2 e = eigen2(h);
  AxisAssignment p{0.5 * e.mu_plus, 0.5 * e.mu_minus, e.e_plus, e.e_minus};
  AxisAssignment m{0.5 * e.mu_minus, 0.5 * e.mu_plus, e.e_minus, e.e_plus};
  if (e.mu_plus > 0.0 && e.mu_minus < 0.0 && h.ll != 0.0) {
    // saddle: the lambda curvature fixes which principal value is K2
    return h.ll > 0.0 ? m : p;
  }
  const double cp = std::abs(e.e_plus[0]), cm = std::abs(e.e_minus[0]);
  if (std::abs(cp - cm) > 1e-12) return cp > cm ? p : m;
  return m; // tie: negative (smaller) curvature along s
}

void orient(std::array<double, 2>& v) {
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
}

constexpr double kStepTol = 1e-12;

struct NewtonResult {
  double s, lambda, residual, scale;
  bool converged;
};

NewtonResult newton(const MorseSurface& surface, double s, double l, const CriticalSearchOptions& opt) {
  const Region& dom = surface.domain();
  Jet j = surface.jet(s, l);
  for (int it = 0;; ++it) {
    const double r = j.g.norm();
    const double sc = std::max(j.scale > 0.0 ? j.scale : surface.scale(s, l), 1e-300);
    if (!std::isfinite(r)) return {s, l, r, sc, false};
    if (r < opt.tol_grad * sc) return {s, l, r, sc, true};
    if (it >= opt.max_newton) return {s, l, r, sc, false};
    const double det = j.h.det();
    if (det == 0.0 || !std::isfinite(det)) return {s, l, r, sc, false};
    const double d_s = -(j.h.ll * j.g.s - j.h.sl * j.g.lambda) / det;
    const double d_l = -(-j.h.sl * j.g.s + j.h.ss * j.g.lambda) / det;
    // at exact level crossings every term of the gradient vanishes with it, so
    // the relative residual stalls near 1; accept a negligible step instead
    if (std::abs(d_s) / dom.s_width() + std::abs(d_l) / dom.lambda_width() < kStepTol &&
        dom.contains(s + d_s, l + d_l)) {
      s += d_s;
      l += d_l;
      return {s, l, surface.gradient(s, l).norm(), sc, true};
    }
    const double phi0 = r * r;
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 16; ++k, t *= 0.5) {
      const double s1 = s + t * d_s, l1 = l + t * d_l;
      if (!dom.contains(s1, l1)) continue;
      Jet j1 = surface.jet(s1, l1);
      const double r1 = j1.g.norm();
      if (std::isfinite(r1) && r1 * r1 < phi0) {
        s = s1;
        l = l1;
        j = j1;
        accepted = true;
        break;
      }
    }
    if (!accepted) return {s, l, r, sc, false};
  }
}

std::vector<double> scan_grid(const Region& region, int density) {
  std::vector<double> s;
  const double w = region.s_width();
  const int m = std::max(16 * density, 1024);
  for (int i = 0; i <= m; ++i) s.push_back(region.s_lo + w * i / m);
  // geometric grading towards the region edges and the path endpoints s = 0, 1,
  // where narrow anti-crossings pile up
  for (double c : {region.s_lo, region.s_hi, 0.0, 1.0}) {
    for (int k = 2; k <= 11; ++k) {
      for (double m : {1.0, 3.0}) {
        const double d = m * w * std::pow(10.0, -k);
        for (double x : {c - d, c + d})
          if (x > region.s_lo && x < region.s_hi) s.push_back(x);
      }
    }
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::optional<double> branch_lambda(const MorseSurface& surface, double s, std::size_t j) {
  const auto w = surface.roots(s);
  if (w.size() < j + 2) return std::nullopt;
  return interlacing_root(w, j);
}

} // namespace

CriticalPoint classify_point(const MorseSurface& surface, double s, double lambda) {
  const Jet j = surface.jet(s, lambda);
  CriticalPoint cp;
  cp.s = s;
  cp.lambda = lambda;
  cp.f_value = j.f;
  cp.hessian = j.h;
  cp.residual = j.g.norm();
  cp.gauss_K = j.h.det();
  const Eigen2 e = eigen2(j.h);
  cp.morse_index = (e.mu_plus < 0.0 ? 1 : 0) + (e.mu_minus < 0.0 ? 1 : 0);
  cp.kind = cp.morse_index == 0 ? CriticalKind::minimum
                                : (cp.morse_index == 1 ? CriticalKind::saddle : CriticalKind::maximum);
  AxisAssignment a = assign_axes(j.h);
  orient(a.a1);
  cp.K1 = a.K1;
  cp.K2 = a.K2;
  cp.axis_rotation = std::atan2(a.a1[1], a.a1[0]);
  if (cp.axis_rotation <= -std::numbers::pi / 2) cp.axis_rotation += std::numbers::pi;
  const auto w = surface.roots(s);
  // levels through the point itself (exact crossings) count half
  const double tie = 1e-9 * (1.0 + std::abs(lambda));
  const auto lo = std::lower_bound(w.begin(), w.end(), lambda - tie);
  const auto hi = std::upper_bound(w.begin(), w.end(), lambda + tie);
  cp.sheet = static_cast<int>((lo - w.begin()) + (hi - lo) / 2);
  return cp;
}

CriticalSearchResult find_critical_points(const MorseSurface& surface, const Region& region,
                                          const CriticalSearchOptions& opt) {
  opt.validate();
  region.validate();
  {
    const Region& d = surface.domain();
    const double ts = 1e-12 * (1.0 + d.s_width()), tl = 1e-12 * (1.0 + d.lambda_width());
    if (region.s_lo < d.s_lo - ts || region.s_hi > d.s_hi + ts || region.lambda_lo < d.lambda_lo - tl ||
        region.lambda_hi > d.lambda_hi + tl)
      throw ValidationError("search region is not inside the surface domain");
  }

  std::vector<std::pair<double, double>> seeds = opt.extra_seeds;
  const int G = opt.grid_density;
  for (int i = 0; i < G; ++i)
    for (int k = 0; k < G; ++k)
      seeds.emplace_back(region.s_lo + region.s_width() * i / (G - 1),
                         region.lambda_lo + region.lambda_width() * k / (G - 1));

  const int n = surface.degree();
  if (n >= 2) {
    // sign changes of f_s along each curve f_lambda = 0
    const auto grid = scan_grid(region, G);
    const std::size_t nb = static_cast<std::size_t>(n - 1);
    std::vector<std::vector<double>> h(grid.size(), std::vector<double>(nb, NAN));
    std::vector<std::vector<double>> lam(grid.size(), std::vector<double>(nb, NAN));
    parallel_for(grid.size(), opt.workers, [&](std::size_t i) {
      const auto w = surface.roots(grid[i]);
      for (std::size_t j = 0; j + 1 < w.size() && j < nb; ++j) {
        if (auto l = interlacing_root(w, j)) {
          lam[i][j] = *l;
          h[i][j] = surface.gradient(grid[i], *l).s;
        }
      }
    });
    // local minima of |f_s| along a branch also catch touches without a sign change
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        if (!std::isfinite(lam[i][j])) continue;
        const double a = std::abs(h[i][j]);
        const bool left = i == 0 || !std::isfinite(h[i - 1][j]) || std::abs(h[i - 1][j]) >= a;
        const bool right = i + 1 == grid.size() || !std::isfinite(h[i + 1][j]) || std::abs(h[i + 1][j]) >= a;
        if (left && right) seeds.emplace_back(grid[i], lam[i][j]);
      }

    std::vector<std::pair<std::size_t, std::size_t>> brackets;
    for (std::size_t j = 0; j < nb; ++j)
      for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (std::isfinite(h[i][j]) && std::isfinite(h[i + 1][j]) && h[i][j] * h[i + 1][j] < 0.0)
          brackets.emplace_back(i, j);
    std::vector<std::optional<std::pair<double, double>>> refined(brackets.size());
    parallel_for(brackets.size(), opt.workers, [&](std::size_t q) {
      const auto [i, j] = brackets[q];
      auto hf = [&](double s) {
        const auto l = branch_lambda(surface, s, j);
        return l ? surface.gradient(s, *l).s : NAN;
      };
      double a = grid[i], b = grid[i + 1], fa = h[i][j], fb = h[i + 1][j];
      std::uintmax_t iters = 100;
      try {
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        auto r = boost::math::tools::toms748_solve(hf, a, b, fa, fb, tol, iters);
        const double s = 0.5 * (r.first + r.second);
        if (auto l = branch_lambda(surface, s, j)) refined[q] = std::make_pair(s, *l);
      } catch (const std::exception&) {
        // NaN on a degenerate stretch of the branch; the grid seeds still cover it
      }
    });
    for (const auto& r : refined)
      if (r) seeds.push_back(*r);
  }

  std::vector<NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), opt.workers, [&](std::size_t i) {
    results[i] = newton(surface, seeds[i].first, seeds[i].second, opt);
  });

  // deterministic sequential dedup in seed order
  std::vector<NewtonResult> accepted;
  for (const auto& r : results) {
    if (!r.converged) continue;
    if (!region.contains(r.s, r.lambda)) continue;
    if (r.s - region.s_lo < opt.tol_dedup || region.s_hi - r.s < opt.tol_dedup ||
        r.lambda - region.lambda_lo < opt.tol_dedup || region.lambda_hi - r.lambda < opt.tol_dedup)
      continue;
    bool dup = false;
    for (auto& a : accepted) {
      if (std::max(std::abs(a.s - r.s), std::abs(a.lambda - r.lambda)) < opt.tol_dedup) {
        if (r.residual / r.scale < a.residual / a.scale) a = r;
        dup = true;
        break;
      }
    }
    if (!dup) accepted.push_back(r);
  }

  CriticalSearchResult out;
  std::vector<CriticalPoint> pts;
  for (const auto& a : accepted) pts.push_back(classify_point(surface, a.s, a.lambda));
  std::vector<double> dets;
  for (const auto& p : pts) dets.push_back(std::abs(p.gauss_K));
  double threshold = 1e-12;
  if (!dets.empty()) {
    std::sort(dets.begin(), dets.end());
    const std::size_t m = dets.size();
    const double median = m % 2 ? dets[m / 2] : 0.5 * (dets[m / 2 - 1] + dets[m / 2]);
    threshold = std::max(threshold, opt.tol_nondegen * median);
  }
  const double area = region.s_width() * region.lambda_width();
  // Newton only reaches ~sqrt(tol) of a degenerate point, so hits scatter
  const double merge = std::max(opt.tol_dedup, 10.0 * std::sqrt(opt.tol_grad));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    const double sc = accepted[k].scale;
    const bool flat = std::abs(p.hessian.det()) * area * area <= opt.tol_flat * sc * sc;
    if (!flat && std::abs(p.gauss_K) > threshold) {
      out.points.push_back(p);
      continue;
    }
    const double t = flat ? opt.tol_flat * sc * sc / (area * area) : threshold;
    bool dup = false;
    for (auto& d : out.degenerate)
      if (std::max(std::abs(d.s - p.s) / region.s_width(), std::abs(d.lambda - p.lambda) / region.lambda_width()) <
          merge) {
        if (std::abs(p.hessian.det()) < std::abs(d.det_hessian)) d = {p.s, p.lambda, p.hessian.det(), t};
        dup = true;
        break;
      }
    if (!dup) out.degenerate.push_back({p.s, p.lambda, p.hessian.det(), t});
  }
  auto by_location = [](const auto& a, const auto& b) {
    return a.s < b.s || (a.s == b.s && a.lambda < b.lambda);
  };
  std::sort(out.points.begin(), out.points.end(), by_location);
  std::sort(out.degenerate.begin(), out.degenerate.end(), by_location);
  return out;
}

std::pair<double, double> LocalModel::coords(double s, double lambda) const {
  const double ds = s - s0, dl = lambda - lambda0;
  return {ds * axis1[0] + dl * axis1[1], ds * axis2[0] + dl * axis2[1]};
}

double LocalModel::operator()(double s, double lambda) const {
  const auto [u, v] = coords(s, lambda);
  return f0 + K1 * u * u + K2 * v * v;
}

LocalModel local_model(const CriticalPoint& cp) {
  if (cp.hessian.det() == 0.0) throw ValidationError("degenerate Hessian has no Morse chart");
  AxisAssignment a = assign_axes(cp.hessian);
  orient(a.a1);
  // keep (axis1, axis2) right-handed
  a.a2 = {-a.a1[1], a.a1[0]};
  LocalModel m;
  m.s0 = cp.s;
  m.lambda0 = cp.lambda;
  m.f0 = cp.f_value;
  m.K1 = a.K1;
  m.K2 = a.K2;
  m.axis_rotation = std::atan2(a.a1[1], a.a1[0]);
  m.axis1 = a.a1;
  m.axis2 = a.a2;
  return m;
}

double GapModel::operator()(double s) const {
  const double u = s - s_c;
  const double arg = -K2 * (f0 + K1 * u * u);
  return arg > 0.0 ? 2.0 * std::sqrt(arg) / K2 : 0.0;
}

double GapModel::length_scale() const { return std::sqrt(std::abs(f0 / K1)); }

GapModel gap_from_saddle(const CriticalPoint& cp) {
  if (cp.kind != CriticalKind::saddle) throw ValidationError("gap model needs a saddle");
  if (!(cp.K2 > 0.0))
    throw InconsistencyError("saddle has K2 <= 0: the lambda axis is not the convex one");
  if (!(cp.f_value < 0.0))
    throw InconsistencyError("saddle has f(p) >= 0 with K2 > 0: the square root is imaginary");
  GapModel g;
  g.s_c = cp.s;
  g.f0 = cp.f_value;
  g.K1 = cp.K1;
  g.K2 = cp.K2;
  g.delta_min = 2.0 * std::sqrt(-cp.K2 * cp.f_value) / cp.K2;
  return g;
}

AsymptoteAngle asymptote_angle(const CriticalPoint& cp) {
  if (cp.kind != CriticalKind::saddle) throw ValidationError("asymptote angle needs a saddle");
  const double denom = cp.K1 - cp.K2;
  if (!(std::abs(denom) > 1e-14 * (std::abs(cp.K1) + std::abs(cp.K2))))
    throw ValidationError("K1 - K2 vanishes");
  AsymptoteAngle out;
  const double c = std::clamp((cp.K1 + cp.K2) / denom, -1.0, 1.0);
  out.theta = std::numbers::pi - std::acos(c);
  const LocalModel m = local_model(cp);
  const double t = std::sqrt(-cp.K1 / cp.K2);
  const double nrm = std::sqrt(1.0 + t * t);
  for (int i = 0; i < 2; ++i) {
    out.dir_a[static_cast<std::size_t>(i)] = (m.axis1[static_cast<std::size_t>(i)] + t * m.axis2[static_cast<std::size_t>(i)]) / nrm;
    out.dir_b[static_cast<std::size_t>(i)] = (m.axis1[static_cast<std::size_t>(i)] - t * m.axis2[static_cast<std::size_t>(i)]) / nrm;
  }
  return out;
}

double null_direction_angle(const AsymptoteAngle& a) {
  const double dot = a.dir_a[0] * a.dir_b[0] + a.dir_a[1] * a.dir_b[1];
  const double cross = a.dir_a[0] * a.dir_b[1] - a.dir_a[1] * a.dir_b[0];
  return std::atan2(std::abs(cross), dot);
}

} // namespace morsegap
