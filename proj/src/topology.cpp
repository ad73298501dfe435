#include "morsegap/topology.hpp"

#include "morsegap/error.hpp"
#include "morsegap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace morsegap {

int euler_characteristic(const std::vector<CriticalPoint>& points) {
  int chi = 0;
  for (const auto& p : points) chi += p.kind == CriticalKind::saddle ? -1 : 1;
  return chi;
}

namespace {

void check_region(const MorseSurface& surface, const Region& region, int resolution) {
  region.validate();
  if (resolution < 1) throw ValidationError("resolution must be positive");
  const Region& d = surface.domain();
  const double ts = 1e-12 * (1.0 + d.s_width()), tl = 1e-12 * (1.0 + d.lambda_width());
  if (region.s_lo < d.s_lo - ts || region.s_hi > d.s_hi + ts || region.lambda_lo < d.lambda_lo - tl ||
      region.lambda_hi > d.lambda_hi + tl)
    throw ValidationError("integration region is not inside the surface domain");
}

double k_dA(const Jet& j) {
  const double w2 = 1.0 + j.g.s * j.g.s + j.g.lambda * j.g.lambda;
  return j.h.det() / (w2 * std::sqrt(w2));
}

} // namespace

double curvature_sum(const MorseSurface& surface, const Region& region, int n, int workers) {
  check_region(surface, region, n);
  const double hs = region.s_width() / n, hl = region.lambda_width() / n;
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    const double s = region.s_lo + hs * (static_cast<double>(i) + 0.5);
    std::vector<double> cells(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double l = region.lambda_lo + hl * (k + 0.5);
      cells[static_cast<std::size_t>(k)] = k_dA(surface.jet(s, l));
    }
    rows[i] = tree_sum(cells);
  });
  const double total = tree_sum(rows) * hs * hl;
  if (!std::isfinite(total)) throw ValidationError("non-finite curvature integrand");
  return total;
}

CurvatureIntegral integrate_curvature(const MorseSurface& surface, const Region& region,
                                      int resolution, int workers) {
  if (resolution < 64) throw ValidationError("integration resolution must be >= 64");
  CurvatureIntegral out;
  out.resolution = resolution;
  out.value = curvature_sum(surface, region, resolution, workers);
  out.refined = curvature_sum(surface, region, 2 * resolution, workers);
  out.extrapolated = out.refined + (out.refined - out.value) / 3.0;
  return out;
}

GaussBonnetBalance gauss_bonnet_balance(const MorseSurface& surface, const Region& region,
                                        int n, int workers) {
  GaussBonnetBalance out;
  out.interior = curvature_sum(surface, region, n, workers);

  // counter-clockwise seen from above; k_g ds = (g' x g'') . N / |g'|^2 dt
  auto edge = [&](bool along_s, double fixed, double sign) {
    const double lo = along_s ? region.s_lo : region.lambda_lo;
    const double h = (along_s ? region.s_width() : region.lambda_width()) / n;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double t = lo + h * (k + 0.5);
      const Jet j = along_s ? surface.jet(t, fixed) : surface.jet(fixed, t);
      const double w = std::sqrt(1.0 + j.g.s * j.g.s + j.g.lambda * j.g.lambda);
      v[static_cast<std::size_t>(k)] = along_s ? j.h.ss * j.g.lambda / (w * (1.0 + j.g.s * j.g.s))
                                               : -j.g.s * j.h.ll / (w * (1.0 + j.g.lambda * j.g.lambda));
    }
    return sign * tree_sum(v) * h;
  };
  out.geodesic = edge(true, region.lambda_lo, 1.0) + edge(false, region.s_hi, 1.0) +
                 edge(true, region.lambda_hi, -1.0) + edge(false, region.s_lo, -1.0);

  auto turn = [&](double s, double l, double orientation) {
    const Gradient g = surface.gradient(s, l);
    const double c = orientation * g.s * g.lambda /
                     (std::sqrt(1.0 + g.s * g.s) * std::sqrt(1.0 + g.lambda * g.lambda));
    return std::numbers::pi - std::acos(std::clamp(c, -1.0, 1.0));
  };
  out.turning = turn(region.s_lo, region.lambda_lo, 1.0) + turn(region.s_hi, region.lambda_lo, -1.0) +
                turn(region.s_hi, region.lambda_hi, 1.0) + turn(region.s_lo, region.lambda_hi, -1.0);
  return out;
}

namespace {

struct Neighborhood {
  LocalModel model;
  double r = 0.0;
  double U = 0.0, V = 0.0;
  double s_lo = 0.0, s_hi = 0.0, l_lo = 0.0, l_hi = 0.0;

  bool member(const MorseSurface& surface, double s, double l) const {
    const auto [u, v] = model.coords(s, l);
    if (std::abs(u) > U || std::abs(v) > V) return false;
    return std::abs(surface.value(s, l) - model.f0) <= r;
  }
};

Neighborhood make_neighborhood(const CriticalPoint& p, double r, const Region& region) {
  Neighborhood nb;
  nb.model = local_model(p);
  nb.r = r;
  nb.U = std::sqrt(r / std::abs(nb.model.K1));
  nb.V = std::sqrt(r / std::abs(nb.model.K2));
  const auto& a1 = nb.model.axis1;
  const auto& a2 = nb.model.axis2;
  const double es = nb.U * std::abs(a1[0]) + nb.V * std::abs(a2[0]);
  const double el = nb.U * std::abs(a1[1]) + nb.V * std::abs(a2[1]);
  nb.s_lo = std::max(region.s_lo, p.s - es);
  nb.s_hi = std::min(region.s_hi, p.s + es);
  nb.l_lo = std::max(region.lambda_lo, p.lambda - el);
  nb.l_hi = std::min(region.lambda_hi, p.lambda + el);
  return nb;
}

template <class Fn>
void for_cells(const Neighborhood& nb, int n, Fn&& fn) {
  const double hs = (nb.s_hi - nb.s_lo) / n, hl = (nb.l_hi - nb.l_lo) / n;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) fn(nb.s_lo + hs * (i + 0.5), nb.l_lo + hl * (k + 0.5), hs * hl);
}

// Nodes and weights on [-H, H], graded toward 0 so that the curvature spike of
// f ~ K u^2 (width ~ 1/(2|K|)) gets a few cells at the center.
void graded_axis(double H, double K, int n, std::vector<double>& x, std::vector<double>& w) {
  const double dt = 2.0 / n;
  const double want = 0.2 / (2.0 * std::abs(K));
  double alpha = 0.0;
  if (H * dt > want) {
    auto ratio = [](double a) { return a / std::sinh(a); };
    double lo = 0.0, hi = 1.0;
    while (H * dt * ratio(hi) > want && hi < 700.0) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (H * dt * ratio(mid) > want ? lo : hi) = mid;
    }
    alpha = hi;
  }
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = -1.0 + dt * (i + 0.5);
    if (alpha == 0.0) {
      x[static_cast<std::size_t>(i)] = H * t;
      w[static_cast<std::size_t>(i)] = H * dt;
    } else {
      x[static_cast<std::size_t>(i)] = H * std::sinh(alpha * t) / std::sinh(alpha);
      w[static_cast<std::size_t>(i)] = H * alpha * std::cosh(alpha * t) / std::sinh(alpha) * dt;
    }
  }
}

} // namespace

CurvatureReport curvature_report(const MorseSurface& surface, const Region& region,
                                 const std::vector<CriticalPoint>& points, int resolution,
                                 int workers) {
  const CurvatureIntegral total = integrate_curvature(surface, region, resolution, workers);
  CurvatureReport rep;
  rep.region = region;
  rep.resolution = resolution;
  rep.workers = workers;
  rep.total_curvature = total.value;
  rep.refined_total = total.refined;
  rep.balance = gauss_bonnet_balance(surface, region, resolution, workers);

  std::vector<CriticalPoint> inside;
  for (const auto& p : points)
    if (region.contains(p.s, p.lambda)) inside.push_back(p);
  rep.chi_morse = euler_characteristic(inside);
  rep.chi_reference = rep.chi_morse;
  rep.defect = rep.total_curvature - 2.0 * std::numbers::pi * rep.chi_reference;

  // r = half the distance to the nearest other critical value
  std::vector<double> r(inside.size());
  for (std::size_t i = 0; i < inside.size(); ++i) {
    const double fi = inside[i].f_value;
    double best = INFINITY;
    for (std::size_t k = 0; k < inside.size(); ++k) {
      const double d = std::abs(inside[k].f_value - fi);
      if (k != i && d > 1e-12 * std::max(1.0, std::abs(fi))) best = std::min(best, d);
    }
    r[i] = std::isfinite(best) ? 0.5 * best : 0.5 * std::max(std::abs(fi), 1e-12);
  }

  const int nloc = std::clamp(resolution / 2, 32, 256);
  std::vector<Neighborhood> nbs;
  for (int round = 0;; ++round) {
    nbs.clear();
    for (std::size_t i = 0; i < inside.size(); ++i) nbs.push_back(make_neighborhood(inside[i], r[i], region));
    std::vector<bool> shrink(inside.size(), false);
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      for (std::size_t k = 0; k < nbs.size(); ++k) {
        if (k == i || shrink[i]) continue;
        if (nbs[i].s_hi < nbs[k].s_lo || nbs[k].s_hi < nbs[i].s_lo || nbs[i].l_hi < nbs[k].l_lo ||
            nbs[k].l_hi < nbs[i].l_lo)
          continue;
        bool overlap = false;
        for_cells(nbs[i], nloc, [&](double s, double l, double) {
          if (!overlap && nbs[i].member(surface, s, l) && nbs[k].member(surface, s, l)) overlap = true;
        });
        if (overlap) shrink[i] = shrink[k] = true;
      }
    }
    if (std::none_of(shrink.begin(), shrink.end(), [](bool b) { return b; })) break;
    if (round >= 20) {
      rep.warnings.push_back("neighborhoods still overlap after 20 shrink rounds");
      break;
    }
    for (std::size_t i = 0; i < shrink.size(); ++i) {
      if (!shrink[i]) continue;
      r[i] *= 0.5;
      char buf[160];
      std::snprintf(buf, sizeof buf, "overlapping neighborhood at (%.12g, %.12g): r halved to %.12g",
                    inside[i].s, inside[i].lambda, r[i]);
      rep.warnings.push_back(buf);
    }
  }

  for (std::size_t i = 0; i < inside.size(); ++i) {
    PointCurvature pc;
    pc.point = inside[i];
    pc.r = r[i];
    std::vector<double> k_cells, a_cells;
    // principal-axis coordinates are orthonormal, so du dv = ds dlambda
    const auto& nb = nbs[i];
    std::vector<double> us, wu, vs, wv;
    graded_axis(nb.U, nb.model.K1, nloc, us, wu);
    graded_axis(nb.V, nb.model.K2, nloc, vs, wv);
    for (std::size_t a = 0; a < us.size(); ++a)
      for (std::size_t c = 0; c < vs.size(); ++c) {
        const double s = nb.model.s0 + us[a] * nb.model.axis1[0] + vs[c] * nb.model.axis2[0];
        const double l = nb.model.lambda0 + us[a] * nb.model.axis1[1] + vs[c] * nb.model.axis2[1];
        if (!region.contains(s, l)) continue;
        const Jet j = surface.jet(s, l);
        if (std::abs(j.f - nb.model.f0) > nb.r) continue;
        const double area = wu[a] * wv[c];
        const double w = std::sqrt(1.0 + j.g.s * j.g.s + j.g.lambda * j.g.lambda);
        k_cells.push_back(k_dA(j) * area);
        a_cells.push_back(w * area);
      }
    pc.cells = static_cast<int>(k_cells.size());
    pc.local_integral = tree_sum(k_cells);
    pc.model_integral = inside[i].gauss_K * tree_sum(a_cells);
    rep.per_point.push_back(pc);
  }
  return rep;
}

std::pair<CurvatureReport, CurvatureReport>
curvature_redistribution(const MorseSurface& surface_b0, const MorseSurface& surface_b1,
                         const Region& region, int resolution, const CriticalSearchOptions& search) {
  auto one = [&](const MorseSurface& s) {
    const auto found = find_critical_points(s, region, search);
    return curvature_report(s, region, found.points, resolution, search.workers);
  };
  return {one(surface_b0), one(surface_b1)};
}

} // namespace morsegap
