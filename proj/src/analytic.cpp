#include "morsegap/error.hpp"
#include "morsegap/surface.hpp"

#include <algorithm>
#include <cmath>

namespace morsegap {

namespace {

struct RootJet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

void validate(AnalyticKind kind, const AnalyticParams& p, double b) {
  switch (kind) {
  case AnalyticKind::grover:
    if (p.N < 1) throw ValidationError("grover needs N >= 1");
    break;
  case AnalyticKind::degeneracy_enhanced:
    if (p.N < 1) throw ValidationError("degeneracy_enhanced needs N >= 1");
    if (!(b >= 0.0) || !std::isfinite(b)) throw ValidationError("degeneracy_enhanced needs b >= 0");
    break;
  case AnalyticKind::toy_three_points:
    if (!(p.eps > 0.0) || !std::isfinite(p.eps)) throw ValidationError("toy needs eps > 0");
    if (p.a_minus == 0.0 || p.a_zero == 0.0 || p.a_plus == 0.0 || !std::isfinite(p.a_minus) ||
        !std::isfinite(p.a_zero) || !std::isfinite(p.a_plus))
      throw ValidationError("toy needs finite nonzero a_{-1}, a_0, a_1");
    break;
  }
}

// lambda_1 <= lambda_2 of the Grover pencil: ((1 -+ sqrt(q)) / 2)
std::pair<RootJet, RootJet> grover_roots(int N, double s) {
  const double kappa = 1.0 - std::pow(2.0, -N);
  const double q = 1.0 - 4.0 * kappa * (s - s * s);
  const double dq = -4.0 * kappa * (1.0 - 2.0 * s);
  const double ddq = 8.0 * kappa;
  const double r = std::sqrt(q);
  const double dr = dq / (2.0 * r);
  const double ddr = (ddq - 2.0 * dr * dr) / (2.0 * r);
  return {{0.5 * (1.0 - r), -0.5 * dr, -0.5 * ddr}, {0.5 * (1.0 + r), 0.5 * dr, 0.5 * ddr}};
}

// interpolates a_{-1}, a_0, a_1 at s = -eps, 0, eps and returns to a_0 at +-2 eps
RootJet toy_lambda_star(const AnalyticParams& p, double s) {
  const double u = s / p.eps;
  const double A = p.a_plus - 2.0 * p.a_zero + p.a_minus;
  const double B = p.a_minus - p.a_plus;
  RootJet j;
  j.v = (2.0 / 3.0 * u * u - u * u * u * u / 6.0) * A + (u * u * u / 6.0 - 2.0 / 3.0 * u) * B + p.a_zero;
  j.d1 = ((4.0 / 3.0 * u - 2.0 / 3.0 * u * u * u) * A + (0.5 * u * u - 2.0 / 3.0) * B) / p.eps;
  j.d2 = ((4.0 / 3.0 - 2.0 * u * u) * A + u * B) / (p.eps * p.eps);
  return j;
}

std::vector<RootJet> root_jets(AnalyticKind kind, const AnalyticParams& p, double s, double b) {
  switch (kind) {
  case AnalyticKind::grover: {
    auto [l1, l2] = grover_roots(p.N, s);
    return {l1, l2};
  }
  case AnalyticKind::degeneracy_enhanced: {
    auto [l1, l2] = grover_roots(p.N, s);
    const double c = 1.0 + 2.0 * b;
    return {{l2.v + 2.0 * b, l2.d1, l2.d2}, l1, {c * l1.v, c * l1.d1, c * l1.d2}};
  }
  case AnalyticKind::toy_three_points: {
    const RootJet l = toy_lambda_star(p, s);
    return {l, {-l.v, -l.d1, -l.d2}};
  }
  }
  return {};
}

// f = prod_k (lambda - r_k(s)) with exact partials by the product rule
class RootProductSurface final : public MorseSurface {
public:
  RootProductSurface(AnalyticKind kind, AnalyticParams params, double b, Region domain)
      : kind_(kind), params_(params), b_(b) {
    domain_ = domain;
    ds_ = 0.0;
  }

  double value(double s, double lambda) const override { return jet(s, lambda).f; }
  Gradient gradient(double s, double lambda) const override { return jet(s, lambda).g; }
  Hessian2 hessian(double s, double lambda) const override { return jet(s, lambda).h; }

  Jet jet(double s, double lambda) const override {
    const auto r = root_jets(kind_, params_, s, b_);
    const std::size_t n = r.size();
    auto prod_except = [&](std::size_t k, std::size_t l) {
      double acc = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != k && i != l) acc *= lambda - r[i].v;
      return acc;
    };
    Jet j;
    j.f = prod_except(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double pk = prod_except(k, n);
      j.g.s -= r[k].d1 * pk;
      j.g.lambda += pk;
      j.h.ss -= r[k].d2 * pk;
      for (std::size_t l = 0; l < n; ++l) {
        if (l == k) continue;
        const double pkl = prod_except(k, l);
        j.h.ss += r[k].d1 * r[l].d1 * pkl;
        j.h.sl -= r[k].d1 * pkl;
        j.h.ll += pkl;
      }
    }
    return j;
  }

  std::vector<double> roots(double s) const override { return analytic_roots(kind_, params_, s, b_); }

  double scale(double s, double lambda) const override {
    double acc = 1.0;
    for (const auto& r : root_jets(kind_, params_, s, b_)) acc *= std::abs(lambda) + std::abs(r.v);
    return acc;
  }

  int degree() const override { return kind_ == AnalyticKind::degeneracy_enhanced ? 3 : 2; }

private:
  AnalyticKind kind_;
  AnalyticParams params_;
  double b_;
};

// f = (2^-N - 1)(s^2 - s) + lambda^2 - lambda, kept in polynomial form
class GroverSurface final : public MorseSurface {
public:
  GroverSurface(const AnalyticParams& params, Region domain)
      : params_(params), k_(std::pow(2.0, -params.N) - 1.0) {
    domain_ = domain;
  }

  double value(double s, double l) const override { return k_ * (s * s - s) + l * l - l; }
  Gradient gradient(double s, double l) const override { return {k_ * (2.0 * s - 1.0), 2.0 * l - 1.0}; }
  Hessian2 hessian(double, double) const override { return {2.0 * k_, 0.0, 2.0}; }
  std::vector<double> roots(double s) const override {
    return analytic_roots(AnalyticKind::grover, params_, s, 0.0);
  }
  double scale(double s, double l) const override {
    return std::abs(k_) * (s * s + std::abs(s)) + l * l + std::abs(l);
  }
  int degree() const override { return 2; }

private:
  AnalyticParams params_;
  double k_;
};

class BumpSurface final : public MorseSurface {
public:
  BumpSurface(double h, double w) : h_(h), w_(w) { domain_ = {-5.0 * w, 5.0 * w, -5.0 * w, 5.0 * w}; }

  double value(double s, double l) const override { return h_ * e(s, l); }
  Gradient gradient(double s, double l) const override { return jet(s, l).g; }
  Hessian2 hessian(double s, double l) const override { return jet(s, l).h; }
  Jet jet(double s, double l) const override {
    const double w2 = w_ * w_;
    const double f = h_ * e(s, l);
    Jet j;
    j.f = f;
    j.g = {-2.0 * s / w2 * f, -2.0 * l / w2 * f};
    j.h = {f * (4.0 * s * s / (w2 * w2) - 2.0 / w2), f * 4.0 * s * l / (w2 * w2),
           f * (4.0 * l * l / (w2 * w2) - 2.0 / w2)};
    return j;
  }
  std::vector<double> roots(double) const override { return {}; }
  double scale(double, double) const override { return h_; }
  int degree() const override { return 0; }

private:
  double e(double s, double l) const { return std::exp(-(s * s + l * l) / (w_ * w_)); }
  double h_, w_;
};

class ConstantSurface final : public MorseSurface {
public:
  ConstantSurface(double c, const Region& d) : c_(c) { domain_ = d; }
  double value(double, double) const override { return c_; }
  Gradient gradient(double, double) const override { return {}; }
  Hessian2 hessian(double, double) const override { return {}; }
  std::vector<double> roots(double) const override { return {}; }
  double scale(double, double) const override { return std::max(1.0, std::abs(c_)); }
  int degree() const override { return 0; }

private:
  double c_;
};

} // namespace

std::vector<double> analytic_roots(AnalyticKind kind, const AnalyticParams& params, double s, double b) {
  validate(kind, params, b);
  std::vector<double> out;
  for (const auto& r : root_jets(kind, params, s, b)) out.push_back(r.v);
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

Region analytic_default_s_range(AnalyticKind kind, const AnalyticParams& params) {
  Region r;
  if (kind == AnalyticKind::toy_three_points) {
    r.s_lo = -2.0 * params.eps;
    r.s_hi = 2.0 * params.eps;
  }
  return r;
}

SurfacePtr make_analytic_surface(AnalyticKind kind, const AnalyticParams& params, double b,
                                 const SurfaceOptions& options) {
  validate(kind, params, b);
  const Region domain =
      options.domain ? *options.domain
                     : default_domain(HamiltonianFamily::analytic(kind, params), b);
  domain.validate();
  if (kind == AnalyticKind::grover) return std::make_shared<GroverSurface>(params, domain);
  return std::make_shared<RootProductSurface>(kind, params, b, domain);
}

} // namespace detail

SurfacePtr analytic_surface(AnalyticKind kind, const AnalyticParams& params, double b) {
  return detail::make_analytic_surface(kind, params, b, {});
}

SurfacePtr bump_surface(double height, double width) {
  if (!(width > 0.0) || !std::isfinite(height)) throw ValidationError("bump needs width > 0");
  return std::make_shared<BumpSurface>(height, width);
}

SurfacePtr constant_surface(double c, const Region& domain) {
  domain.validate();
  return std::make_shared<ConstantSurface>(c, domain);
}

} // namespace morsegap
