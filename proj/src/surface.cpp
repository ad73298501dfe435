#include "morsegap/surface.hpp"

#include "morsegap/error.hpp"

#include <algorithm>
#include <cmath>

namespace morsegap {

namespace detail {
SurfacePtr make_analytic_surface(AnalyticKind kind, const AnalyticParams& params, double b,
                                 const SurfaceOptions& options);
Region analytic_default_s_range(AnalyticKind kind, const AnalyticParams& params);
} // namespace detail

void Region::validate() const {
  if (!(std::isfinite(s_lo) && std::isfinite(s_hi) && std::isfinite(lambda_lo) &&
        std::isfinite(lambda_hi)))
    throw ValidationError("region bounds must be finite");
  if (!(s_lo < s_hi) || !(lambda_lo < lambda_hi))
    throw ValidationError("region must have s0 < s1 and l0 < l1");
}

double Gradient::norm() const { return std::hypot(s, lambda); }

Vector charpoly_coefficients(const Matrix& H) {
  const auto n = H.rows();
  if (n < 1 || H.cols() != n) throw ValidationError("charpoly needs a square matrix");
  if (n > kMaxSurfaceDegree)
    throw CapacityError("characteristic polynomial of side " + std::to_string(n) +
                        " exceeds cap " + std::to_string(kMaxSurfaceDegree) +
                        "; use the reduced sector");
  // Faddeev-LeVerrier for det(lambda I - H) = sum a_k lambda^k
  Vector a = Vector::Zero(n + 1);
  a(n) = 1.0;
  Matrix M = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Matrix P = H * M;
    a(n - k) = -P.trace() / static_cast<double>(k);
    if (k < n) {
      M = std::move(P);
      M.diagonal().array() += a(n - k);
    }
  }
  if (n % 2 != 0) a = -a;
  if (!a.allFinite())
    throw CapacityError("characteristic polynomial overflowed; use the reduced sector");
  return a;
}

double horner(const Vector& c, double x) {
  double acc = 0.0;
  for (Eigen::Index j = c.size() - 1; j >= 0; --j) acc = acc * x + c(j);
  return acc;
}

namespace {

double horner_d1(const Vector& c, double x) {
  double acc = 0.0;
  for (Eigen::Index j = c.size() - 1; j >= 1; --j) acc = acc * x + static_cast<double>(j) * c(j);
  return acc;
}

double horner_d2(const Vector& c, double x) {
  double acc = 0.0;
  for (Eigen::Index j = c.size() - 1; j >= 2; --j)
    acc = acc * x + static_cast<double>(j * (j - 1)) * c(j);
  return acc;
}

std::vector<double> sorted_eigenvalues(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw CapacityError("eigensolver did not converge");
  const Vector& w = es.eigenvalues();
  return {w.data(), w.data() + w.size()};
}

class MatrixSurface final : public MorseSurface {
public:
  MatrixSurface(HamiltonianFamily family, double b, const SurfaceOptions& options)
      : family_(std::move(family)), b_(b), normalize_(options.normalize),
        derivatives_(options.derivatives) {
    if (family_.dimension() > kMaxSurfaceDegree)
      throw CapacityError("surface degree " + std::to_string(family_.dimension()) +
                          " exceeds cap " + std::to_string(kMaxSurfaceDegree) +
                          "; use the reduced sector");
    if (!(options.ds > 0.0) || !std::isfinite(options.ds))
      throw ValidationError("ds must be positive");
    ds_ = options.ds;
    domain_ = options.domain ? *options.domain : default_domain(family_, b_);
    domain_.validate();
    // a constant factor, so the critical set does not move
    if (normalize_) {
      const Vector c = charpoly_coefficients(family_.evaluate(0.5 * (domain_.s_lo + domain_.s_hi), b_));
      norm_ = c.cwiseAbs().maxCoeff();
    }
    h0_ = family_.evaluate(0.0, b_);
    dh_ = family_.evaluate(1.0, b_) - h0_;
    const double tol = 1e-12 * (1.0 + h0_.cwiseAbs().maxCoeff() + dh_.cwiseAbs().maxCoeff());
    for (double t : {0.25, 0.5, 0.75})
      if ((family_.evaluate(t, b_) - h0_ - t * dh_).cwiseAbs().maxCoeff() > tol)
        throw InvariantViolation("matrix family is not affine in s");
  }

  double value(double s, double lambda) const override {
    if (derivatives_ == Derivatives::coefficient_fd) return horner(coeffs(s), lambda);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(at(s), Eigen::EigenvaluesOnly);
    double f = 1.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) f *= es.eigenvalues()(i) - lambda;
    return f / norm_;
  }

  Gradient gradient(double s, double lambda) const override { return jet(s, lambda).g; }

  Hessian2 hessian(double s, double lambda) const override { return jet(s, lambda).h; }

  // f and its derivatives from the spectral form adj(H - lambda) = V diag(P_i) V^T,
  // P_i = prod_{j != i} (w_j - lambda). This keeps relative accuracy where the
  // characteristic coefficients cancel badly (near-degenerate levels).
  Jet jet(double s, double lambda) const override {
    if (derivatives_ == Derivatives::coefficient_fd) return stencil_jet(s, lambda);
    const Spectral c = spectral(at(s), dh_, lambda);
    Jet j;
    j.f = c.f / norm_;
    j.g = {c.fs / norm_, c.fl / norm_};
    j.h = {c.fss / norm_, c.fsl / norm_, c.fll / norm_};
    j.scale = c.terms / norm_;
    return j;
  }

  std::vector<double> roots(double s) const override { return sorted_eigenvalues(at(s)); }

  // size of the terms summed in the gradient
  double scale(double s, double lambda) const override {
    if (derivatives_ == Derivatives::coefficient_fd) {
      const Vector c = coeffs(s);
      double acc = 0.0, x = 1.0;
      for (Eigen::Index j = 0; j < c.size(); ++j, x *= std::abs(lambda)) acc += std::abs(c(j)) * x;
      return acc;
    }
    return spectral(at(s), dh_, lambda).terms / norm_;
  }

  int degree() const override { return family_.dimension(); }

private:
  struct Spectral {
    double f = 1.0, fs = 0.0, fl = 0.0, fss = 0.0, fsl = 0.0, fll = 0.0;
    double terms = 0.0; // sum of |a_i P_i| + |P_i|
  };

  Matrix at(double s) const { return h0_ + s * dh_; }

  Vector coeffs(double s) const { return charpoly_coefficients(at(s)) / norm_; }

  // 9-point central differences of the coefficient vectors in s
  Jet stencil_jet(double s, double lambda) const {
    static constexpr double w1[5] = {0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    static constexpr double w2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    const Vector c0 = coeffs(s);
    Vector d1 = Vector::Zero(c0.size());
    Vector d2 = w2[0] * c0;
    for (int k = 1; k <= 4; ++k) {
      const Vector p = coeffs(s + k * ds_);
      const Vector m = coeffs(s - k * ds_);
      d1 += w1[k] * (p - m);
      d2 += w2[k] * (p + m);
    }
    d1 /= ds_;
    d2 /= ds_ * ds_;
    Jet j;
    j.f = horner(c0, lambda);
    j.g = {horner(d1, lambda), horner_d1(c0, lambda)};
    j.h = {horner(d2, lambda), horner_d1(d1, lambda), horner_d2(c0, lambda)};
    return j;
  }

  static Spectral spectral(const Matrix& hm, const Matrix& dh, double lambda) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
    const Vector d = es.eigenvalues().array() - lambda;
    const Matrix B = es.eigenvectors().transpose() * dh * es.eigenvectors();
    const Vector a = B.diagonal();
    const Eigen::Index n = d.size();
    Spectral r;
    for (Eigen::Index i = 0; i < n; ++i) r.f *= d(i);
    for (Eigen::Index i = 0; i < n; ++i) {
      double pi = 1.0;
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != i) pi *= d(k);
      r.fs += a(i) * pi;
      r.fl -= pi;
      r.terms += (1.0 + std::abs(a(i))) * std::abs(pi);
      for (Eigen::Index l = 0; l < n; ++l) {
        if (l == i) continue;
        double pil = 1.0;
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != i && k != l) pil *= d(k);
        r.fsl -= a(i) * pil;
        r.fll += pil;
        // second t-derivative of det(diag(d) + t B): pairs of rows taken from B
        r.fss += (a(i) * a(l) - B(i, l) * B(i, l)) * pil;
      }
    }
    return r;
  }

  HamiltonianFamily family_;
  double b_;
  bool normalize_;
  Derivatives derivatives_;
  double norm_ = 1.0;
  Matrix h0_, dh_; // H(s) = h0_ + s dh_
};

void check_in_domain(const MorseSurface& surface, double s, double lambda) {
  const Region& d = surface.domain();
  const double ts = 1e-12 * (1.0 + d.s_width());
  const double tl = 1e-12 * (1.0 + d.lambda_width());
  if (!(s >= d.s_lo - ts && s <= d.s_hi + ts && lambda >= d.lambda_lo - tl &&
        lambda <= d.lambda_hi + tl))
    throw ValidationError("query point outside the surface domain");
}

} // namespace

Region default_domain(const HamiltonianFamily& family, double b) {
  Region r;
  if (const auto* kind = family.analytic_kind()) {
    r = detail::analytic_default_s_range(*kind, *family.analytic_params());
  } else {
    r.s_lo = 0.0;
    r.s_hi = 1.0 + kSOverhang;
  }
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i <= 100; ++i) {
    const double s = r.s_lo + (r.s_hi - r.s_lo) * i / 100.0;
    std::vector<double> w;
    if (const auto* kind = family.analytic_kind())
      w = analytic_roots(*kind, *family.analytic_params(), s, b);
    else
      w = sorted_eigenvalues(family.evaluate(s, b));
    lo = std::min(lo, w.front());
    hi = std::max(hi, w.back());
  }
  double range = hi - lo;
  if (!(range > 0.0)) range = 1.0;
  r.lambda_lo = lo - 0.1 * range;
  r.lambda_hi = hi + 0.1 * range;
  return r;
}

SurfacePtr make_surface(const HamiltonianFamily& family, double b, const SurfaceOptions& options) {
  if (const auto* kind = family.analytic_kind())
    return detail::make_analytic_surface(*kind, *family.analytic_params(), b, options);
  return std::make_shared<MatrixSurface>(family, b, options);
}

double eval_f(const MorseSurface& surface, double s, double lambda) {
  check_in_domain(surface, s, lambda);
  return surface.value(s, lambda);
}

Gradient gradient_f(const MorseSurface& surface, double s, double lambda) {
  check_in_domain(surface, s, lambda);
  return surface.gradient(s, lambda);
}

Hessian2 hessian_f(const MorseSurface& surface, double s, double lambda) {
  check_in_domain(surface, s, lambda);
  return surface.hessian(s, lambda);
}

GraphCurvature graph_curvature(const Gradient& g, const Hessian2& h) {
  const double w2 = 1.0 + g.s * g.s + g.lambda * g.lambda;
  GraphCurvature k;
  k.K = h.det() / (w2 * w2);
  k.H_mean = ((1.0 + g.lambda * g.lambda) * h.ss - 2.0 * g.s * g.lambda * h.sl +
              (1.0 + g.s * g.s) * h.ll) /
             (2.0 * std::pow(w2, 1.5));
  return k;
}

GraphCurvature gauss_curvature(const MorseSurface& surface, double s, double lambda) {
  check_in_domain(surface, s, lambda);
  const Jet j = surface.jet(s, lambda);
  return graph_curvature(j.g, j.h);
}

std::size_t SpectralCurves::argmin_gap() const {
  return static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
}

SpectralCurves spectral_curves(const HamiltonianFamily& family, double b,
                               const std::vector<double>& s_grid) {
  if (s_grid.empty()) throw ValidationError("empty s grid");
  const int n = family.dimension();
  SpectralCurves out;
  out.s_grid = s_grid;
  out.energies.resize(static_cast<Eigen::Index>(s_grid.size()), n);
  out.gap.resize(s_grid.size(), 0.0);
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const double s = s_grid[i];
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("s grid must lie in [0,1]");
    std::vector<double> w;
    if (const auto* kind = family.analytic_kind())
      w = analytic_roots(*kind, *family.analytic_params(), s, b);
    else
      w = sorted_eigenvalues(family.evaluate(s, b));
    for (int j = 0; j < n; ++j) out.energies(static_cast<Eigen::Index>(i), j) = w[static_cast<std::size_t>(j)];
    out.gap[i] = n >= 2 ? std::max(0.0, w[1] - w[0]) : 0.0;
  }
  return out;
}

std::optional<double> interlacing_root(const std::vector<double>& w, std::size_t j) {
  const double a = w[j], b = w[j + 1];
  const double spread = std::max({1.0, std::abs(w.front()), std::abs(w.back())});
  if (!(b - a > 1e-13 * spread)) return std::nullopt;
  // g(l) = sum 1/(w_i - l) increases from -inf to +inf on (w_j, w_{j+1})
  auto g = [&](double l) {
    double acc = 0.0;
    for (double wi : w) acc += 1.0 / (wi - l);
    return acc;
  };
  double lo = a, hi = b;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    if (g(m) > 0.0)
      hi = m;
    else
      lo = m;
  }
  return 0.5 * (lo + hi);
}

} // namespace morsegap
