#pragma once

#include "morsegap/hamiltonians.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace morsegap {

struct Region {
  double s_lo = 0.0, s_hi = 1.0;
  double lambda_lo = 0.0, lambda_hi = 1.0;

  bool contains(double s, double lambda) const {
    return s >= s_lo && s <= s_hi && lambda >= lambda_lo && lambda <= lambda_hi;
  }
  bool contains(const Region& r) const {
    return r.s_lo >= s_lo && r.s_hi <= s_hi && r.lambda_lo >= lambda_lo &&
           r.lambda_hi <= lambda_hi;
  }
  double s_width() const { return s_hi - s_lo; }
  double lambda_width() const { return lambda_hi - lambda_lo; }
  void validate() const;
};

struct Gradient {
  double s = 0.0, lambda = 0.0;
  double norm() const;
};

struct Hessian2 {
  double ss = 0.0, sl = 0.0, ll = 0.0;
  double det() const { return ss * ll - sl * sl; }
};

struct Jet {
  double f = 0.0;
  Gradient g;
  Hessian2 h;
  double scale = 0.0; // 0: not computed, ask the surface
};

// f(s, lambda) = det(H(s) - lambda I) or a closed-form replacement.
class MorseSurface {
public:
  virtual ~MorseSurface() = default;

  virtual double value(double s, double lambda) const = 0;
  virtual Gradient gradient(double s, double lambda) const = 0;
  virtual Hessian2 hessian(double s, double lambda) const = 0;
  // sorted eigenvalues (or closed-form roots) at s
  virtual std::vector<double> roots(double s) const = 0;
  // magnitude of the terms that cancel in f; residual tolerances are relative to it
  virtual double scale(double s, double lambda) const = 0;
  virtual int degree() const = 0;
  // value, gradient and Hessian together; matrix surfaces share the stencil
  virtual Jet jet(double s, double lambda) const {
    return {value(s, lambda), gradient(s, lambda), hessian(s, lambda)};
  }

  const Region& domain() const { return domain_; }
  double ds() const { return ds_; }

protected:
  Region domain_;
  double ds_ = 0.0;
};

using SurfacePtr = std::shared_ptr<const MorseSurface>;

inline constexpr double kSOverhang = 1e-3;
inline constexpr int kMaxSurfaceDegree = 64;

// spectral: f and its partials from the eigen-decomposition, exact for the
// affine families; coefficient_fd: s-partials by central differences of the
// characteristic coefficients with step ds
enum class Derivatives { spectral, coefficient_fd };

struct SurfaceOptions {
  double ds = 1e-4;
  Derivatives derivatives = Derivatives::spectral;
  std::optional<Region> domain;
  bool normalize = false; // divide coefficients by max|c_j(s)|; rescales f and the gap formula
};

// c_0..c_n with det(H - lambda I) = sum c_j lambda^j, c_n = (-1)^n.
Vector charpoly_coefficients(const Matrix& H);

double horner(const Vector& c, double x);

// Default rectangle: s in [0, 1 + kSOverhang] for matrix families, [0,1] for
// closed forms; lambda hull of a 101-point s grid widened by 10%.
Region default_domain(const HamiltonianFamily& family, double b);

// Matrix-backed for Pauli / p-spin families, closed form for analytic ones.
SurfacePtr make_surface(const HamiltonianFamily& family, double b,
                        const SurfaceOptions& options = {});

double eval_f(const MorseSurface& surface, double s, double lambda);
Gradient gradient_f(const MorseSurface& surface, double s, double lambda);
Hessian2 hessian_f(const MorseSurface& surface, double s, double lambda);

struct GraphCurvature {
  double K = 0.0;      // Gaussian curvature of the graph
  double H_mean = 0.0; // mean curvature of the graph
};

GraphCurvature graph_curvature(const Gradient& g, const Hessian2& h);
GraphCurvature gauss_curvature(const MorseSurface& surface, double s, double lambda);

struct SpectralCurves {
  std::vector<double> s_grid;
  Matrix energies; // rows: grid points, sorted ascending
  std::vector<double> gap;

  std::size_t argmin_gap() const;
};

SpectralCurves spectral_curves(const HamiltonianFamily& family, double b,
                               const std::vector<double>& s_grid);

// Test surfaces for curvature integration.
// h * exp(-(s^2 + lambda^2) / w^2) on [-5w, 5w]^2
SurfacePtr bump_surface(double height, double width);
// f = c everywhere on the given region
SurfacePtr constant_surface(double c, const Region& domain);

// Root of the lambda-derivative strictly between roots[j] and roots[j+1].
// Returns nullopt when the two roots (nearly) coincide.
std::optional<double> interlacing_root(const std::vector<double>& roots, std::size_t j);

} // namespace morsegap
