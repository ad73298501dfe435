#pragma once

#include "morsegap/surface.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace morsegap {

enum class CriticalKind { minimum, saddle, maximum };

std::string to_string(CriticalKind kind);

// K1, K2 are Taylor coefficients: f ~ f(p) + K1 u^2 + K2 v^2, so the Hessian
// eigenvalues (principal curvatures of the graph at p) are 2 K1 and 2 K2.
struct CriticalPoint {
  double s = 0.0;
  double lambda = 0.0;
  double f_value = 0.0;
  Hessian2 hessian;
  CriticalKind kind = CriticalKind::saddle;
  int morse_index = 1;
  double K1 = 0.0, K2 = 0.0;
  double axis_rotation = 0.0; // angle of the K1 axis against the s axis
  double gauss_K = 0.0;       // det Hessian = 4 K1 K2
  double residual = 0.0;      // |grad f| at the accepted point
  int sheet = 0;              // eigenvalues strictly below lambda

  double kappa1() const { return 2.0 * K1; }
  double kappa2() const { return 2.0 * K2; }
};

struct DegeneratePoint {
  double s = 0.0, lambda = 0.0;
  double det_hessian = 0.0;
  double threshold = 0.0;
};

struct CriticalSearchOptions {
  int grid_density = 64;
  double tol_grad = 1e-9;      // relative to surface.scale
  double tol_nondegen = 1e-8;  // relative to the median |det Hess|
  double tol_flat = 1e-4;      // |det Hess| against (scale / (ds_width * lambda_width))^2
  double tol_dedup = 1e-6;
  int max_newton = 50;
  std::vector<std::pair<double, double>> extra_seeds;
  int workers = 1;

  void validate() const;
};

struct CriticalSearchResult {
  std::vector<CriticalPoint> points;
  std::vector<DegeneratePoint> degenerate;
};

CriticalSearchResult find_critical_points(const MorseSurface& surface, const Region& region,
                                          const CriticalSearchOptions& options = {});

// Fully populated point at (s, lambda); does not check that grad f vanishes.
CriticalPoint classify_point(const MorseSurface& surface, double s, double lambda);

struct LocalModel {
  double s0 = 0.0, lambda0 = 0.0, f0 = 0.0;
  double K1 = 0.0, K2 = 0.0;
  double axis_rotation = 0.0;
  std::array<double, 2> axis1{}, axis2{}; // unit vectors in (s, lambda)

  // principal-axis coordinates of (s, lambda)
  std::pair<double, double> coords(double s, double lambda) const;
  double operator()(double s, double lambda) const;
};

LocalModel local_model(const CriticalPoint& cp);

struct GapModel {
  double s_c = 0.0;
  double f0 = 0.0, K1 = 0.0, K2 = 0.0;
  double delta_min = 0.0;

  // 2 sqrt(-K2 (f0 + K1 (s - s_c)^2)) / K2; zero where the root turns imaginary
  double operator()(double s) const;
  // |f0 / K1|^(1/2): distance over which the modeled gap changes by O(1)
  double length_scale() const;
};

GapModel gap_from_saddle(const CriticalPoint& cp);

struct AsymptoteAngle {
  double theta = 0.0;
  std::array<double, 2> dir_a{}, dir_b{}; // null directions of the quadratic form
};

AsymptoteAngle asymptote_angle(const CriticalPoint& cp);

// Angle between the two null directions, measured across the K1 axis.
double null_direction_angle(const AsymptoteAngle& a);

} // namespace morsegap
