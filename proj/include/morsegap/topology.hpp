#pragma once

#include "morsegap/critical_points.hpp"

#include <string>
#include <utility>
#include <vector>

namespace morsegap {

// #minima - #saddles + #maxima
int euler_characteristic(const std::vector<CriticalPoint>& points);

struct CurvatureIntegral {
  int resolution = 0;
  double value = 0.0;       // midpoint rule at resolution
  double refined = 0.0;     // midpoint rule at 2 x resolution
  double extrapolated = 0.0; // Richardson: refined + (refined - value) / 3
  double defect() const { return refined - value; }
};

// Integral of K dA over the graph of f above the region, dA = sqrt(1 + |grad f|^2).
CurvatureIntegral integrate_curvature(const MorseSurface& surface, const Region& region,
                                      int resolution, int workers = 1);

// Single midpoint-rule pass (no refinement).
double curvature_sum(const MorseSurface& surface, const Region& region, int resolution,
                     int workers = 1);

// Gauss-Bonnet bookkeeping for the graph over a rectangle: the three terms add to 2 pi.
struct GaussBonnetBalance {
  double interior = 0.0;  // integral of K dA
  double geodesic = 0.0;  // boundary integral of k_g ds
  double turning = 0.0;   // sum of (pi - interior corner angle)
  double total() const { return interior + geodesic + turning; }
};

GaussBonnetBalance gauss_bonnet_balance(const MorseSurface& surface, const Region& region,
                                        int resolution, int workers = 1);

struct PointCurvature {
  CriticalPoint point;
  double local_integral = 0.0; // K dA over the Morse neighborhood
  double model_integral = 0.0; // det Hess(p) times the neighborhood's graph area
  double r = 0.0;              // level half-width |f - f(p)| <= r
  int cells = 0;
};

struct CurvatureReport {
  Region region;
  int resolution = 0;
  int workers = 1;
  double total_curvature = 0.0;
  double refined_total = 0.0;
  int chi_morse = 0;
  int chi_reference = 0;
  double defect = 0.0; // total - 2 pi chi_reference
  GaussBonnetBalance balance;
  std::vector<PointCurvature> per_point;
  std::vector<std::string> warnings;
};

CurvatureReport curvature_report(const MorseSurface& surface, const Region& region,
                                 const std::vector<CriticalPoint>& points, int resolution,
                                 int workers = 1);

std::pair<CurvatureReport, CurvatureReport>
curvature_redistribution(const MorseSurface& surface_b0, const MorseSurface& surface_b1,
                         const Region& region, int resolution,
                         const CriticalSearchOptions& search = {});

} // namespace morsegap
