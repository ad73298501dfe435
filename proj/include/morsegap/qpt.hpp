#pragma once

#include <optional>
#include <string>
#include <vector>

namespace morsegap {

struct ClassicalEnergyParams {
  int p = 5;
  int k = 2;
  double b = 1.0;
  void validate() const;
};

// Per-spin energy with m_z = sin(theta), m_x = cos(theta):
// e = -s b sin^p + s (1 - b) cos^2 - (1 - s) cos
double classical_energy(double s, double theta, const ClassicalEnergyParams& params);
double classical_energy_dtheta(double s, double theta, const ClassicalEnergyParams& params);
double classical_energy_d2theta(double s, double theta, const ClassicalEnergyParams& params);

enum class TransitionOrder { first, second_or_higher };

std::string to_string(TransitionOrder order);

struct Plateau {
  double s = 0.0;
  double theta_a = 0.0, theta_b = 0.0;
};

struct QptReport {
  std::vector<double> s_grid;
  std::vector<double> theta_star; // global minimizer
  std::vector<double> e_star;
  // minimizer continued downward from the largest s (metastable branch)
  std::vector<double> theta_tracked;
  std::vector<double> e_tracked;
  TransitionOrder order = TransitionOrder::second_or_higher;
  std::optional<double> s_c; // jump of the global minimizer
  double jump = 0.0;
  std::optional<double> s_spinodal; // jump of the tracked minimizer
  double tracked_jump = 0.0;
  double jump_threshold = 0.05;
  std::vector<Plateau> plateaus;
};

QptReport minimizer_curve(const std::vector<double>& s_grid, const ClassicalEnergyParams& params,
                          int theta_resolution = 1024, double jump_threshold = 0.05);

// Uniform grid with n points on [0, 1].
std::vector<double> unit_grid(int n);

struct GapScanRow {
  int N = 0;
  double min_gap = 0.0;
  double s_at_min = 0.0;
};

// For even p the gap is taken inside the spin-flip symmetric sector, where the
// ground state lives (the full sector is exactly degenerate at s = 1).
std::vector<GapScanRow> finite_size_gap_scan(const std::vector<int>& N_list, int p, double b,
                                             int s_resolution);

} // namespace morsegap
