#pragma once

#include "morsegap/critical_points.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace morsegap {

struct BranchPoint {
  int snapshot = 0;
  double b = 0.0, s = 0.0, lambda = 0.0;
  CriticalKind kind = CriticalKind::saddle;
  double K1 = 0.0, K2 = 0.0;
  double theta = NAN; // saddles only
};

struct Branch {
  int id = 0;
  CriticalKind kind = CriticalKind::saddle;
  int sheet = 0;
  std::vector<BranchPoint> points;
};

enum class EventType { birth, death };

std::string to_string(EventType type);

// Pair appearing (birth) or vanishing (death) inside (b_from, b_to), in sweep order.
struct CerfEvent {
  double b_from = 0.0, b_to = 0.0;
  EventType type = EventType::birth;
  int saddle_branch = -1;
  int extremum_branch = -1;
  double s = 0.0, lambda = 0.0;
};

struct Snapshot {
  double b = 0.0;
  std::vector<CriticalPoint> points;
  std::vector<DegeneratePoint> degenerate;
  std::vector<int> branch_of; // parallel to points
};

// A single point appearing or vanishing without a partner.
struct UnpairedChange {
  double b_from = 0.0, b_to = 0.0;
  int branch = -1;
  bool appearance = true;
  double s = 0.0, lambda = 0.0;
};

struct CerfDiagram {
  Region region;
  std::vector<double> b_grid; // sweep order
  std::vector<Snapshot> snapshots;
  std::vector<Branch> branches;
  std::vector<CerfEvent> events;
  std::vector<UnpairedChange> unpaired;
  std::vector<std::string> notes;
};

struct SweepOptions {
  std::optional<Region> region;
  CriticalSearchOptions search;
  double ds = 1e-4;
  Derivatives derivatives = Derivatives::spectral;
  double match_cap = 0.05; // region-normalized max-norm
  int refine_levels = 3;
};

CerfDiagram sweep(const HamiltonianFamily& family, const std::vector<double>& b_grid,
                  const SweepOptions& options = {});

// Common region: default s range and the lambda hull over all b.
Region sweep_region(const HamiltonianFamily& family, const std::vector<double>& b_grid);

struct CensusRow {
  double b = 0.0;
  int n_min = 0, n_saddle = 0, n_max = 0;
  int chi = 0;
  int total() const { return n_min + n_saddle + n_max; }
};

struct InvariantReport {
  std::vector<CensusRow> census;
  bool chi_constant = true;
  bool events_paired = true;
  bool parity_consistent = true;
  std::vector<std::string> problems;
  bool ok() const { return chi_constant && events_paired && parity_consistent; }
};

std::vector<CensusRow> census(const CerfDiagram& diagram);

// Non-throwing check.
InvariantReport check_invariants(const CerfDiagram& diagram);

// Throws InvariantViolation naming the first failing b interval.
InvariantReport verify_invariants(const CerfDiagram& diagram);

struct AngleTrace {
  std::vector<std::pair<double, double>> samples; // (b, theta)
  std::optional<CerfEvent> death;
};

AngleTrace angle_trace(const CerfDiagram& diagram, int saddle_branch_id);

// Saddle between the two lowest levels with the smallest modeled gap
// (falls back to the smallest |f| when the gap formula does not apply).
std::optional<std::size_t> dominant_saddle(const std::vector<CriticalPoint>& points);

} // namespace morsegap
