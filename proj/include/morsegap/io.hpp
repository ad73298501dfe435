#pragma once

#include "morsegap/cerf_sweep.hpp"
#include "morsegap/hamiltonians.hpp"
#include "morsegap/qpt.hpp"
#include "morsegap/topology.hpp"

#include <string>
#include <variant>
#include <vector>

namespace morsegap {

// "%.12g"; NaN becomes an empty field.
std::string fmt(double x);

using ModelSpec = std::variant<PauliModel, ReducedPSpinParams>;

// Parses the model file format; errors carry line numbers or field paths.
ModelSpec parse_model_json(const std::string& text, const std::string& source = "model");

std::string spectrum_csv(const SpectralCurves& curves);
std::string field_grid_csv(const MorseSurface& surface, const Region& region, int resolution);
std::string critical_csv(double b, const std::vector<CriticalPoint>& points);
std::string census_csv(const std::vector<CensusRow>& rows);
std::string branches_csv(const CerfDiagram& diagram);
std::string events_csv(const CerfDiagram& diagram);
std::string curvature_points_csv(const CurvatureReport& report);
std::string qpt_csv(const QptReport& report);
std::string scan_csv(const std::vector<GapScanRow>& rows);

std::string critical_json(double b, const Region& region, const CriticalSearchResult& result);
std::string diagram_json(const CerfDiagram& diagram, const InvariantReport& invariants);
std::string curvature_json(const CurvatureReport& report);
std::string curvature_pair_json(const CurvatureReport& a, const CurvatureReport& b);
std::string qpt_json(const QptReport& report, const ClassicalEnergyParams& params);

void write_text_file(const std::string& path, const std::string& content);

} // namespace morsegap
