#include "morsegap/io.hpp"

#include "morsegap/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace morsegap {

using Json = nlohmann::ordered_json;

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

// JSON numbers carry the same 12 significant digits as the CSV files.
Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(fmt(x));
}

Json region_json(const Region& r) {
  return Json{{"s_lo", num(r.s_lo)}, {"s_hi", num(r.s_hi)}, {"lambda_lo", num(r.lambda_lo)},
              {"lambda_hi", num(r.lambda_hi)}};
}

Json point_json(const CriticalPoint& p) {
  Json j{{"s", num(p.s)},
         {"lambda", num(p.lambda)},
         {"f", num(p.f_value)},
         {"kind", to_string(p.kind)},
         {"index", p.morse_index},
         {"K1_taylor", num(p.K1)},
         {"K2_taylor", num(p.K2)},
         {"kappa1", num(p.kappa1())},
         {"kappa2", num(p.kappa2())},
         {"axis_rotation", num(p.axis_rotation)},
         {"detHess", num(p.gauss_K)},
         {"residual", num(p.residual)},
         {"sheet", p.sheet}};
  return j;
}

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

std::vector<PauliTerm> parse_terms(const Json& root, const char* key, const std::string& source, int n_qubits) {
  std::vector<PauliTerm> out;
  if (!root.contains(key)) return out;
  const Json& arr = root.at(key);
  if (!arr.is_array()) throw ValidationError(source + ": field '" + key + "' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = source + ": field '" + key + "[" + std::to_string(i) + "]";
    const Json& t = arr[i];
    if (!t.is_object()) throw ValidationError(path + "' must be an object");
    if (!t.contains("coeff") || !t["coeff"].is_number())
      throw ValidationError(path + ".coeff' must be a number");
    if (!t.contains("word") || !t["word"].is_string())
      throw ValidationError(path + ".word' must be a string");
    for (auto it = t.begin(); it != t.end(); ++it)
      if (it.key() != "coeff" && it.key() != "word")
        throw ValidationError(path + "." + it.key() + "' is not a known field");
    const std::string word = t["word"].get<std::string>();
    if (static_cast<int>(word.size()) != n_qubits)
      throw ValidationError(path + ".word' has length " + std::to_string(word.size()) + ", expected " +
                            std::to_string(n_qubits));
    if (word.find_first_not_of("IXYZ") != std::string::npos)
      throw ValidationError(path + ".word' has a letter outside I, X, Y, Z");
    out.push_back({t["coeff"].get<double>(), word});
  }
  return out;
}

} // namespace

ModelSpec parse_model_json(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(source + ": line " + std::to_string(line_of(text, e.byte)) +
                          ": malformed JSON (" + e.what() + ")");
  }
  if (!root.is_object()) throw ValidationError(source + ": top level must be an object");
  if (root.contains("builtin")) {
    if (!root["builtin"].is_string() || root["builtin"] != "pspin")
      throw ValidationError(source + ": field 'builtin' must be \"pspin\"");
    ReducedPSpinParams p;
    for (const char* key : {"N", "p"}) {
      if (!root.contains(key) || !root[key].is_number_integer())
        throw ValidationError(source + ": field '" + key + "' must be an integer");
    }
    for (auto it = root.begin(); it != root.end(); ++it)
      if (it.key() != "builtin" && it.key() != "N" && it.key() != "p")
        throw ValidationError(source + ": field '" + it.key() + "' is not a known field");
    p.N = root["N"].get<int>();
    p.p = root["p"].get<int>();
    p.validate();
    return p;
  }
  for (auto it = root.begin(); it != root.end(); ++it)
    if (it.key() != "n_qubits" && it.key() != "initial" && it.key() != "final" && it.key() != "enhancement")
      throw ValidationError(source + ": field '" + it.key() + "' is not a known field");
  if (!root.contains("n_qubits") || !root["n_qubits"].is_number_integer())
    throw ValidationError(source + ": field 'n_qubits' must be an integer");
  PauliModel m;
  m.n_qubits = root["n_qubits"].get<int>();
  m.initial = parse_terms(root, "initial", source, m.n_qubits);
  m.final_terms = parse_terms(root, "final", source, m.n_qubits);
  m.enhancement = parse_terms(root, "enhancement", source, m.n_qubits);
  return m;
}

std::string spectrum_csv(const SpectralCurves& c) {
  std::ostringstream os;
  os << "s";
  for (Eigen::Index j = 0; j < c.energies.cols(); ++j) os << ",lambda_" << (j + 1);
  os << ",gap\n";
  for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
    os << fmt(c.s_grid[i]);
    for (Eigen::Index j = 0; j < c.energies.cols(); ++j)
      os << ',' << fmt(c.energies(static_cast<Eigen::Index>(i), j));
    os << ',' << fmt(c.gap[i]) << '\n';
  }
  return os.str();
}

std::string field_grid_csv(const MorseSurface& surface, const Region& r, int n) {
  if (n < 2) throw ValidationError("field grid resolution must be >= 2");
  std::ostringstream os;
  os << "s,lambda,f,K\n";
  for (int i = 0; i < n; ++i) {
    const double s = r.s_lo + r.s_width() * i / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double l = r.lambda_lo + r.lambda_width() * k / (n - 1);
      os << fmt(s) << ',' << fmt(l) << ',' << fmt(eval_f(surface, s, l)) << ','
         << fmt(gauss_curvature(surface, s, l).K) << '\n';
    }
  }
  return os.str();
}

std::string critical_csv(double b, const std::vector<CriticalPoint>& points) {
  std::ostringstream os;
  os << "b,s,lambda,f,kind,index,K1,K2,detHess,theta,gap_min,residual\n";
  for (const auto& p : points) {
    double theta = NAN, gap = NAN;
    if (p.kind == CriticalKind::saddle) {
      try {
        theta = asymptote_angle(p).theta;
      } catch (const Error&) {
      }
      try {
        gap = gap_from_saddle(p).delta_min;
      } catch (const Error&) {
      }
    }
    os << fmt(b) << ',' << fmt(p.s) << ',' << fmt(p.lambda) << ',' << fmt(p.f_value) << ','
       << to_string(p.kind) << ',' << p.morse_index << ',' << fmt(p.K1) << ',' << fmt(p.K2) << ','
       << fmt(p.gauss_K) << ',' << fmt(theta) << ',' << fmt(gap) << ',' << fmt(p.residual) << '\n';
  }
  return os.str();
}

std::string census_csv(const std::vector<CensusRow>& rows) {
  std::ostringstream os;
  os << "b,n_min,n_saddle,n_max,chi\n";
  for (const auto& r : rows)
    os << fmt(r.b) << ',' << r.n_min << ',' << r.n_saddle << ',' << r.n_max << ',' << r.chi << '\n';
  return os.str();
}

std::string branches_csv(const CerfDiagram& d) {
  std::ostringstream os;
  os << "branch_id,b,s,lambda,kind,K1,K2,theta\n";
  for (const auto& br : d.branches)
    for (const auto& p : br.points)
      os << br.id << ',' << fmt(p.b) << ',' << fmt(p.s) << ',' << fmt(p.lambda) << ',' << to_string(p.kind)
         << ',' << fmt(p.K1) << ',' << fmt(p.K2) << ',' << fmt(p.theta) << '\n';
  return os.str();
}

std::string events_csv(const CerfDiagram& d) {
  std::ostringstream os;
  os << "type,b_from,b_to,saddle_branch,extremum_branch,s,lambda\n";
  for (const auto& e : d.events)
    os << to_string(e.type) << ',' << fmt(e.b_from) << ',' << fmt(e.b_to) << ',' << e.saddle_branch << ','
       << e.extremum_branch << ',' << fmt(e.s) << ',' << fmt(e.lambda) << '\n';
  return os.str();
}

std::string curvature_points_csv(const CurvatureReport& r) {
  std::ostringstream os;
  os << "s,lambda,kind,local_integral,r\n";
  for (const auto& p : r.per_point)
    os << fmt(p.point.s) << ',' << fmt(p.point.lambda) << ',' << to_string(p.point.kind) << ','
       << fmt(p.local_integral) << ',' << fmt(p.r) << '\n';
  return os.str();
}

std::string qpt_csv(const QptReport& r) {
  std::ostringstream os;
  os << "s,theta_star,e_star\n";
  for (std::size_t i = 0; i < r.s_grid.size(); ++i)
    os << fmt(r.s_grid[i]) << ',' << fmt(r.theta_star[i]) << ',' << fmt(r.e_star[i]) << '\n';
  return os.str();
}

std::string scan_csv(const std::vector<GapScanRow>& rows) {
  std::ostringstream os;
  os << "N,min_gap,s_at_min\n";
  for (const auto& r : rows) os << r.N << ',' << fmt(r.min_gap) << ',' << fmt(r.s_at_min) << '\n';
  return os.str();
}

std::string critical_json(double b, const Region& region, const CriticalSearchResult& res) {
  int n_min = 0, n_saddle = 0, n_max = 0;
  Json pts = Json::array();
  for (const auto& p : res.points) {
    (p.kind == CriticalKind::minimum ? n_min : p.kind == CriticalKind::saddle ? n_saddle : n_max)++;
    pts.push_back(point_json(p));
  }
  Json deg = Json::array();
  for (const auto& d : res.degenerate)
    deg.push_back({{"s", num(d.s)}, {"lambda", num(d.lambda)}, {"detHess", num(d.det_hessian)},
                   {"threshold", num(d.threshold)}});
  Json j{{"b", num(b)},
         {"region", region_json(region)},
         {"curvature_convention", "K1,K2 are Taylor coefficients; kappa = 2K are Hessian eigenvalues"},
         {"n_min", n_min},
         {"n_saddle", n_saddle},
         {"n_max", n_max},
         {"chi", n_min - n_saddle + n_max},
         {"points", pts},
         {"degenerate_warnings", deg}};
  return j.dump(2) + "\n";
}

std::string diagram_json(const CerfDiagram& d, const InvariantReport& inv) {
  Json branches = Json::array();
  for (const auto& br : d.branches) {
    Json pts = Json::array();
    for (const auto& p : br.points)
      pts.push_back({{"b", num(p.b)}, {"s", num(p.s)}, {"lambda", num(p.lambda)}});
    branches.push_back({{"id", br.id}, {"kind", to_string(br.kind)}, {"sheet", br.sheet}, {"points", pts}});
  }
  Json events = Json::array();
  for (const auto& e : d.events)
    events.push_back({{"type", to_string(e.type)},
                      {"b_interval", {num(e.b_from), num(e.b_to)}},
                      {"saddle_branch", e.saddle_branch},
                      {"extremum_branch", e.extremum_branch},
                      {"s", num(e.s)},
                      {"lambda", num(e.lambda)}});
  Json unpaired = Json::array();
  for (const auto& u : d.unpaired)
    unpaired.push_back({{"b_interval", {num(u.b_from), num(u.b_to)}},
                        {"branch", u.branch},
                        {"appearance", u.appearance},
                        {"s", num(u.s)},
                        {"lambda", num(u.lambda)}});
  Json census = Json::array();
  for (const auto& r : inv.census)
    census.push_back({{"b", num(r.b)}, {"n_min", r.n_min}, {"n_saddle", r.n_saddle}, {"n_max", r.n_max}, {"chi", r.chi}});
  Json j{{"region", region_json(d.region)},
         {"b_grid", Json::array()},
         {"census", census},
         {"branches", branches},
         {"events", events},
         {"unpaired", unpaired},
         {"invariants", {{"chi_constant", inv.chi_constant}, {"events_paired", inv.events_paired},
                         {"parity_consistent", inv.parity_consistent}, {"problems", inv.problems}}},
         {"notes", d.notes}};
  for (double b : d.b_grid) j["b_grid"].push_back(num(b));
  return j.dump(2) + "\n";
}

namespace {

Json report_json(const CurvatureReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.per_point) {
    Json pj = point_json(p.point);
    pj["local_integral"] = num(p.local_integral);
    pj["model_integral"] = num(p.model_integral);
    pj["r"] = num(p.r);
    pj["cells"] = p.cells;
    pts.push_back(pj);
  }
  return Json{{"region", region_json(r.region)},
              {"resolution", r.resolution},
              {"workers", r.workers},
              {"total_curvature", num(r.total_curvature)},
              {"refined_total", num(r.refined_total)},
              {"chi_morse", r.chi_morse},
              {"chi_reference", r.chi_reference},
              {"defect", num(r.defect)},
              {"gauss_bonnet", {{"interior", num(r.balance.interior)},
                                {"boundary_geodesic", num(r.balance.geodesic)},
                                {"corner_turning", num(r.balance.turning)},
                                {"total", num(r.balance.total())}}},
              {"per_point", pts},
              {"warnings", r.warnings}};
}

} // namespace

std::string curvature_json(const CurvatureReport& r) { return report_json(r).dump(2) + "\n"; }

std::string curvature_pair_json(const CurvatureReport& a, const CurvatureReport& b) {
  return Json{{"b0", report_json(a)}, {"b1", report_json(b)}}.dump(2) + "\n";
}

std::string qpt_json(const QptReport& r, const ClassicalEnergyParams& q) {
  Json plateaus = Json::array();
  for (const auto& p : r.plateaus)
    plateaus.push_back({{"s", num(p.s)}, {"theta_a", num(p.theta_a)}, {"theta_b", num(p.theta_b)}});
  Json j{{"p", q.p},
         {"k", q.k},
         {"b", num(q.b)},
         {"order", to_string(r.order)},
         {"s_c", r.s_c ? num(*r.s_c) : Json(nullptr)},
         {"jump", num(r.jump)},
         {"jump_threshold", num(r.jump_threshold)},
         {"tracked_from_s1", {{"s_spinodal", r.s_spinodal ? num(*r.s_spinodal) : Json(nullptr)},
                              {"jump", num(r.tracked_jump)}}},
         {"plateaus", plateaus},
         {"n_points", r.s_grid.size()}};
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << content;
  if (!f) throw ValidationError("failed writing " + path);
}

} // namespace morsegap
