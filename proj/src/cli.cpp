#include "morsegap/cli.hpp"

#include "morsegap/error.hpp"
#include "morsegap/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace morsegap {

namespace {

struct ModelFlags {
  std::string builtin;
  std::string model;
  int N = -1;
  int p = 5;
  double eps = 0.1;
  std::string a = "0.5,1,0.5";
};

struct SearchFlags {
  int density = 64;
  double ds = 1e-4;
  double tol_grad = 1e-9;
  double tol_nondegen = 1e-8;
  double tol_dedup = 1e-6;
  double tol_flat = 1e-4;
  int workers = 1;
  std::string region;
  std::string derivatives = "spectral";
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--builtin", m.builtin, "built-in model")
      ->check(CLI::IsMember({"grover", "degeneracy", "pspin", "toy"}));
  cmd->add_option("--model", m.model, "model JSON file");
  cmd->add_option("--N", m.N, "qubit / spin count (grover, degeneracy: 5; pspin: 7)");
  cmd->add_option("--p", m.p, "p-spin power")->capture_default_str();
  cmd->add_option("--eps", m.eps, "toy surface width epsilon")->capture_default_str();
  cmd->add_option("--a", m.a, "toy surface values a_{-1},a_0,a_1")->capture_default_str();
}

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--region", f.region, "s0,s1,l0,l1 (default: surface domain)");
  cmd->add_option("--density", f.density, "seed grid points per axis")->capture_default_str();
  cmd->add_option("--ds", f.ds, "finite-difference step in s (fd derivatives)")->capture_default_str();
  cmd->add_option("--derivatives", f.derivatives, "s-partials: spectral (exact) or fd (coefficient differences)")
      ->check(CLI::IsMember({"spectral", "fd"}))
      ->capture_default_str();
  cmd->add_option("--tol-grad", f.tol_grad, "gradient tolerance, relative to |f| scale")->capture_default_str();
  cmd->add_option("--tol-nondegen", f.tol_nondegen, "nondegeneracy tolerance, relative to median |det Hess|")
      ->capture_default_str();
  cmd->add_option("--tol-dedup", f.tol_dedup, "deduplication distance")->capture_default_str();
  cmd->add_option("--tol-flat", f.tol_flat, "degenerate below this |det Hess|, region-normalized against scale^2")
      ->capture_default_str();
  cmd->add_option("--workers", f.workers, "worker threads")->capture_default_str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string("cannot parse ") + what + " value '" + item + "'");
    }
  }
  return out;
}

Region parse_region(const std::string& text) {
  const auto v = parse_list(text, "--region");
  if (v.size() != 4) throw ValidationError("--region needs s0,s1,l0,l1");
  Region r{v[0], v[1], v[2], v[3]};
  r.validate();
  return r;
}

double parse_number(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 1) throw ValidationError(std::string(what) + " needs a single number");
  return v[0];
}

// "x" or "start:stop:step"
std::vector<double> parse_b(const std::string& text) {
  if (text.find(':') == std::string::npos) return {parse_number(text, "--b")};
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_number(item, "--b"));
  if (parts.size() != 3) throw ValidationError("--b range must be start:stop:step");
  const double start = parts[0], stop = parts[1];
  if (parts[2] == 0.0) throw ValidationError("--b step must be nonzero");
  // the step runs from start towards stop whatever its sign
  const double step = stop >= start ? std::abs(parts[2]) : -std::abs(parts[2]);
  const double count = (stop - start) / step;
  const long n = std::lround(count);
  if (std::abs(count - n) > 1e-9 * std::max(1.0, std::abs(count)))
    throw ValidationError("--b range is not a whole number of steps");
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(std::stod(fmt(start + step * i)));
  return out;
}

HamiltonianFamily family_from(const ModelFlags& m, bool eigen_grover) {
  if (m.builtin.empty() == m.model.empty()) throw ValidationError("give exactly one of --builtin or --model");
  if (!m.model.empty()) {
    std::ifstream f(m.model, std::ios::binary);
    if (!f) throw ValidationError("cannot read model file " + m.model);
    std::stringstream buf;
    buf << f.rdbuf();
    const ModelSpec spec = parse_model_json(buf.str(), m.model);
    if (const auto* pm = std::get_if<PauliModel>(&spec)) return HamiltonianFamily::from_pauli(*pm);
    return HamiltonianFamily::pspin(std::get<ReducedPSpinParams>(spec));
  }
  if (m.builtin == "pspin") return HamiltonianFamily::pspin({m.N < 0 ? 7 : m.N, m.p, 2});
  AnalyticParams ap;
  ap.N = m.N < 0 ? 5 : m.N;
  if (m.builtin == "grover") {
    if (eigen_grover) return HamiltonianFamily::grover_effective(ap.N);
    return HamiltonianFamily::analytic(AnalyticKind::grover, ap);
  }
  if (m.builtin == "degeneracy") return HamiltonianFamily::analytic(AnalyticKind::degeneracy_enhanced, ap);
  const auto a = parse_list(m.a, "--a");
  if (a.size() != 3) throw ValidationError("--a needs three values");
  ap.eps = m.eps;
  ap.a_minus = a[0];
  ap.a_zero = a[1];
  ap.a_plus = a[2];
  return HamiltonianFamily::analytic(AnalyticKind::toy_three_points, ap);
}

std::string default_b(const ModelFlags& m) { return m.builtin == "pspin" ? "1" : "0"; }

CriticalSearchOptions search_options(const SearchFlags& f) {
  CriticalSearchOptions o;
  o.grid_density = f.density;
  o.tol_grad = f.tol_grad;
  o.tol_nondegen = f.tol_nondegen;
  o.tol_dedup = f.tol_dedup;
  o.tol_flat = f.tol_flat;
  o.workers = f.workers;
  o.validate();
  if (!(f.ds > 0.0)) throw ValidationError("--ds must be positive");
  return o;
}

SurfaceOptions surface_options(const SearchFlags& f) {
  SurfaceOptions so;
  so.ds = f.ds;
  so.derivatives = f.derivatives == "fd" ? Derivatives::coefficient_fd : Derivatives::spectral;
  return so;
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir);
  return (std::filesystem::path(dir) / name).string();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morse-theoretic analysis of adiabatic Hamiltonians through f(s,lambda) = det(H(s) - lambda I)"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  ModelFlags model;
  SearchFlags search;
  std::string b_text;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue curves and minimum gap");
  int s_points = 1001;
  add_model_flags(spectrum, model);
  spectrum->add_option("--b", b_text, "enhancement strength (pspin: 1, others: 0)");
  spectrum->add_option("--s-points", s_points, "uniform s grid size on [0,1]")->capture_default_str();
  spectrum->add_option("--out", out_dir, "output directory");

  auto* critical = app.add_subcommand("critical", "critical points, classification and chi");
  int field_grid = 0;
  add_model_flags(critical, model);
  add_search_flags(critical, search);
  critical->add_option("--b", b_text, "enhancement strength (pspin: 1, others: 0)");
  critical->add_option("--field-grid", field_grid, "also write an n x n field.csv (0: off)");
  critical->add_option("--out", out_dir, "output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "track critical points over b");
  double match_cap = 0.05;
  add_model_flags(sweep_cmd, model);
  add_search_flags(sweep_cmd, search);
  sweep_cmd->add_option("--b", b_text, "start:stop:step (default 1:0:0.02)");
  sweep_cmd->add_option("--match-cap", match_cap, "matching cap, region-normalized")->capture_default_str();
  sweep_cmd->add_option("--out", out_dir, "output directory");

  auto* qpt_cmd = app.add_subcommand("qpt", "classical minimizer curve and transition order");
  int qp = 5, s_res = 1001, theta_res = 1024, scan_res = 2001;
  double jump_threshold = 0.05;
  std::string scan;
  qpt_cmd->add_option("--p", qp, "p-spin power")->capture_default_str();
  qpt_cmd->add_option("--b", b_text, "enhancement strength (default 1)");
  qpt_cmd->add_option("--s-resolution", s_res, "s grid size on [0,1]")->capture_default_str();
  qpt_cmd->add_option("--theta-resolution", theta_res, "theta grid size")->capture_default_str();
  qpt_cmd->add_option("--jump-threshold", jump_threshold, "first-order threshold in rad")->capture_default_str();
  qpt_cmd->add_option("--scan", scan, "finite-size gap scan over N, as first:last");
  qpt_cmd->add_option("--scan-resolution", scan_res, "s grid size for the gap scan")->capture_default_str();
  qpt_cmd->add_option("--out", out_dir, "output directory");

  auto* curv = app.add_subcommand("curvature", "curvature integrals and per-point redistribution");
  int resolution = 256;
  std::string test_surface, compare_b;
  double height = 20.0, width = 1.0;
  add_model_flags(curv, model);
  add_search_flags(curv, search);
  curv->add_option("--b", b_text, "enhancement strength (pspin: 1, others: 0)");
  curv->add_option("--compare-b", compare_b, "second b for a redistribution report");
  curv->add_option("--resolution", resolution, "cells per axis")->capture_default_str();
  curv->add_option("--test-surface", test_surface, "bump or flat instead of a model")
      ->check(CLI::IsMember({"bump", "flat"}));
  curv->add_option("--height", height, "bump height")->capture_default_str();
  curv->add_option("--width", width, "bump width")->capture_default_str();
  curv->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*spectrum) {
      const auto family = family_from(model, true);
      const double b = parse_number(b_text.empty() ? default_b(model) : b_text, "--b");
      if (s_points < 2) throw ValidationError("--s-points must be >= 2");
      const auto curves = spectral_curves(family, b, unit_grid(s_points));
      write_text_file(out_path(out_dir, "spectrum.csv"), spectrum_csv(curves));
      const std::size_t i = curves.argmin_gap();
      out << "min_gap " << fmt(curves.gap[i]) << " at s " << fmt(curves.s_grid[i]) << '\n';
      return 0;
    }
    if (*critical) {
      const auto family = family_from(model, false);
      const double b = parse_number(b_text.empty() ? default_b(model) : b_text, "--b");
      const auto opts = search_options(search);
      SurfaceOptions so = surface_options(search);
      const auto surface = make_surface(family, b, so);
      const Region region = search.region.empty() ? surface->domain() : parse_region(search.region);
      const auto res = find_critical_points(*surface, region, opts);
      write_text_file(out_path(out_dir, "critical.csv"), critical_csv(b, res.points));
      write_text_file(out_path(out_dir, "critical.json"), critical_json(b, region, res));
      if (field_grid > 0)
        write_text_file(out_path(out_dir, "field.csv"), field_grid_csv(*surface, region, field_grid));
      int chi = euler_characteristic(res.points);
      out << "points " << res.points.size() << " chi " << chi << " degenerate " << res.degenerate.size() << '\n';
      for (const auto& p : res.points)
        out << to_string(p.kind) << " s " << fmt(p.s) << " lambda " << fmt(p.lambda) << " kappa2 "
            << fmt(p.kappa2()) << '\n';
      return 0;
    }
    if (*sweep_cmd) {
      const auto family = family_from(model, false);
      const auto grid = parse_b(b_text.empty() ? "1:0:0.02" : b_text);
      SweepOptions so;
      so.search = search_options(search);
      so.ds = search.ds;
      so.derivatives = surface_options(search).derivatives;
      so.match_cap = match_cap;
      if (!search.region.empty()) so.region = parse_region(search.region);
      const auto dia = sweep(family, grid, so);
      const auto inv = check_invariants(dia);
      write_text_file(out_path(out_dir, "diagram.json"), diagram_json(dia, inv));
      write_text_file(out_path(out_dir, "census.csv"), census_csv(inv.census));
      write_text_file(out_path(out_dir, "events.csv"), events_csv(dia));
      write_text_file(out_path(out_dir, "branches.csv"), branches_csv(dia));
      out << "snapshots " << dia.snapshots.size() << " branches " << dia.branches.size() << " events "
          << dia.events.size() << '\n';
      verify_invariants(dia);
      out << "chi " << inv.census.front().chi << " constant\n";
      return 0;
    }
    if (*qpt_cmd) {
      ClassicalEnergyParams q{qp, 2, b_text.empty() ? 1.0 : parse_number(b_text, "--b")};
      q.validate();
      const auto rep = minimizer_curve(unit_grid(s_res), q, theta_res, jump_threshold);
      write_text_file(out_path(out_dir, "qpt.json"), qpt_json(rep, q));
      write_text_file(out_path(out_dir, "qpt.csv"), qpt_csv(rep));
      out << "order " << to_string(rep.order);
      if (rep.s_c) out << " s_c " << fmt(*rep.s_c);
      out << " jump " << fmt(rep.jump);
      if (rep.s_spinodal) out << " tracked_s " << fmt(*rep.s_spinodal);
      out << '\n';
      if (!scan.empty()) {
        std::vector<double> range;
        std::stringstream ss(scan);
        std::string item;
        while (std::getline(ss, item, ':')) range.push_back(parse_number(item, "--scan"));
        if (range.size() != 2 || range[0] > range[1]) throw ValidationError("--scan needs first:last");
        std::vector<int> Ns;
        for (int N = static_cast<int>(range[0]); N <= static_cast<int>(range[1]); ++N) Ns.push_back(N);
        const auto rows = finite_size_gap_scan(Ns, qp, q.b, scan_res);
        write_text_file(out_path(out_dir, "scan.csv"), scan_csv(rows));
      }
      return 0;
    }
    if (*curv) {
      const auto opts = search_options(search);
      if (!test_surface.empty()) {
        SurfacePtr surface;
        if (test_surface == "bump")
          surface = bump_surface(height, width);
        else
          surface = constant_surface(0.0, search.region.empty() ? Region{0, 1, 0, 1} : parse_region(search.region));
        const Region region = search.region.empty() ? surface->domain() : parse_region(search.region);
        const auto rep = curvature_report(*surface, region, {}, resolution, search.workers);
        write_text_file(out_path(out_dir, "curvature.json"), curvature_json(rep));
        out << "total " << fmt(rep.total_curvature) << " refined " << fmt(rep.refined_total)
            << " gauss_bonnet " << fmt(rep.balance.total()) << " 2pi " << fmt(2.0 * std::numbers::pi) << '\n';
        return 0;
      }
      const auto family = family_from(model, false);
      SurfaceOptions so = surface_options(search);
      const double b0 = parse_number(b_text.empty() ? default_b(model) : b_text, "--b");
      if (!search.region.empty()) so.domain = parse_region(search.region);
      if (compare_b.empty()) {
        const auto surface = make_surface(family, b0, so);
        const Region region = surface->domain();
        const auto pts = find_critical_points(*surface, region, opts).points;
        const auto rep = curvature_report(*surface, region, pts, resolution, search.workers);
        write_text_file(out_path(out_dir, "curvature.json"), curvature_json(rep));
        write_text_file(out_path(out_dir, "curvature_points.csv"), curvature_points_csv(rep));
        out << "total " << fmt(rep.total_curvature) << " chi " << rep.chi_morse << " defect " << fmt(rep.defect)
            << '\n';
        return 0;
      }
      const double b1 = parse_number(compare_b, "--compare-b");
      if (!so.domain) {
        Region r = sweep_region(family, {b0, b1});
        so.domain = r;
      }
      const auto s0 = make_surface(family, b0, so);
      const auto s1 = make_surface(family, b1, so);
      const auto [r0, r1] = curvature_redistribution(*s0, *s1, *so.domain, resolution, opts);
      write_text_file(out_path(out_dir, "curvature.json"), curvature_pair_json(r0, r1));
      write_text_file(out_path(out_dir, "curvature_points_b0.csv"), curvature_points_csv(r0));
      write_text_file(out_path(out_dir, "curvature_points_b1.csv"), curvature_points_csv(r1));
      out << "b0 total " << fmt(r0.total_curvature) << " points " << r0.per_point.size() << "; b1 total "
          << fmt(r1.total_curvature) << " points " << r1.per_point.size() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

} // namespace morsegap
