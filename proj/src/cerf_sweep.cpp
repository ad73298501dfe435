#include "morsegap/cerf_sweep.hpp"

#include "morsegap/error.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace morsegap {

std::string to_string(EventType type) { return type == EventType::birth ? "birth" : "death"; }

Region sweep_region(const HamiltonianFamily& family, const std::vector<double>& b_grid) {
  Region r = default_domain(family, b_grid.front());
  for (double b : b_grid) {
    const Region d = default_domain(family, b);
    r.lambda_lo = std::min(r.lambda_lo, d.lambda_lo);
    r.lambda_hi = std::max(r.lambda_hi, d.lambda_hi);
  }
  return r;
}

namespace {

struct Context {
  const HamiltonianFamily& family;
  Region region;
  SweepOptions options;

  CriticalSearchResult solve(double b, std::vector<std::pair<double, double>> seeds) const {
    SurfaceOptions so;
    so.ds = options.ds;
    so.derivatives = options.derivatives;
    so.domain = region;
    const SurfacePtr surface = make_surface(family, b, so);
    CriticalSearchOptions search = options.search;
    search.extra_seeds.insert(search.extra_seeds.end(), seeds.begin(), seeds.end());
    return find_critical_points(*surface, region, search);
  }

  double distance(double s0, double l0, double s1, double l1) const {
    return std::max(std::abs(s1 - s0) / region.s_width(), std::abs(l1 - l0) / region.lambda_width());
  }
};

std::vector<std::pair<double, double>> seeds_of(const std::vector<CriticalPoint>& pts) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pts) out.emplace_back(p.s, p.lambda);
  return out;
}

BranchPoint branch_point(const CriticalPoint& p, double b, int snapshot) {
  BranchPoint bp;
  bp.snapshot = snapshot;
  bp.b = b;
  bp.s = p.s;
  bp.lambda = p.lambda;
  bp.kind = p.kind;
  bp.K1 = p.K1;
  bp.K2 = p.K2;
  if (p.kind == CriticalKind::saddle) {
    try {
      bp.theta = asymptote_angle(p).theta;
    } catch (const Error&) {
      bp.theta = NAN;
    }
  }
  return bp;
}

bool is_extremum(CriticalKind k) { return k != CriticalKind::saddle; }

// Does a (saddle, extremum) pair of the given sheet sit near the given spots?
std::optional<std::pair<CriticalPoint, CriticalPoint>>
find_pair(const Context& ctx, const std::vector<CriticalPoint>& pts, const CriticalPoint& saddle,
          const CriticalPoint& extremum) {
  const CriticalPoint* bs = nullptr;
  const CriticalPoint* be = nullptr;
  double ds = ctx.options.match_cap, de = ctx.options.match_cap;
  for (const auto& p : pts) {
    if (p.sheet != saddle.sheet) continue;
    if (p.kind == CriticalKind::saddle) {
      const double d = ctx.distance(p.s, p.lambda, saddle.s, saddle.lambda);
      if (d <= ds) ds = d, bs = &p;
    } else if (p.kind == extremum.kind) {
      const double d = ctx.distance(p.s, p.lambda, extremum.s, extremum.lambda);
      if (d <= de) de = d, be = &p;
    }
  }
  if (bs && be) return std::make_pair(*bs, *be);
  return std::nullopt;
}

} // namespace

CerfDiagram sweep(const HamiltonianFamily& family, const std::vector<double>& b_grid,
                  const SweepOptions& options) {
  if (b_grid.size() < 2) throw ValidationError("b grid needs at least two values");
  for (double b : b_grid)
    if (!std::isfinite(b)) throw ValidationError("b grid values must be finite");
  const bool ascending = b_grid[1] > b_grid[0];
  for (std::size_t i = 0; i + 1 < b_grid.size(); ++i)
    if (ascending ? !(b_grid[i + 1] > b_grid[i]) : !(b_grid[i + 1] < b_grid[i]))
      throw ValidationError("b grid must be strictly monotone");
  if (!(options.match_cap > 0.0)) throw ValidationError("match cap must be positive");
  options.search.validate();

  Context ctx{family, options.region ? *options.region : sweep_region(family, b_grid), options};
  ctx.region.validate();

  CerfDiagram dia;
  dia.region = ctx.region;
  dia.b_grid = b_grid;
  const std::size_t m = b_grid.size();

  // forward continuation, then a two-sided reseed that repairs census oscillations
  std::vector<CriticalSearchResult> snaps(m);
  for (std::size_t i = 0; i < m; ++i)
    snaps[i] = ctx.solve(b_grid[i], i > 0 ? seeds_of(snaps[i - 1].points)
                                          : std::vector<std::pair<double, double>>{});
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<double, double>> seeds;
    if (i > 0) seeds = seeds_of(snaps[i - 1].points);
    if (i + 1 < m) {
      auto more = seeds_of(snaps[i + 1].points);
      seeds.insert(seeds.end(), more.begin(), more.end());
    }
    auto again = ctx.solve(b_grid[i], seeds);
    if (again.points.size() != snaps[i].points.size()) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "b=%.12g: reseeding changed the census from %zu to %zu", b_grid[i],
                    snaps[i].points.size(), again.points.size());
      dia.notes.push_back(buf);
    }
    snaps[i] = std::move(again);
  }

  for (std::size_t i = 0; i < m; ++i) {
    Snapshot sn;
    sn.b = b_grid[i];
    sn.points = snaps[i].points;
    sn.degenerate = snaps[i].degenerate;
    sn.branch_of.assign(sn.points.size(), -1);
    dia.snapshots.push_back(std::move(sn));
  }

  auto new_branch = [&](std::size_t i, std::size_t k) {
    const CriticalPoint& p = dia.snapshots[i].points[k];
    Branch br;
    br.id = static_cast<int>(dia.branches.size());
    br.kind = p.kind;
    br.sheet = p.sheet;
    br.points.push_back(branch_point(p, b_grid[i], static_cast<int>(i)));
    dia.snapshots[i].branch_of[k] = br.id;
    dia.branches.push_back(std::move(br));
  };
  for (std::size_t k = 0; k < dia.snapshots[0].points.size(); ++k) new_branch(0, k);

  const double cap = options.match_cap;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    auto& A = dia.snapshots[i];
    auto& B = dia.snapshots[i + 1];
    std::vector<bool> a_used(A.points.size(), false), b_used(B.points.size(), false);

    auto match_pass = [&](bool adaptive) {
      std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
      for (std::size_t a = 0; a < A.points.size(); ++a) {
        if (a_used[a]) continue;
        const auto& pa = A.points[a];
        const Branch& br = dia.branches[static_cast<std::size_t>(A.branch_of[a])];
        double ps = pa.s, pl = pa.lambda, thr = cap;
        if (adaptive && br.points.size() >= 2) {
          const auto& prev = br.points[br.points.size() - 2];
          if (prev.snapshot == static_cast<int>(i) - 1) {
            ps += pa.s - prev.s;
            pl += pa.lambda - prev.lambda;
            const double step = ctx.distance(prev.s, prev.lambda, pa.s, pa.lambda);
            thr = std::min(cap, std::max(0.2 * cap, 3.0 * step));
          }
        }
        for (std::size_t b = 0; b < B.points.size(); ++b) {
          if (b_used[b]) continue;
          const auto& pb = B.points[b];
          if (pb.kind != pa.kind || pb.sheet != pa.sheet) continue;
          const double d = ctx.distance(ps, pl, pb.s, pb.lambda);
          if (d <= thr) cand.emplace_back(d, a, b);
        }
      }
      std::sort(cand.begin(), cand.end());
      for (const auto& [d, a, b] : cand) {
        if (a_used[a] || b_used[b]) continue;
        a_used[a] = b_used[b] = true;
        const int id = A.branch_of[a];
        B.branch_of[b] = id;
        dia.branches[static_cast<std::size_t>(id)].points.push_back(
            branch_point(B.points[b], b_grid[i + 1], static_cast<int>(i + 1)));
      }
    };
    match_pass(true);
    match_pass(false);

    for (std::size_t b = 0; b < B.points.size(); ++b)
      if (!b_used[b]) new_branch(i + 1, b);

    // pair the leftovers: appearances are births, disappearances deaths
    auto pair_up = [&](const Snapshot& S, const std::vector<bool>& used, EventType type) {
      std::vector<std::size_t> saddles, extrema;
      for (std::size_t k = 0; k < S.points.size(); ++k) {
        if (used[k]) continue;
        (S.points[k].kind == CriticalKind::saddle ? saddles : extrema).push_back(k);
      }
      std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
      for (auto sa : saddles)
        for (auto ex : extrema)
          if (S.points[sa].sheet == S.points[ex].sheet)
            cand.emplace_back(ctx.distance(S.points[sa].s, S.points[sa].lambda, S.points[ex].s,
                                           S.points[ex].lambda),
                              sa, ex);
      std::sort(cand.begin(), cand.end());
      std::vector<bool> taken(S.points.size(), false);
      for (const auto& [d, sa, ex] : cand) {
        if (taken[sa] || taken[ex]) continue;
        taken[sa] = taken[ex] = true;
        CerfEvent ev;
        ev.type = type;
        ev.b_from = b_grid[i];
        ev.b_to = b_grid[i + 1];
        ev.saddle_branch = S.branch_of[sa];
        ev.extremum_branch = S.branch_of[ex];
        CriticalPoint ps = S.points[sa], pe = S.points[ex];
        // bisection: keep the half in which the pair is created or destroyed
        double near = type == EventType::birth ? b_grid[i] : b_grid[i + 1];
        double far = type == EventType::birth ? b_grid[i + 1] : b_grid[i];
        for (int level = 0; level < options.refine_levels; ++level) {
          const double mid = 0.5 * (near + far);
          const auto probe = ctx.solve(mid, {{ps.s, ps.lambda}, {pe.s, pe.lambda}});
          if (auto pr = find_pair(ctx, probe.points, ps, pe)) {
            far = mid;
            ps = pr->first;
            pe = pr->second;
          } else {
            near = mid;
          }
        }
        ev.b_from = type == EventType::birth ? near : far;
        ev.b_to = type == EventType::birth ? far : near;
        ev.s = 0.5 * (ps.s + pe.s);
        ev.lambda = 0.5 * (ps.lambda + pe.lambda);
        dia.events.push_back(ev);
      }
      for (std::size_t k = 0; k < S.points.size(); ++k) {
        if (used[k] || taken[k]) continue;
        UnpairedChange u;
        u.b_from = b_grid[i];
        u.b_to = b_grid[i + 1];
        u.branch = S.branch_of[k];
        u.appearance = type == EventType::birth;
        u.s = S.points[k].s;
        u.lambda = S.points[k].lambda;
        dia.unpaired.push_back(u);
      }
    };
    pair_up(B, b_used, EventType::birth);
    pair_up(A, a_used, EventType::death);
  }
  // bisection can reorder events that share a grid interval
  const double dir = b_grid.back() > b_grid.front() ? 1.0 : -1.0;
  std::stable_sort(dia.events.begin(), dia.events.end(),
                   [dir](const CerfEvent& a, const CerfEvent& b) { return dir * a.b_from < dir * b.b_from; });
  return dia;
}

std::vector<CensusRow> census(const CerfDiagram& diagram) {
  std::vector<CensusRow> rows;
  for (const auto& sn : diagram.snapshots) {
    CensusRow r;
    r.b = sn.b;
    for (const auto& p : sn.points) {
      if (p.kind == CriticalKind::minimum) ++r.n_min;
      else if (p.kind == CriticalKind::saddle) ++r.n_saddle;
      else ++r.n_max;
    }
    r.chi = r.n_min - r.n_saddle + r.n_max;
    rows.push_back(r);
  }
  return rows;
}

InvariantReport check_invariants(const CerfDiagram& diagram) {
  InvariantReport rep;
  rep.census = census(diagram);
  char buf[200];
  for (std::size_t i = 0; i + 1 < rep.census.size(); ++i) {
    const auto& a = rep.census[i];
    const auto& c = rep.census[i + 1];
    if (a.chi != c.chi) {
      rep.chi_constant = false;
      std::snprintf(buf, sizeof buf, "chi jumps from %d to %d in b interval [%.12g, %.12g]", a.chi, c.chi,
                    a.b, c.b);
      rep.problems.push_back(buf);
    }
    const int d_saddle = c.n_saddle - a.n_saddle;
    const int d_ext = (c.n_min + c.n_max) - (a.n_min + a.n_max);
    if ((d_saddle - d_ext) % 2 != 0) {
      rep.parity_consistent = false;
      std::snprintf(buf, sizeof buf, "census parity changes in b interval [%.12g, %.12g]", a.b, c.b);
      rep.problems.push_back(buf);
    }
  }
  for (const auto& ev : diagram.events) {
    const auto& s = diagram.branches[static_cast<std::size_t>(ev.saddle_branch)];
    const auto& e = diagram.branches[static_cast<std::size_t>(ev.extremum_branch)];
    if (s.kind != CriticalKind::saddle || !is_extremum(e.kind)) {
      rep.events_paired = false;
      rep.problems.push_back("event does not pair a saddle with an extremum");
    }
  }
  for (const auto& u : diagram.unpaired) {
    rep.events_paired = false;
    std::snprintf(buf, sizeof buf, "unpaired %s of branch %d at (%.12g, %.12g) in b interval [%.12g, %.12g]",
                  u.appearance ? "appearance" : "disappearance", u.branch, u.s, u.lambda, u.b_from, u.b_to);
    rep.problems.push_back(buf);
  }
  return rep;
}

InvariantReport verify_invariants(const CerfDiagram& diagram) {
  InvariantReport rep = check_invariants(diagram);
  if (!rep.ok()) throw InvariantViolation(rep.problems.front());
  return rep;
}

AngleTrace angle_trace(const CerfDiagram& diagram, int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= diagram.branches.size())
    throw ValidationError("no branch with id " + std::to_string(id));
  const Branch& br = diagram.branches[static_cast<std::size_t>(id)];
  if (br.kind != CriticalKind::saddle) throw ValidationError("angle trace needs a saddle branch");
  AngleTrace out;
  for (const auto& p : br.points) out.samples.emplace_back(p.b, p.theta);
  if (br.points.back().snapshot + 1 < static_cast<int>(diagram.snapshots.size())) {
    for (const auto& ev : diagram.events)
      if (ev.type == EventType::death && ev.saddle_branch == id) out.death = ev;
  }
  return out;
}

std::optional<std::size_t> dominant_saddle(const std::vector<CriticalPoint>& points) {
  std::optional<std::size_t> best;
  double best_gap = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.kind != CriticalKind::saddle || p.sheet != 1) continue;
    double g = INFINITY;
    try {
      g = gap_from_saddle(p).delta_min;
    } catch (const Error&) {
      continue;
    }
    if (g < best_gap) best_gap = g, best = i;
  }
  if (best) return best;
  double best_f = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.kind == CriticalKind::saddle && std::abs(p.f_value) < best_f) best_f = std::abs(p.f_value), best = i;
  }
  return best;
}

} // namespace morsegap
