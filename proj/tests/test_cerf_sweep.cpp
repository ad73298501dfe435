#include "morsegap/cerf_sweep.hpp"
#include "morsegap/error.hpp"
#include "morsegap/topology.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>

using namespace morsegap;

namespace {

std::vector<double> steps(double from, double to, int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(from + (to - from) * i / n);
  return g;
}

CriticalPoint kinded(CriticalKind k, double s) {
  CriticalPoint p;
  p.kind = k;
  p.s = s;
  return p;
}

const HamiltonianFamily kPSpin = HamiltonianFamily::pspin({7, 5, 2});

// contains a death near b = 0.677 and a birth near b = 0.629
const CerfDiagram& window_down() {
  static const CerfDiagram d = sweep(kPSpin, steps(0.72, 0.60, 6));
  return d;
}

} // namespace

TEST_SUITE("cerf_sweep") {

TEST_CASE("b-independent family: one branch, no events") {
  const auto d = sweep(HamiltonianFamily::grover_effective(5), {0.0, 0.5, 1.0});
  REQUIRE(d.branches.size() == 1);
  CHECK(d.branches[0].kind == CriticalKind::saddle);
  CHECK(d.branches[0].points.size() == 3);
  CHECK(d.events.empty());
  CHECK(d.unpaired.empty());
  const auto rep = verify_invariants(d);
  for (const auto& row : rep.census) {
    CHECK(row.n_saddle == 1);
    CHECK(row.total() == 1);
    CHECK(row.chi == -1);
  }
  const auto tr = angle_trace(d, 0);
  REQUIRE(tr.samples.size() == 3);
  for (const auto& [b, th] : tr.samples) CHECK(th == tr.samples.front().second);
  CHECK(!tr.death);
}

TEST_CASE("p-spin window: a death then a birth") {
  const auto& d = window_down();
  const auto rep = verify_invariants(d);
  CHECK(rep.ok());
  for (const auto& row : rep.census) CHECK(row.chi == -7);
  REQUIRE(d.events.size() == 2);
  CHECK(d.events[0].type == EventType::death);
  CHECK(d.events[1].type == EventType::birth);
  // bisection narrows each interval to 1/8 of the grid step
  for (const auto& ev : d.events) {
    CHECK(std::abs(ev.b_from - ev.b_to) == doctest::Approx(0.02 / 8).epsilon(1e-9));
    CHECK(d.branches[ev.saddle_branch].kind == CriticalKind::saddle);
    CHECK(d.branches[ev.extremum_branch].kind != CriticalKind::saddle);
  }
  CHECK(d.events[0].b_from > 0.66);
  CHECK(d.events[0].b_to < 0.68);
  CHECK(d.events[1].b_from > 0.62);
  CHECK(d.events[1].b_to < 0.64);
}

TEST_CASE("every snapshot point sits on exactly one branch") {
  const auto& d = window_down();
  std::size_t total = 0;
  for (const auto& sn : d.snapshots) {
    REQUIRE(sn.branch_of.size() == sn.points.size());
    total += sn.points.size();
    for (std::size_t k = 0; k < sn.points.size(); ++k) {
      const auto& br = d.branches[static_cast<std::size_t>(sn.branch_of[k])];
      CHECK(br.kind == sn.points[k].kind);
    }
  }
  std::size_t on_branches = 0;
  for (const auto& br : d.branches) on_branches += br.points.size();
  CHECK(on_branches == total);
}

TEST_CASE("events move the census by one pair") {
  const auto& d = window_down();
  const auto rows = census(d);
  for (const auto& ev : d.events) {
    std::size_t i = 0;
    while (i + 1 < rows.size() && !(std::min(rows[i].b, rows[i + 1].b) <= std::min(ev.b_from, ev.b_to) &&
                                    std::max(ev.b_from, ev.b_to) <= std::max(rows[i].b, rows[i + 1].b)))
      ++i;
    REQUIRE(i + 1 < rows.size());
    const int sign = ev.type == EventType::birth ? 1 : -1;
    CHECK(rows[i + 1].n_saddle - rows[i].n_saddle == sign);
    CHECK((rows[i + 1].n_min + rows[i + 1].n_max) - (rows[i].n_min + rows[i].n_max) == sign);
  }
}

TEST_CASE("reversed sweep swaps births and deaths") {
  const auto& down = window_down();
  const auto up = sweep(kPSpin, steps(0.60, 0.72, 6));
  CHECK(check_invariants(up).ok());
  REQUIRE(up.events.size() == down.events.size());
  for (const auto& e : down.events) {
    bool found = false;
    for (const auto& f : up.events) {
      if (f.type == e.type) continue;
      const bool overlap = std::max(std::min(e.b_from, e.b_to), std::min(f.b_from, f.b_to)) <=
                           std::min(std::max(e.b_from, e.b_to), std::max(f.b_from, f.b_to)) + 1e-12;
      const double ds = std::abs(e.s - f.s) / down.region.s_width();
      const double dl = std::abs(e.lambda - f.lambda) / down.region.lambda_width();
      if (overlap && std::max(ds, dl) < 0.05) found = true;
    }
    CHECK(found);
  }
  CHECK(up.branches.size() == down.branches.size());
}

TEST_CASE("sweeps are deterministic") {
  const auto a = sweep(kPSpin, {0.72, 0.70});
  const auto b = sweep(kPSpin, {0.72, 0.70});
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    REQUIRE(a.snapshots[i].points.size() == b.snapshots[i].points.size());
    for (std::size_t k = 0; k < a.snapshots[i].points.size(); ++k) {
      CHECK(a.snapshots[i].points[k].s == b.snapshots[i].points[k].s);
      CHECK(a.snapshots[i].points[k].lambda == b.snapshots[i].points[k].lambda);
    }
  }
}

TEST_CASE("angle trace of a dying saddle is truncated") {
  const auto& d = window_down();
  const int id = d.events[0].saddle_branch;
  const auto tr = angle_trace(d, id);
  REQUIRE(tr.death);
  CHECK(tr.death->saddle_branch == id);
  CHECK(tr.samples.size() < d.snapshots.size());
  for (const auto& [b, th] : tr.samples) {
    CHECK(b >= tr.death->b_from);
    CHECK(th > 0.0);
    CHECK(th < 3.1416);
  }
  CHECK_THROWS_AS(angle_trace(d, d.events[0].extremum_branch), ValidationError);
  CHECK_THROWS_AS(angle_trace(d, 10000), ValidationError);
}

TEST_CASE("dominant saddle angle shrinks toward b = 0.8") {
  const auto d = sweep(kPSpin, steps(1.0, 0.8, 4));
  CHECK(check_invariants(d).ok());
  const auto& first = d.snapshots.front();
  const auto i = dominant_saddle(first.points);
  REQUIRE(i);
  const auto tr = angle_trace(d, first.branch_of[*i]);
  REQUIRE(tr.samples.size() == 5);
  CHECK(tr.samples.front().second == doctest::Approx(2.574701955715).epsilon(1e-9));
  for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].second < tr.samples[k - 1].second);
}

TEST_CASE("invariant checks catch a missed point") {
  CerfDiagram d;
  d.b_grid = {1.0, 0.5, 0.0};
  d.snapshots.resize(3);
  d.snapshots[0].b = 1.0;
  d.snapshots[0].points = {kinded(CriticalKind::saddle, 0.3)};
  d.snapshots[1].b = 0.5;
  d.snapshots[1].points = {kinded(CriticalKind::saddle, 0.3), kinded(CriticalKind::saddle, 0.6)};
  d.snapshots[2].b = 0.0;
  d.snapshots[2].points = {kinded(CriticalKind::saddle, 0.3), kinded(CriticalKind::saddle, 0.6),
                           kinded(CriticalKind::minimum, 0.7)};
  const auto rep = check_invariants(d);
  CHECK(!rep.chi_constant);
  CHECK(!rep.parity_consistent);
  REQUIRE(!rep.problems.empty());
  CHECK(rep.problems.front().find("[1, 0.5]") != std::string::npos);
  CHECK_THROWS_AS(verify_invariants(d), InvariantViolation);
  try {
    verify_invariants(d);
  } catch (const InvariantViolation& e) {
    CHECK(std::string(e.what()).find("[1, 0.5]") != std::string::npos);
  }
}

TEST_CASE("census parity holds across a paired event") {
  CerfDiagram d;
  d.b_grid = {1.0, 0.5};
  d.snapshots.resize(2);
  d.snapshots[0].points = {kinded(CriticalKind::saddle, 0.3)};
  d.snapshots[1].points = {kinded(CriticalKind::saddle, 0.3), kinded(CriticalKind::saddle, 0.6),
                           kinded(CriticalKind::maximum, 0.7)};
  d.snapshots[0].b = 1.0;
  d.snapshots[1].b = 0.5;
  const auto rep = check_invariants(d);
  CHECK(rep.chi_constant);
  CHECK(rep.parity_consistent);
  CHECK(euler_characteristic(d.snapshots[1].points) == euler_characteristic(d.snapshots[0].points));
}

TEST_CASE("sweep validation") {
  CHECK_THROWS_AS(sweep(kPSpin, {0.5}), ValidationError);
  CHECK_THROWS_AS(sweep(kPSpin, {0.5, 0.6, 0.55}), ValidationError);
  CHECK_THROWS_AS(sweep(kPSpin, {0.5, 0.5}), ValidationError);
  SweepOptions o;
  o.match_cap = 0.0;
  CHECK_THROWS_AS(sweep(kPSpin, {0.5, 0.4}, o), ValidationError);
}

} // TEST_SUITE
