#include "morsegap/critical_points.hpp"
#include "morsegap/error.hpp"
#include "morsegap/topology.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace morsegap;

namespace {

// a f for a wrapped surface
class Scaled final : public MorseSurface {
public:
  Scaled(SurfacePtr base, double a) : base_(std::move(base)), a_(a) { domain_ = base_->domain(); }
  double value(double s, double l) const override { return a_ * base_->value(s, l); }
  Gradient gradient(double s, double l) const override {
    const Gradient g = base_->gradient(s, l);
    return {a_ * g.s, a_ * g.lambda};
  }
  Hessian2 hessian(double s, double l) const override {
    const Hessian2 h = base_->hessian(s, l);
    return {a_ * h.ss, a_ * h.sl, a_ * h.ll};
  }
  std::vector<double> roots(double s) const override { return base_->roots(s); }
  double scale(double s, double l) const override { return std::abs(a_) * base_->scale(s, l); }
  int degree() const override { return base_->degree(); }

private:
  SurfacePtr base_;
  double a_;
};

// f = c_ss s^2 + c_sl s l + c_ll l^2 + c_3 s^3 - 3 c_3 s l^2 on [-1, 1]^2
class Quadric final : public MorseSurface {
public:
  Quadric(double ss, double sl, double ll, double cubic = 0.0) : ss_(ss), sl_(sl), ll_(ll), c3_(cubic) {
    domain_ = {-1, 1, -1, 1};
  }
  double value(double s, double l) const override {
    return ss_ * s * s + sl_ * s * l + ll_ * l * l + c3_ * (s * s * s - 3 * s * l * l);
  }
  Gradient gradient(double s, double l) const override {
    return {2 * ss_ * s + sl_ * l + c3_ * (3 * s * s - 3 * l * l), sl_ * s + 2 * ll_ * l - 6 * c3_ * s * l};
  }
  Hessian2 hessian(double s, double l) const override {
    return {2 * ss_ + 6 * c3_ * s, sl_ - 6 * c3_ * l, 2 * ll_ - 6 * c3_ * s};
  }
  std::vector<double> roots(double) const override { return {}; }
  double scale(double, double) const override { return 1.0; }
  int degree() const override { return 0; }

private:
  double ss_, sl_, ll_, c3_;
};

const HamiltonianFamily kPSpin = HamiltonianFamily::pspin({7, 5, 2});

CriticalSearchOptions density(int g) {
  CriticalSearchOptions o;
  o.grid_density = g;
  return o;
}

} // namespace

TEST_SUITE("critical_points") {

TEST_CASE("grover has a single saddle at the centre") {
  const auto g = analytic_surface(AnalyticKind::grover, {5});
  for (int d : {16, 32, 64}) {
    const auto r = find_critical_points(*g, g->domain(), density(d));
    REQUIRE(r.points.size() == 1);
    const auto& p = r.points[0];
    CHECK(p.kind == CriticalKind::saddle);
    CHECK(p.morse_index == 1);
    CHECK(p.s == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.lambda == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.K1 == doctest::Approx(std::pow(2.0, -5) - 1.0));
    CHECK(p.K2 == doctest::Approx(1.0));
    CHECK(p.gauss_K == doctest::Approx(4.0 * p.K1 * p.K2));
    CHECK(p.residual < 1e-9 * g->scale(p.s, p.lambda));
  }
}

TEST_CASE("toy family has exactly three interior points") {
  const auto t = analytic_surface(AnalyticKind::toy_three_points, {});
  for (int d : {16, 32, 64}) {
    const auto r = find_critical_points(*t, t->domain(), density(d));
    REQUIRE(r.points.size() == 3);
    CHECK(r.points[0].kind == CriticalKind::saddle);
    CHECK(r.points[1].kind != CriticalKind::saddle);
    CHECK(r.points[2].kind == CriticalKind::saddle);
    CHECK(euler_characteristic(r.points) == -1);
  }
}

TEST_CASE("degeneracy strip: maximum and saddle") {
  const auto d = analytic_surface(AnalyticKind::degeneracy_enhanced, {5}, 1.0);
  const double eps = 0.1;
  const auto r = find_critical_points(*d, {0.5 - eps / 2, 0.5 + eps / 2, 0.0, 3.0});
  REQUIRE(r.points.size() == 2);
  const auto& mx = r.points[0];
  const auto& sd = r.points[1];
  CHECK(mx.kind == CriticalKind::maximum);
  CHECK(sd.kind == CriticalKind::saddle);
  // mpmath reference, 40 digits
  CHECK(mx.s == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(mx.lambda == doctest::Approx(0.777044425733).epsilon(1e-10));
  CHECK(sd.lambda == doctest::Approx(2.04617887897).epsilon(1e-10));
  CHECK(mx.kappa2() == doctest::Approx(-3.80740335971).epsilon(1e-9));
  CHECK(sd.kappa2() == doctest::Approx(3.80740335971).epsilon(1e-9));
  CHECK(mx.f_value == doctest::Approx(0.303022737847).epsilon(1e-9));
}

TEST_CASE("local model of simple quadrics") {
  const Quadric bowl(1, 0, 1);
  const auto p = classify_point(bowl, 0, 0);
  CHECK(p.kind == CriticalKind::minimum);
  CHECK(p.K1 == doctest::Approx(1.0));
  CHECK(p.K2 == doctest::Approx(1.0));
  const auto m = local_model(p);
  CHECK(m(0.3, -0.2) == doctest::Approx(bowl.value(0.3, -0.2)));

  const Quadric cap(-1, 0.4, -2);
  CHECK(classify_point(cap, 0, 0).kind == CriticalKind::maximum);
  CHECK(classify_point(cap, 0, 0).morse_index == 2);

  // rotated saddle: the model reproduces the quadric exactly
  const Quadric tilt(-0.3, 1.7, 0.8);
  const auto q = classify_point(tilt, 0, 0);
  CHECK(q.kind == CriticalKind::saddle);
  const auto lm = local_model(q);
  for (double s : {-0.4, 0.1, 0.7})
    for (double l : {-0.5, 0.2}) CHECK(lm(s, l) == doctest::Approx(tilt.value(s, l)).epsilon(1e-12));
  const auto [u, v] = lm.coords(0.3, 0.4);
  CHECK(u * u + v * v == doctest::Approx(0.25));
}

TEST_CASE("morse index counts negative hessian eigenvalues") {
  const auto S = make_surface(kPSpin, 0.2);
  const auto r = find_critical_points(*S, S->domain());
  for (const auto& p : r.points) {
    Eigen::Matrix2d h;
    h << p.hessian.ss, p.hessian.sl, p.hessian.sl, p.hessian.ll;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    const int neg = (es.eigenvalues()(0) < 0) + (es.eigenvalues()(1) < 0);
    CHECK(neg == p.morse_index);
    CHECK(std::signbit(p.K1) == std::signbit(p.K1 * 1.0));
    CHECK((p.kind == CriticalKind::saddle) == (p.K1 * p.K2 < 0));
  }
}

TEST_CASE("gap from the grover saddle") {
  for (int N : {5, 10}) {
    const auto g = analytic_surface(AnalyticKind::grover, {N});
    const auto r = find_critical_points(*g, g->domain());
    REQUIRE(r.points.size() == 1);
    const auto gm = gap_from_saddle(r.points[0]);
    CHECK(gm.delta_min == doctest::Approx(std::pow(2.0, -N / 2.0)).epsilon(1e-12));
    // the model is exact for two levels
    for (double s : {0.3, 0.45, 0.5, 0.62}) {
      const auto w = g->roots(s);
      CHECK(gm(s) == doctest::Approx(w[1] - w[0]).epsilon(1e-10));
    }
  }
}

TEST_CASE("gap formula is homogeneous of degree zero") {
  const auto g = analytic_surface(AnalyticKind::grover, {5});
  const Scaled g4(g, 4.0);
  const auto a = find_critical_points(*g, g->domain()).points.at(0);
  const auto b = find_critical_points(g4, g->domain()).points.at(0);
  CHECK(b.f_value == doctest::Approx(4 * a.f_value));
  CHECK(b.K2 == doctest::Approx(4 * a.K2));
  CHECK(gap_from_saddle(b).delta_min == doctest::Approx(gap_from_saddle(a).delta_min).epsilon(1e-12));
}

TEST_CASE("gap formula preconditions") {
  const auto p = classify_point(Quadric(1, 0, 1), 0, 0);
  CHECK_THROWS_AS(gap_from_saddle(p), ValidationError);
  // saddle with f(p) > 0 on the lambda-like axis
  const Scaled flipped(analytic_surface(AnalyticKind::grover, {5}), -1.0);
  const auto q = classify_point(flipped, 0.5, 0.5);
  CHECK(q.kind == CriticalKind::saddle);
  CHECK_THROWS_AS(gap_from_saddle(q), InconsistencyError);
}

TEST_CASE("asymptote angle") {
  const auto sym = classify_point(Quadric(-1, 0, 1), 0, 0);
  CHECK(asymptote_angle(sym).theta == doctest::Approx(std::numbers::pi / 2));

  const auto g = analytic_surface(AnalyticKind::grover, {5});
  const auto gp = classify_point(*g, 0.5, 0.5);
  CHECK(asymptote_angle(gp).theta == doctest::Approx(1.55492264430494).epsilon(1e-12));

  // channel flattening along s closes the asymptotes
  const auto flat = classify_point(Quadric(-1e-6, 0, 1), 0, 0);
  CHECK(asymptote_angle(flat).theta < 2.1e-3);

  CHECK_THROWS_AS(asymptote_angle(classify_point(Quadric(1, 0, 1), 0, 0)), ValidationError);

  for (const auto& q : {Quadric(-0.3, 1.7, 0.8), Quadric(-2, 0.1, 0.05), Quadric(-1, 0, 1)}) {
    const auto a = asymptote_angle(classify_point(q, 0, 0));
    CHECK(std::abs(a.theta - null_direction_angle(a)) < 1e-9);
    // null directions really are null
    for (const auto& d : {a.dir_a, a.dir_b}) CHECK(std::abs(q.value(d[0], d[1])) < 1e-12);
  }
}

TEST_CASE("p-spin census at b = 1") {
  const auto S = make_surface(kPSpin, 1.0);
  const auto r = find_critical_points(*S, S->domain());
  CHECK(r.points.size() == 7);
  CHECK(r.degenerate.empty());
  CHECK(euler_characteristic(r.points) == -7);
  for (const auto& p : r.points) CHECK(p.kind == CriticalKind::saddle);
  // leftmost saddle, mpmath reference at 50 digits
  const auto& p = r.points.front();
  CHECK(p.s == doctest::Approx(0.4464519017471).epsilon(1e-10));
  CHECK(p.lambda == doctest::Approx(-3.948864113365).epsilon(1e-10));
  CHECK(p.f_value == doctest::Approx(-930.4769134487).epsilon(1e-9));
  CHECK(p.K1 == doctest::Approx(-165818.705832).epsilon(1e-8));
  CHECK(p.K2 == doctest::Approx(14069.52811534).epsilon(1e-8));
  CHECK(asymptote_angle(p).theta == doctest::Approx(2.574701955715).epsilon(1e-9));
}

TEST_CASE("p-spin dominant saddle at b = 0.1") {
  const auto S = make_surface(kPSpin, 0.1);
  const auto r = find_critical_points(*S, S->domain());
  CHECK(euler_characteristic(r.points) == -7);
  const CriticalPoint* d = nullptr;
  for (const auto& p : r.points)
    if (std::abs(p.s - 0.3917710385704) < 1e-6) d = &p;
  REQUIRE(d);
  CHECK(d->lambda == doctest::Approx(-1.794405501555).epsilon(1e-10));
  CHECK(d->K1 == doctest::Approx(-16.5329096533).epsilon(1e-7));
  CHECK(d->K2 == doctest::Approx(28888.61626346).epsilon(1e-8));
  CHECK(asymptote_angle(*d).theta == doctest::Approx(0.0478363950436).epsilon(1e-8));
}

TEST_CASE("classification is stable under density and ds") {
  for (double b : {1.0, 0.5, 0.1}) {
    std::vector<CriticalKind> ref;
    for (int d : {16, 32, 64})
      for (double ds : {1e-3, 1e-4, 1e-5}) {
        SurfaceOptions so;
        so.ds = ds;
        const auto S = make_surface(kPSpin, b, so);
        const auto r = find_critical_points(*S, S->domain(), density(d));
        std::vector<CriticalKind> kinds;
        for (const auto& p : r.points) kinds.push_back(p.kind);
        if (ref.empty()) ref = kinds;
        CAPTURE(b);
        CAPTURE(d);
        CHECK(kinds == ref);
        CHECK(euler_characteristic(r.points) == -7);
      }
  }
}

TEST_CASE("coefficient differences: stable where anti-crossings are wide") {
  SurfaceOptions so;
  so.derivatives = Derivatives::coefficient_fd;
  for (double ds : {1e-3, 1e-4, 1e-5}) {
    so.ds = ds;
    const auto S = make_surface(kPSpin, 0.5, so);
    const auto r = find_critical_points(*S, S->domain());
    CHECK(r.points.size() == 9);
    CHECK(euler_characteristic(r.points) == -7);
  }
}

TEST_CASE("degenerate points are reported separately") {
  const Quadric monkey(0, 0, 0, 1.0); // s^3 - 3 s l^2
  const auto r = find_critical_points(monkey, {-0.9, 0.8, -0.7, 0.95});
  CHECK(r.points.empty());
  REQUIRE(r.degenerate.size() == 1);
  CHECK(std::abs(r.degenerate[0].s) < 1e-4);
  CHECK(std::abs(r.degenerate[0].lambda) < 1e-4);
}

TEST_CASE("points on the region boundary are discarded") {
  const auto g = analytic_surface(AnalyticKind::grover, {5});
  CHECK(find_critical_points(*g, {0, 0.5, -0.1, 1.1}).points.empty());
  CHECK(find_critical_points(*g, {0, 1, 0.5, 1.1}).points.empty());
}

TEST_CASE("search validation") {
  const auto g = analytic_surface(AnalyticKind::grover, {5});
  CHECK_THROWS_AS(find_critical_points(*g, g->domain(), density(8)), ValidationError);
  CHECK_THROWS_AS(find_critical_points(*g, {0, 2, -0.1, 1.1}), ValidationError);
  CriticalSearchOptions o;
  o.tol_grad = -1;
  CHECK_THROWS_AS(find_critical_points(*g, g->domain(), o), ValidationError);
}

TEST_CASE("results do not depend on the worker count") {
  const auto S = make_surface(kPSpin, 0.3);
  CriticalSearchOptions one, four;
  four.workers = 4;
  const auto a = find_critical_points(*S, S->domain(), one);
  const auto b = find_critical_points(*S, S->domain(), four);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].s == b.points[i].s);
    CHECK(a.points[i].lambda == b.points[i].lambda);
  }
}

TEST_CASE("gap model on a two-level matrix family") {
  const auto fam = HamiltonianFamily::grover_effective(6);
  const auto S = make_surface(fam, 0.0);
  const auto r = find_critical_points(*S, S->domain());
  REQUIRE(r.points.size() == 1);
  const auto gm = gap_from_saddle(r.points[0]);
  const double L = gm.length_scale();
  for (int i = -10; i <= 10; ++i) {
    const double s = gm.s_c + 0.02 * i * L;
    const auto w = S->roots(s);
    CHECK(gm(s) == doctest::Approx(w[1] - w[0]).epsilon(0.05));
  }
}

// The quadratic model ignores the spectator levels; see the notes on gap fidelity.
TEST_CASE("gap model near every lowest p-spin saddle" * doctest::may_fail()) {
  for (double b : {1.0, 0.5, 0.1}) {
    const auto S = make_surface(kPSpin, b);
    for (const auto& p : find_critical_points(*S, S->domain()).points) {
      if (p.kind != CriticalKind::saddle || p.sheet != 1) continue;
      const auto gm = gap_from_saddle(p);
      const double L = gm.length_scale();
      for (int i = -10; i <= 10; ++i) {
        const double s = gm.s_c + 0.02 * i * L;
        const auto w = S->roots(s);
        CHECK(gm(s) == doctest::Approx(w[1] - w[0]).epsilon(0.05));
      }
    }
  }
}

} // TEST_SUITE
