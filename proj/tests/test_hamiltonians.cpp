#include "morsegap/error.hpp"
#include "morsegap/hamiltonians.hpp"
#include "morsegap/surface.hpp"

#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

using namespace morsegap;

namespace {

std::vector<double> spectrum(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> w(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(w.begin(), w.end());
  return w;
}

bool contained(const std::vector<double>& sub, const std::vector<double>& full, double tol) {
  for (double x : sub) {
    auto it = std::min_element(full.begin(), full.end(),
                               [x](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
    if (std::abs(*it - x) > tol) return false;
  }
  return true;
}

} // namespace

TEST_SUITE("hamiltonians") {

TEST_CASE("single Z") {
  const Matrix H = build_pauli_matrix({{-1.0, "Z"}}, 1);
  CHECK(H(0, 0) == -1.0);
  CHECK(H(1, 1) == 1.0);
  CHECK(H(0, 1) == 0.0);
}

TEST_CASE("transverse field on two qubits flips exactly one bit") {
  const Matrix H = build_pauli_matrix({{1.0, "XI"}, {1.0, "IX"}}, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(H(i, j) == (std::popcount(unsigned(i ^ j)) == 1 ? 1.0 : 0.0));
}

TEST_CASE("ZZ parity") {
  const Matrix H = build_pauli_matrix({{-1.0, "ZZ"}}, 2);
  CHECK(H.diagonal()(0) == -1.0);
  CHECK(H.diagonal()(1) == 1.0);
  CHECK(H.diagonal()(2) == 1.0);
  CHECK(H.diagonal()(3) == -1.0);
}

TEST_CASE("YY is real, odd Y rejected") {
  const Matrix yy = build_pauli_matrix({{1.0, "YY"}}, 2);
  // Y (x) Y = -|00><11| - |11><00| + |01><10| + |10><01|
  CHECK(yy(0, 3) == -1.0);
  CHECK(yy(1, 2) == 1.0);
  CHECK_THROWS_AS(build_pauli_matrix({{1.0, "YI"}}, 2), ValidationError);
}

TEST_CASE("pauli errors") {
  CHECK_THROWS_AS(build_pauli_matrix({{1.0, "ZZ"}}, 3), ValidationError);
  CHECK_THROWS_AS(build_pauli_matrix({{1.0, "Q"}}, 1), ValidationError);
  CHECK_THROWS_AS(build_pauli_matrix({{NAN, "Z"}}, 1), ValidationError);
  CHECK_THROWS_AS(build_pauli_matrix({{1.0, std::string(15, 'Z')}}, 15), CapacityError);
}

TEST_CASE("reduced p-spin endpoints") {
  const ReducedPSpinParams P{7, 5, 2};
  const Matrix H1 = build_pspin_reduced(P, 1.0, 1.0);
  CHECK(H1(0, 0) == doctest::Approx(-7.0));
  for (int m = 0; m < 7; ++m) CHECK(H1(m, m + 1) == 0.0);
  for (int m = 0; m < 6; ++m) CHECK(H1(m, m + 2) == 0.0);

  const Matrix H0 = build_pspin_reduced(P, 0.0, 1.0);
  CHECK(H0.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(H0(0, 1) == doctest::Approx(-std::sqrt(7.0)));
}

TEST_CASE("reduced p-spin is pentadiagonal and symmetric") {
  const Matrix H = build_pspin_reduced({7, 5, 2}, 0.5, 0.1);
  CHECK(H.rows() == 8);
  CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (std::abs(i - j) > 2) CHECK(H(i, j) == 0.0);
  CHECK(H(0, 2) != 0.0);
}

TEST_CASE("reduced ground energy matches the full space") {
  const double e_red = spectrum(build_pspin_reduced({7, 5, 2}, 0.5, 0.1)).front();
  const double e_full = spectrum(build_full_pspin(7, 5, 0.5, 0.1)).front();
  CHECK(std::abs(e_red - e_full) < 1e-8);
}

TEST_CASE("full p-spin small cases") {
  const Matrix H = build_full_pspin(2, 2, 1.0, 1.0);
  CHECK(H(0, 0) == doctest::Approx(-2.0));
  CHECK(H(1, 1) == doctest::Approx(0.0));
  CHECK(H(2, 2) == doctest::Approx(0.0));
  CHECK(H(3, 3) == doctest::Approx(-2.0));

  const auto w = spectrum(build_full_pspin(3, 2, 0.0, 0.5));
  const std::vector<double> expect{-3, -1, -1, -1, 1, 1, 1, 3};
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-12));

  const auto red = spectrum(build_pspin_reduced({5, 3, 2}, 0.4, 1.0));
  const auto full = spectrum(build_full_pspin(5, 3, 0.4, 1.0));
  CHECK(contained(red, full, 1e-8));
  CHECK(std::abs(red.front() - full.front()) < 1e-8);

  CHECK_THROWS_AS(build_full_pspin(11, 3, 0.5, 1.0), CapacityError);
}

// Lower spin sectors interleave with the maximum-spin levels, so the literal
// "lowest six" statement does not hold; kept to document it.
TEST_CASE("lowest six full levels equal the reduced spectrum" * doctest::may_fail()) {
  const auto red = spectrum(build_pspin_reduced({5, 3, 2}, 0.4, 1.0));
  const auto full = spectrum(build_full_pspin(5, 3, 0.4, 1.0));
  for (std::size_t i = 0; i < red.size(); ++i) CHECK(std::abs(red[i] - full[i]) < 1e-8);
}

TEST_CASE("sector equivalence over a parameter grid") {
  for (int N = 2; N <= 8; ++N)
    for (int p : {2, 3, 5})
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (double b : {0.0, 0.1, 0.5, 1.0}) {
          const auto red = spectrum(build_pspin_reduced({N, p, 2}, s, b));
          const auto full = spectrum(build_full_pspin(N, p, s, b));
          CAPTURE(N);
          CAPTURE(p);
          CAPTURE(s);
          CAPTURE(b);
          CHECK(contained(red, full, 1e-8));
          CHECK(std::abs(red.front() - full.front()) < 1e-8);
        }
}

TEST_CASE("reduced p-spin validation") {
  CHECK_THROWS_AS(build_pspin_reduced({7, 5, 3}, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(build_pspin_reduced({1, 5, 2}, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(build_pspin_reduced({7, 1, 2}, 0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(build_pspin_reduced({7, 5, 2}, 1.5, 1.0), ValidationError);
  CHECK_THROWS_AS(build_pspin_reduced({7, 5, 2}, 0.5, NAN), ValidationError);
}

TEST_CASE("pauli family is affine in b") {
  PauliModel m;
  m.n_qubits = 2;
  m.initial = {{-1.0, "XI"}, {-1.0, "IX"}};
  m.final_terms = {{-1.0, "ZZ"}, {0.3, "ZI"}};
  m.enhancement = {{0.7, "XX"}};
  const auto fam = HamiltonianFamily::from_pauli(m);
  CHECK(fam.dimension() == 4);
  CHECK(fam.depends_on_b());
  for (double s : {0.0, 0.3, 1.0}) {
    const Matrix d = fam.evaluate(s, 0.4) - fam.evaluate(s, 0.0);
    const Matrix e = 0.4 * (fam.evaluate(s, 1.0) - fam.evaluate(s, 0.0));
    CHECK((d - e).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("from_matrices rejects asymmetric input") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b = a;
  b(0, 1) = 1.0;
  CHECK_THROWS_AS(HamiltonianFamily::from_matrices(a, b, a), ValidationError);
}

TEST_CASE("evaluate is symmetric for every family") {
  const std::vector<HamiltonianFamily> fams{HamiltonianFamily::grover_effective(5),
                                            HamiltonianFamily::pspin({7, 5, 2}),
                                            HamiltonianFamily::analytic(AnalyticKind::degeneracy_enhanced, {})};
  for (const auto& f : fams)
    for (double s : {0.0, 0.37, 1.0}) {
      const Matrix H = f.evaluate(s, 0.6);
      CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("grover closed form equals the effective 2x2 determinant") {
  const AnalyticParams P{5};
  const auto g = analytic_surface(AnalyticKind::grover, P);
  const auto fam = HamiltonianFamily::grover_effective(5);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double s = i / 9.0, l = -0.5 + 2.0 * j / 9.0;
      const Matrix H = fam.evaluate(s, 0.0) - l * Matrix::Identity(2, 2);
      CHECK(std::abs(g->value(s, l) - H.determinant()) < 1e-12);
    }
  CHECK(g->value(0.5, 0.5) == doctest::Approx(-0.0078125).epsilon(1e-14));
}

TEST_CASE("degeneracy surface at b = 0 factors through grover") {
  const AnalyticParams P{5};
  const auto d0 = analytic_surface(AnalyticKind::degeneracy_enhanced, P, 0.0);
  const auto g = analytic_surface(AnalyticKind::grover, P);
  for (double s : {0.1, 0.5, 0.8})
    for (double l : {-0.3, 0.4, 1.7}) {
      const double l1 = analytic_roots(AnalyticKind::grover, P, s, 0.0).front();
      CHECK(d0->value(s, l) == doctest::Approx(g->value(s, l) * (l - l1)).epsilon(1e-12));
    }
}

TEST_CASE("toy surface passes through a_0 at s = 0") {
  AnalyticParams P;
  P.a_zero = 1.3;
  const auto t = analytic_surface(AnalyticKind::toy_three_points, P);
  CHECK(std::abs(t->value(0.0, 1.3)) < 1e-14);
  CHECK(t->hessian(0.03, 0.2).ll == doctest::Approx(2.0));
}

TEST_CASE("analytic parameter validation") {
  AnalyticParams P;
  P.eps = 0.0;
  CHECK_THROWS_AS(analytic_surface(AnalyticKind::toy_three_points, P), ValidationError);
  CHECK_THROWS_AS(analytic_surface(AnalyticKind::degeneracy_enhanced, {}, -1.0), ValidationError);
  AnalyticParams Q;
  Q.N = 0;
  CHECK_THROWS_AS(analytic_surface(AnalyticKind::grover, Q), ValidationError);
}

} // TEST_SUITE
