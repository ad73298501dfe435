#include "morsegap/hamiltonians.hpp"

#include "morsegap/error.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace morsegap {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + " must be finite");
}

} // namespace

Matrix build_pauli_matrix(const std::vector<PauliTerm>& terms, int n_qubits, int max_qubits) {
  if (n_qubits < 1) throw ValidationError("n_qubits must be >= 1");
  if (n_qubits > max_qubits)
    throw CapacityError("n_qubits " + std::to_string(n_qubits) + " exceeds cap " +
                        std::to_string(max_qubits));
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    require_finite(term.coefficient, "Pauli coefficient");
    if (static_cast<int>(term.word.size()) != n_qubits)
      throw ValidationError("term " + std::to_string(t) + ": word '" + term.word +
                            "' has length " + std::to_string(term.word.size()) +
                            ", expected " + std::to_string(n_qubits));
    std::uint64_t flip = 0, phase_mask = 0;
    int n_y = 0;
    for (int q = 0; q < n_qubits; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << (n_qubits - 1 - q);
      switch (term.word[static_cast<std::size_t>(q)]) {
      case 'I': break;
      case 'X': flip |= bit; break;
      case 'Z': phase_mask |= bit; break;
      case 'Y':
        flip |= bit;
        phase_mask |= bit;
        ++n_y;
        break;
      default:
        throw ValidationError("term " + std::to_string(t) + ": invalid Pauli letter in '" +
                              term.word + "'");
      }
    }
    if (n_y % 2 != 0)
      throw ValidationError("term " + std::to_string(t) + ": word '" + term.word +
                            "' has an odd number of Y factors (imaginary entries)");
    // Y = i X Z on each site; an even count of i's gives (-1)^(n_y/2).
    const double base = (n_y / 2) % 2 == 0 ? term.coefficient : -term.coefficient;
    for (std::uint64_t x = 0; x < dim; ++x) {
      const double sign = (std::popcount(x & phase_mask) % 2 == 0) ? 1.0 : -1.0;
      H(static_cast<Eigen::Index>(x ^ flip), static_cast<Eigen::Index>(x)) += base * sign;
    }
  }
  return H;
}

void ReducedPSpinParams::validate() const {
  if (N < 2) throw ValidationError("p-spin N must be >= 2");
  if (p < 2) throw ValidationError("p-spin p must be >= 2");
  if (k != 2) throw ValidationError("p-spin catalyst power k must equal 2");
  if (N + 1 > kMaxReducedSide)
    throw CapacityError("reduced p-spin side " + std::to_string(N + 1) + " exceeds cap " +
                        std::to_string(kMaxReducedSide));
}

namespace detail {

Matrix pspin_reduced_unchecked(const ReducedPSpinParams& params, double s, double b) {
  const int N = params.N;
  const double n = N;
  Matrix H = Matrix::Zero(N + 1, N + 1);
  // 1-based m as in the matrix-element formulas
  for (int m = 1; m <= N + 1; ++m) {
    const double mm = m;
    const double mz = 1.0 - 2.0 * (mm - 1.0) / n;
    H(m - 1, m - 1) = s * (-b * n * std::pow(mz, params.p) +
                           (1.0 - b) * (2.0 * mm - 1.0 - 2.0 * (mm - 1.0) * (mm - 1.0) / n));
  }
  for (int m = 1; m <= N; ++m) {
    const double v = -(1.0 - s) * std::sqrt((n - m + 1.0) * m);
    H(m - 1, m) = v;
    H(m, m - 1) = v;
  }
  for (int m = 1; m <= N - 1; ++m) {
    const double mm = m;
    const double v = s * (1.0 - b) * std::sqrt(mm * (mm + 1.0) * (n - mm + 1.0) * (n - mm)) / n;
    H(m - 1, m + 1) = v;
    H(m + 1, m - 1) = v;
  }
  return H;
}

} // namespace detail

Matrix build_pspin_reduced(const ReducedPSpinParams& params, double s, double b) {
  params.validate();
  require_finite(b, "b");
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("s must lie in [0,1]");
  return detail::pspin_reduced_unchecked(params, s, b);
}

Matrix build_full_pspin(int N, int p, double s, double b, int max_spins) {
  if (N < 1) throw ValidationError("N must be >= 1");
  if (p < 2) throw ValidationError("p must be >= 2");
  if (N > max_spins)
    throw CapacityError("full p-spin N=" + std::to_string(N) + " exceeds cap " +
                        std::to_string(max_spins) + "; use the reduced sector");
  require_finite(s, "s");
  require_finite(b, "b");
  const Eigen::Index dim = Eigen::Index{1} << N;
  const double n = N;

  std::vector<PauliTerm> x_terms;
  for (int i = 0; i < N; ++i) {
    std::string w(static_cast<std::size_t>(N), 'I');
    w[static_cast<std::size_t>(i)] = 'X';
    x_terms.push_back({1.0 / n, w});
  }
  const Matrix Mx = build_pauli_matrix(x_terms, N, max_spins);
  const Matrix Mx2 = Mx * Mx; // k = 2

  Matrix H = s * (1.0 - b) * n * Mx2 - (1.0 - s) * n * Mx;
  for (Eigen::Index x = 0; x < dim; ++x) {
    const double mz = (n - 2.0 * std::popcount(static_cast<std::uint64_t>(x))) / n;
    double mz_pow = 1.0;
    for (int j = 0; j < p; ++j) mz_pow *= mz;
    H(x, x) += -s * b * n * mz_pow;
  }
  return H;
}

std::string to_string(AnalyticKind kind) {
  switch (kind) {
  case AnalyticKind::grover: return "grover";
  case AnalyticKind::degeneracy_enhanced: return "degeneracy_enhanced";
  case AnalyticKind::toy_three_points: return "toy_three_points";
  }
  return "unknown";
}

HamiltonianFamily HamiltonianFamily::from_matrices(Matrix initial, Matrix final_matrix,
                                                   Matrix enhancement) {
  const auto n = initial.rows();
  auto check = [n](const Matrix& M, const char* name) {
    if (M.rows() != n || M.cols() != n)
      throw ValidationError(std::string(name) + " has mismatched dimensions");
    if (!M.allFinite()) throw ValidationError(std::string(name) + " has non-finite entries");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()))
      throw ValidationError(std::string(name) + " is not symmetric");
  };
  if (n < 1) throw ValidationError("empty Hamiltonian");
  check(initial, "initial");
  check(final_matrix, "final");
  check(enhancement, "enhancement");
  return HamiltonianFamily(Affine{std::move(initial), std::move(final_matrix),
                                  std::move(enhancement)});
}

HamiltonianFamily HamiltonianFamily::from_pauli(const PauliModel& model, int max_qubits) {
  if (model.initial.empty() && model.final_terms.empty())
    throw ValidationError("model has neither initial nor final terms");
  return from_matrices(build_pauli_matrix(model.initial, model.n_qubits, max_qubits),
                       build_pauli_matrix(model.final_terms, model.n_qubits, max_qubits),
                       build_pauli_matrix(model.enhancement, model.n_qubits, max_qubits));
}

HamiltonianFamily HamiltonianFamily::grover_effective(int N) {
  if (N < 1) throw ValidationError("Grover N must be >= 1");
  const double a = std::pow(2.0, -0.5 * N);
  const double c = std::sqrt(1.0 - a * a);
  Matrix init(2, 2), fin(2, 2);
  init << c * c, -a * c, -a * c, a * a;
  fin << 0.0, 0.0, 0.0, 1.0;
  return from_matrices(init, fin, Matrix::Zero(2, 2));
}

HamiltonianFamily HamiltonianFamily::pspin(const ReducedPSpinParams& params) {
  params.validate();
  return HamiltonianFamily(PSpin{params});
}

HamiltonianFamily HamiltonianFamily::analytic(AnalyticKind kind, const AnalyticParams& params) {
  analytic_roots(kind, params, 0.5, 0.0); // validates parameters
  return HamiltonianFamily(Analytic{kind, params});
}

HamiltonianFamily::Kind HamiltonianFamily::kind() const {
  switch (model_.index()) {
  case 0: return Kind::pauli_interpolation;
  case 1: return Kind::pspin_reduced;
  default: return Kind::analytic_surface;
  }
}

int HamiltonianFamily::dimension() const {
  if (const auto* a = std::get_if<Affine>(&model_)) return static_cast<int>(a->initial.rows());
  if (const auto* p = std::get_if<PSpin>(&model_)) return p->params.N + 1;
  const auto& an = std::get<Analytic>(model_);
  return an.kind == AnalyticKind::degeneracy_enhanced ? 3 : 2;
}

bool HamiltonianFamily::depends_on_b() const {
  if (const auto* a = std::get_if<Affine>(&model_)) return a->enhancement.cwiseAbs().maxCoeff() > 0.0;
  if (std::holds_alternative<PSpin>(model_)) return true;
  return std::get<Analytic>(model_).kind == AnalyticKind::degeneracy_enhanced;
}

Matrix HamiltonianFamily::evaluate(double s, double b) const {
  require_finite(s, "s");
  require_finite(b, "b");
  if (const auto* a = std::get_if<Affine>(&model_))
    return (1.0 - s) * a->initial + s * a->final_matrix + b * a->enhancement;
  if (const auto* p = std::get_if<PSpin>(&model_))
    return detail::pspin_reduced_unchecked(p->params, s, b);
  const auto& an = std::get<Analytic>(model_);
  const auto r = analytic_roots(an.kind, an.params, s, b);
  Matrix D = Matrix::Zero(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = r[i];
  return D;
}

const ReducedPSpinParams* HamiltonianFamily::pspin_params() const {
  const auto* p = std::get_if<PSpin>(&model_);
  return p ? &p->params : nullptr;
}

const AnalyticKind* HamiltonianFamily::analytic_kind() const {
  const auto* a = std::get_if<Analytic>(&model_);
  return a ? &a->kind : nullptr;
}

const AnalyticParams* HamiltonianFamily::analytic_params() const {
  const auto* a = std::get_if<Analytic>(&model_);
  return a ? &a->params : nullptr;
}

} // namespace morsegap
