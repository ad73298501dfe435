#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace morsegap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxPauliQubits = 14;
inline constexpr int kMaxFullPSpinSpins = 10;
inline constexpr int kMaxReducedSide = 1025;

struct PauliTerm {
  double coefficient = 0.0;
  std::string word;
};

// Dense sum of tensor products. Odd-Y words are rejected (they are imaginary).
Matrix build_pauli_matrix(const std::vector<PauliTerm>& terms, int n_qubits,
                          int max_qubits = kMaxPauliQubits);

struct ReducedPSpinParams {
  int N = 7;
  int p = 5;
  int k = 2; // catalyst power; the printed band structure only allows 2

  void validate() const;
};

// Maximum-spin sector, side N+1, pentadiagonal. Requires s in [0,1].
Matrix build_pspin_reduced(const ReducedPSpinParams& params, double s, double b);

// Full 2^N space by explicit matrix powers of the collective magnetizations.
Matrix build_full_pspin(int N, int p, double s, double b,
                        int max_spins = kMaxFullPSpinSpins);

enum class AnalyticKind { grover, degeneracy_enhanced, toy_three_points };

struct AnalyticParams {
  int N = 5;
  double eps = 0.1;
  double a_minus = 0.5; // a_{-1}
  double a_zero = 1.0;
  double a_plus = 0.5; // a_{+1}
};

std::string to_string(AnalyticKind kind);

struct PauliModel {
  int n_qubits = 0;
  std::vector<PauliTerm> initial;
  std::vector<PauliTerm> final_terms;
  std::vector<PauliTerm> enhancement;
};

class MorseSurface;

// Closed-form surfaces. b only matters for degeneracy_enhanced.
std::shared_ptr<const MorseSurface> analytic_surface(AnalyticKind kind,
                                                     const AnalyticParams& params,
                                                     double b = 0.0);

// Sorted roots of an analytic surface at s; these play the role of eigenvalues.
std::vector<double> analytic_roots(AnalyticKind kind, const AnalyticParams& params,
                                   double s, double b);

class HamiltonianFamily {
public:
  enum class Kind { pauli_interpolation, pspin_reduced, analytic_surface };

  // H(s,b) = (1-s) initial + s final + b enhancement
  static HamiltonianFamily from_matrices(Matrix initial, Matrix final_matrix,
                                         Matrix enhancement);
  static HamiltonianFamily from_pauli(const PauliModel& model,
                                      int max_qubits = kMaxPauliQubits);
  // 2x2 effective Grover model on span{|marked>, |rest>}
  static HamiltonianFamily grover_effective(int N);
  static HamiltonianFamily pspin(const ReducedPSpinParams& params);
  static HamiltonianFamily analytic(AnalyticKind kind, const AnalyticParams& params);

  Kind kind() const;
  int dimension() const;
  bool depends_on_b() const;

  // Symmetric matrix for any finite s; entries are polynomial in s so the
  // finite-difference stencils may step slightly past [0,1].
  Matrix evaluate(double s, double b) const;

  const ReducedPSpinParams* pspin_params() const;
  const AnalyticKind* analytic_kind() const;
  const AnalyticParams* analytic_params() const;

private:
  struct Affine {
    Matrix initial, final_matrix, enhancement;
  };
  struct PSpin {
    ReducedPSpinParams params;
  };
  struct Analytic {
    AnalyticKind kind;
    AnalyticParams params;
  };
  using Model = std::variant<Affine, PSpin, Analytic>;

  explicit HamiltonianFamily(Model model) : model_(std::move(model)) {}
  Model model_;
};

namespace detail {
Matrix pspin_reduced_unchecked(const ReducedPSpinParams& params, double s, double b);
}

} // namespace morsegap
