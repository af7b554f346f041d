#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace sympflow {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cd kI{0.0, 1.0};

/// Thresholds shared by the structural predicates and rank decisions.
struct Tolerances {
  /// Relative residual bound used by the is_* predicates.
  double structural_tol = 1e-8;
  /// Singular values below rank_tol * sigma_max count as zero.
  double rank_tol = 1e-10;
  /// Generalized eigenvalues with |alpha/beta| below this count as zero.
  double eig_zero_tol = 1e-8;
  /// Generalized eigenvalues with |alpha/beta| above this count as infinite.
  double eig_inf_tol = 1e8;

  /// Throws UsageError when a field is non-positive or rank_tol exceeds
  /// structural_tol.
  void Validate() const;
};

/// Returns [[0, I_n], [-I_n, 0]].
Mat make_J(int n);

bool is_hermitian(const Mat& A, const Tolerances& tol = {});
bool is_symplectic(const Mat& S, const Tolerances& tol = {});
bool is_hamiltonian(const Mat& H, const Tolerances& tol = {});

/// Matrix exponential by Pade scaling and squaring.
Mat mat_exp(const Mat& A);

/// Matrix logarithm with an automatically rotated branch cut. When the input
/// is symplectic the result is projected onto the Hamiltonian matrices.
Mat mat_log(const Mat& A, const Tolerances& tol = {});

/// Smallest singular value; zero for an empty matrix.
double smallest_singular(const Mat& A);

/// Largest singular value; zero for an empty matrix.
double largest_singular(const Mat& A);

enum class InstanceKind { kHermitian, kHamiltonian, kSymplectic };

/// Seeded random test matrix. Hermitian instances are n x n, the other two
/// kinds are 2n x 2n.
Mat random_instance(InstanceKind kind, int n, std::uint64_t seed);

/// Entries with independent standard normal real and imaginary parts.
Mat random_complex(int rows, int cols, std::uint64_t seed);

InstanceKind parse_instance_kind(const std::string& name);

// Small helpers used throughout.

/// (A + A^H) / 2.
Mat hermitian_part(const Mat& A);

/// Projection (L + J L^H J) / 2 onto the Hamiltonian matrices.
Mat hamiltonian_part(const Mat& L);

/// Solves A X = B, throwing SingularityError when A is numerically singular
/// relative to rank_tol.
Mat solve_checked(const Mat& A, const Mat& B, double rank_tol,
                  const char* what);

/// Inverse with the same singularity check.
Mat inverse_checked(const Mat& A, double rank_tol, const char* what);

/// Orthonormal basis of the null space of A (columns), using rank_tol
/// relative to the largest singular value.
Mat null_space(const Mat& A, double rank_tol);

/// Numerical rank relative to the largest singular value.
int numerical_rank(const Mat& A, double rank_tol);

/// Block diagonal direct sum.
Mat direct_sum(const Mat& A, const Mat& B);

}  // namespace sympflow
