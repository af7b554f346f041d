#include "sympflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "sympflow/errors.hpp"

namespace sympflow {
namespace {

void RequireSquare(const Mat& A, const char* who) {
  if (A.rows() != A.cols()) {
    throw DimensionError(std::string(who) + ": matrix is " +
                         std::to_string(A.rows()) + "x" +
                         std::to_string(A.cols()) + ", expected square");
  }
}

void RequireEvenSquare(const Mat& A, const char* who) {
  RequireSquare(A, who);
  if (A.rows() % 2 != 0) {
    throw DimensionError(std::string(who) + ": odd dimension " +
                         std::to_string(A.rows()));
  }
}

bool AllFinite(const Mat& A) {
  return A.real().allFinite() && A.imag().allFinite();
}

// Angular distance between two angles in (-pi, pi].
double AngleGap(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace

void Tolerances::Validate() const {
  if (!(structural_tol > 0 && rank_tol > 0 && eig_zero_tol > 0 &&
        eig_inf_tol > 0)) {
    throw UsageError("Tolerances: all thresholds must be positive");
  }
  if (rank_tol > structural_tol) {
    throw UsageError("Tolerances: rank_tol must not exceed structural_tol");
  }
}

Mat make_J(int n) {
  if (n < 1) throw DimensionError("make_J: n must be at least 1");
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

bool is_hermitian(const Mat& A, const Tolerances& tol) {
  RequireSquare(A, "is_hermitian");
  const double res = (A - A.adjoint()).norm();
  return res <= tol.structural_tol * std::max(1.0, A.norm());
}

bool is_symplectic(const Mat& S, const Tolerances& tol) {
  RequireEvenSquare(S, "is_symplectic");
  if (S.rows() == 0) return true;
  const Mat J = make_J(static_cast<int>(S.rows() / 2));
  const double res = (S * J * S.adjoint() - J).norm();
  return res <= tol.structural_tol * std::max(1.0, S.squaredNorm());
}

bool is_hamiltonian(const Mat& H, const Tolerances& tol) {
  RequireEvenSquare(H, "is_hamiltonian");
  if (H.rows() == 0) return true;
  return is_hermitian(H * make_J(static_cast<int>(H.rows() / 2)), tol);
}

Mat mat_exp(const Mat& A) {
  RequireSquare(A, "mat_exp");
  if (A.rows() == 0) return A;
  if (!AllFinite(A)) throw OverflowError("mat_exp: non-finite input");
  Mat E = A.exp();
  if (!AllFinite(E)) {
    throw OverflowError("mat_exp: result overflowed (norm of input " +
                        std::to_string(A.norm()) + ")");
  }
  return E;
}

Mat mat_log(const Mat& A, const Tolerances& tol) {
  RequireSquare(A, "mat_log");
  const Eigen::Index n = A.rows();
  if (n == 0) return A;
  if (!AllFinite(A)) throw SingularityError("mat_log: non-finite input");

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  if (sv(n - 1) <= tol.rank_tol * sv(0)) {
    throw SingularityError("mat_log: matrix is singular (sigma_min/sigma_max = " +
                           std::to_string(sv(n - 1) / sv(0)) + ")");
  }

  // Place the cut in the widest angular gap of the spectrum whenever an
  // eigenvalue comes close to the default ray arg = pi.
  const Vec lambda = Eigen::ComplexEigenSolver<Mat>(A, false).eigenvalues();
  constexpr double kPi = std::numbers::pi;
  constexpr double kCutClearance = 1e-6;
  std::vector<double> args;
  args.reserve(n);
  double closest = kPi;
  for (Eigen::Index i = 0; i < n; ++i) {
    args.push_back(std::arg(lambda(i)));
    closest = std::min(closest, AngleGap(args.back(), kPi));
  }
  double psi = 0.0;
  if (closest <= kCutClearance) {
    std::sort(args.begin(), args.end());
    double best_gap = args.front() + 2 * kPi - args.back();
    double cut = args.back() + 0.5 * best_gap;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const double gap = args[i] - args[i - 1];
      if (gap > best_gap) {
        best_gap = gap;
        cut = args[i - 1] + 0.5 * gap;
      }
    }
    if (0.5 * best_gap <= kCutClearance) {
      throw BranchCutError(
          "mat_log: spectrum leaves no room for a branch cut");
    }
    psi = cut - kPi;
  }

  Mat L;
  if (psi == 0.0) {
    L = A.log();
  } else {
    const Mat rotated = std::exp(cd(0.0, -psi)) * A;
    L = rotated.log();
    L.diagonal().array() += cd(0.0, psi);
  }
  if (!AllFinite(L)) throw BranchCutError("mat_log: non-finite logarithm");
  if (n % 2 == 0 && is_symplectic(A, tol)) L = hamiltonian_part(L);
  return L;
}

double smallest_singular(const Mat& A) {
  if (A.size() == 0) return 0.0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  return sv(sv.size() - 1);
}

double largest_singular(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(A).singularValues()(0);
}

Mat random_complex(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat B(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      B(i, j) = cd(re, im);
    }
  }
  return B;
}

Mat random_instance(InstanceKind kind, int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_instance: n must be at least 1");
  switch (kind) {
    case InstanceKind::kHermitian:
      return hermitian_part(random_complex(n, n, seed));
    case InstanceKind::kHamiltonian:
      return hamiltonian_part(random_complex(2 * n, 2 * n, seed));
    case InstanceKind::kSymplectic: {
      // Keep the generator modest so the result stays well conditioned.
      const Mat H = hamiltonian_part(random_complex(2 * n, 2 * n, seed));
      return mat_exp(H * (0.5 / std::sqrt(2.0 * n)));
    }
  }
  throw UsageError("random_instance: unknown kind");
}

InstanceKind parse_instance_kind(const std::string& name) {
  if (name == "hermitian") return InstanceKind::kHermitian;
  if (name == "hamiltonian") return InstanceKind::kHamiltonian;
  if (name == "symplectic") return InstanceKind::kSymplectic;
  throw UsageError("unknown instance kind '" + name + "'");
}

Mat hermitian_part(const Mat& A) { return 0.5 * (A + A.adjoint()); }

Mat hamiltonian_part(const Mat& L) {
  RequireEvenSquare(L, "hamiltonian_part");
  if (L.rows() == 0) return L;
  const Mat J = make_J(static_cast<int>(L.rows() / 2));
  return 0.5 * (L + J * L.adjoint() * J);
}

Mat solve_checked(const Mat& A, const Mat& B, double rank_tol,
                  const char* what) {
  RequireSquare(A, what);
  if (A.rows() == 0) return Mat(0, B.cols());
  const double smax = largest_singular(A);
  const double smin = smallest_singular(A);
  if (!(smin > rank_tol * smax)) {
    throw SingularityError(std::string(what) +
                           ": matrix is numerically singular (sigma_min = " +
                           std::to_string(smin) + ")");
  }
  return A.partialPivLu().solve(B);
}

Mat inverse_checked(const Mat& A, double rank_tol, const char* what) {
  return solve_checked(A, Mat::Identity(A.rows(), A.rows()), rank_tol, what);
}

Mat null_space(const Mat& A, double rank_tol) {
  const Eigen::Index cols = A.cols();
  if (A.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

int numerical_rank(const Mat& A, double rank_tol) {
  if (A.size() == 0) return 0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rank_tol * sv(0)) ++rank;
  }
  return rank;
}

Mat direct_sum(const Mat& A, const Mat& B) {
  Mat C = Mat::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  C.topLeftCorner(A.rows(), A.cols()) = A;
  C.bottomRightCorner(B.rows(), B.cols()) = B;
  return C;
}

}  // namespace sympflow
