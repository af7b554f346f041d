#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sympflow/io.hpp"
#include "sympflow/linalg.hpp"

namespace sympflow {

/// N_k(lambda) with Re(lambda) > 0.
struct RBlock {
  cd lambda;
  int size = 1;
};

/// N_k(i alpha) coupled through beta * e_k e_k^H.
struct EBlock {
  double alpha = 0.0;
  int beta = 1;
  int size = 1;
};

/// Odd-sized block built from N_m(i eta) and N_n(i eta) plus a coupling row.
struct CBlock {
  double eta = 0.0;
  int beta = 1;
  int m = 1;
  int n = 1;
};

/// Like CBlock but with distinct frequencies gamma (first part, size s) and
/// delta (second part, size t).
struct DBlock {
  double gamma = 0.0;
  double delta = 1.0;
  int beta = 1;
  int s = 1;
  int t = 1;
};

enum class BlockKind { kR, kE, kC, kD };

/// Location of one block inside the half-dimension index range [0, n).
struct BlockRange {
  BlockKind kind;
  int index;   // position within its kind's list
  int offset;  // first row/column in the upper-left n x n quadrant
  int size;
};

/// Symbolic canonical form. Blocks are laid out kind by kind (r, e, c, d) and
/// in list order within each kind.
struct JordanSpec {
  std::vector<RBlock> r;
  std::vector<EBlock> e;
  std::vector<CBlock> c;
  std::vector<DBlock> d;

  /// Half dimension n, so the canonical form is 2n x 2n.
  int half_dim() const;
  /// Throws SpecError when an invariant is violated.
  void Validate() const;
  /// Row/column ranges in build order.
  std::vector<BlockRange> index_map() const;
  int num_cd() const { return static_cast<int>(c.size() + d.size()); }
  bool empty() const { return r.empty() && e.empty() && c.empty() && d.empty(); }
};

json spec_to_json(const JordanSpec& spec);
JordanSpec spec_from_json(const json& j);

/// Seeded random spec with at most `max_blocks` blocks of size at most
/// `max_size` and half dimension at most `max_half_dim`.
JordanSpec random_spec(std::uint64_t seed, int max_blocks = 3,
                       int max_size = 4, int max_half_dim = 10);

/// Assembles the 2n x 2n canonical form.
Mat build_J(const JordanSpec& spec);

/// Closed-form exponential e^{J t}.
Mat exp_J(const JordanSpec& spec, double t);

/// Closed-form building blocks of the exponentials of nilpotent Jordan blocks.
struct ExpStencil {
  Eigen::MatrixXd Phi;       // e^{N_k t}
  Eigen::MatrixXd PhiHat;    // P^{-1} Phi P
  Eigen::VectorXd phi;       // [t^k/k!, ..., t]
  Eigen::VectorXd psi;       // [t, ..., t^k/k!]
  Eigen::MatrixXd GammaHat;  // Gamma_k^{2k-1} P
  Eigen::MatrixXd P;         // signed anti-diagonal
};

ExpStencil stencil(int k, double t);

/// Nilpotent Jordan block of size k (ones on the superdiagonal).
Eigen::MatrixXd nilpotent(int k);
/// Signed anti-diagonal with (i, k+1-i) entry (-1)^i, 1-based.
Eigen::MatrixXd signed_antidiag(int k);
/// e^{N_k t}.
Eigen::MatrixXd Phi_k(int k, double t);
/// Square Toeplitz matrix with (i, j) entry t^{k1-i+j}/(k1-i+j)! (1-based;
/// zero for negative powers), of size k2-k1+1.
Eigen::MatrixXd Gamma_k(int k1, int k2, double t);
Eigen::VectorXd phi_k(int k, double t);
Eigen::VectorXd psi_k(int k, double t);

/// Closed form: 0 for even n, 2 for odd n.
double kappa(int n);
/// psi_n^H P_n (Gamma_{n+1}^{2n} P_n)^{-1} phi_n evaluated numerically.
double kappa_numeric(int n, double t);

/// Closed-form determinant of the k1..k2 reciprocal-factorial Toeplitz matrix.
double digamma_det(int k1, int k2);
/// det of digamma_matrix(k1, k2) by exact rational elimination, rounded once.
double digamma_det_exact(int k1, int k2);
/// The matrix itself, entries 1/(k1-i+j)! (1-based).
Eigen::MatrixXd digamma_matrix(int k1, int k2);

/// n! in floating point; SpecError for n > 20 or n < 0.
double factorial(int n);

}  // namespace sympflow
