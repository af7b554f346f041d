#pragma once

#include <string>

#include "sympflow/io.hpp"
#include "sympflow/linalg.hpp"

namespace sympflow {

/// The class of pairs ([[X12, 0], [X22, I]] S2, [[I, X11], [0, X21]] S1)
/// generated by two symplectic matrices.
struct PairClass {
  Mat S1;
  Mat S2;

  /// (I, I): the pairs produced by the DARE doubling iteration.
  static PairClass Identity(int n);
  /// (-I, J): the pairs produced by the NME doubling iteration.
  static PairClass NmeClass(int n);

  int half_dim() const { return static_cast<int>(S1.rows() / 2); }
  bool is_identity_class() const;
  bool is_nme_class() const;
  /// Throws DimensionError/UsageError when S1, S2 are not symplectic or sizes
  /// disagree.
  void Validate(const Tolerances& tol = {}) const;
};

/// The Hermitian matrix [[X11, X12], [X21, X22]] in 2 x 2 block form.
struct HermitianBlock {
  Mat X11, X12, X21, X22;

  int half_dim() const { return static_cast<int>(X11.rows()); }
  Mat assembled() const;
  static HermitianBlock FromMatrix(const Mat& X);
  /// Throws DimensionError on inconsistent block sizes.
  void Validate() const;
};

struct SymplecticPair {
  Mat M;
  Mat L;

  int half_dim() const { return static_cast<int>(M.rows() / 2); }
  /// Relative residual |M J M^H - L J L^H| / max(1, |M|^2 + |L|^2).
  double symplectic_residual() const;
};

enum class IndexClass { kZero, kOne, kTooHigh };

struct Classification {
  bool regular = false;
  IndexClass ind_inf = IndexClass::kTooHigh;
};

/// Deflating subspaces of a regular pair of index at most one.
struct EigenSplit {
  Mat U1;    // 2n x 2nhat, finite nonzero eigenvalues, U1^H J U1 = J_nhat
  Mat U0;    // 2n x ell, kernel of M
  Mat Uinf;  // 2n x ell, kernel of L, scaled so U0^H J Uinf = I
  Mat Shat;  // 2nhat x 2nhat, M U1 = L U1 Shat
  int nhat = 0;
  int ell = 0;
  double shat_residual = 0.0;

  /// [U1, U0, Uinf].
  Mat U() const;
  /// (J_nhat + J_ell)^H U^H J, the inverse of U().
  Mat U_inverse() const;
};

/// H with M Pi0 = L PiInf e^H.
struct FlowGenerator {
  Mat H;
  Mat Hhat;
  Mat Pi0;
  Mat PiInf;
};

SymplecticPair to_pair(const HermitianBlock& X, const PairClass& cls);
HermitianBlock from_pair(const SymplecticPair& pair, const PairClass& cls,
                         const Tolerances& tol = {});
Classification classify(const SymplecticPair& pair, const Tolerances& tol = {});
EigenSplit eigen_split(const SymplecticPair& pair, const Tolerances& tol = {});
FlowGenerator build_generator(const SymplecticPair& pair,
                              const EigenSplit& split,
                              const Tolerances& tol = {});
SymplecticPair perturb(const SymplecticPair& pair, const EigenSplit& split,
                       double eps);

/// Block-diagonal J_a + J_b with the convention J_0 = empty.
Mat make_J_sum(int a, int b);

// JSON: {"class": {"S1":..., "S2":...}, "X": {"X11":..., ...}} or a preset
// name "identity" / "nme" for "class"; pairs as {"M":..., "L":...}.
PairClass class_from_json(const json& j, int n);
json class_to_json(const PairClass& cls);
HermitianBlock block_from_json(const json& j);
json block_to_json(const HermitianBlock& X);
SymplecticPair pair_from_json(const json& j);
json pair_to_json(const SymplecticPair& p);

std::string to_string(IndexClass c);

}  // namespace sympflow
