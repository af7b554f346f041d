#include "sympflow/pairs.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "sympflow/errors.hpp"

namespace sympflow {
namespace {

// Probe points for the regularity test; fixed so results are reproducible.
std::vector<cd> ProbePoints() {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<cd> points;
  for (int i = 0; i < 5; ++i) points.emplace_back(unit(rng), unit(rng));
  return points;
}

void RequirePairShape(const SymplecticPair& p, const char* who) {
  if (p.M.rows() != p.M.cols() || p.L.rows() != p.L.cols() ||
      p.M.rows() != p.L.rows() || p.M.rows() % 2 != 0 || p.M.rows() == 0) {
    throw DimensionError(std::string(who) +
                         ": pair matrices must be equal, square and of even "
                         "positive dimension");
  }
}

}  // namespace

PairClass PairClass::Identity(int n) {
  return {Mat::Identity(2 * n, 2 * n), Mat::Identity(2 * n, 2 * n)};
}

PairClass PairClass::NmeClass(int n) {
  return {-Mat::Identity(2 * n, 2 * n), make_J(n)};
}

bool PairClass::is_identity_class() const {
  const Mat I = Mat::Identity(S1.rows(), S1.rows());
  return S1 == I && S2 == I;
}

bool PairClass::is_nme_class() const {
  if (S1.rows() == 0 || S1.rows() % 2 != 0) return false;
  const Mat I = Mat::Identity(S1.rows(), S1.rows());
  return S1 == -I && S2 == make_J(half_dim());
}

void PairClass::Validate(const Tolerances& tol) const {
  if (S1.rows() != S2.rows() || S1.rows() == 0) {
    throw DimensionError("PairClass: S1 and S2 must have equal positive size");
  }
  if (!is_symplectic(S1, tol) || !is_symplectic(S2, tol)) {
    throw UsageError("PairClass: S1 and S2 must be symplectic");
  }
}

Mat HermitianBlock::assembled() const {
  Validate();
  const int n = half_dim();
  Mat X(2 * n, 2 * n);
  X << X11, X12, X21, X22;
  return X;
}

HermitianBlock HermitianBlock::FromMatrix(const Mat& X) {
  if (X.rows() != X.cols() || X.rows() % 2 != 0) {
    throw DimensionError("HermitianBlock: need an even square matrix");
  }
  const Eigen::Index n = X.rows() / 2;
  return {X.topLeftCorner(n, n), X.topRightCorner(n, n),
          X.bottomLeftCorner(n, n), X.bottomRightCorner(n, n)};
}

void HermitianBlock::Validate() const {
  const Eigen::Index n = X11.rows();
  for (const Mat* B : {&X11, &X12, &X21, &X22}) {
    if (B->rows() != n || B->cols() != n) {
      throw DimensionError("HermitianBlock: blocks must all be n x n");
    }
  }
}

double SymplecticPair::symplectic_residual() const {
  const Mat J = make_J(half_dim());
  const double scale = std::max(1.0, M.squaredNorm() + L.squaredNorm());
  return (M * J * M.adjoint() - L * J * L.adjoint()).norm() / scale;
}

Mat EigenSplit::U() const {
  Mat out(U1.rows(), U1.cols() + U0.cols() + Uinf.cols());
  out << U1, U0, Uinf;
  return out;
}

Mat EigenSplit::U_inverse() const {
  const Mat Ub = U();
  return make_J_sum(nhat, ell).adjoint() * Ub.adjoint() *
         make_J(static_cast<int>(Ub.rows() / 2));
}

Mat make_J_sum(int a, int b) {
  Mat Ja = a > 0 ? make_J(a) : Mat(0, 0);
  Mat Jb = b > 0 ? make_J(b) : Mat(0, 0);
  return direct_sum(Ja, Jb);
}

SymplecticPair to_pair(const HermitianBlock& X, const PairClass& cls) {
  X.Validate();
  const int n = X.half_dim();
  if (cls.S1.rows() != 2 * n || cls.S2.rows() != 2 * n) {
    throw DimensionError("to_pair: class and block sizes disagree");
  }
  Mat left_M = Mat::Zero(2 * n, 2 * n);
  left_M.topLeftCorner(n, n) = X.X12;
  left_M.bottomLeftCorner(n, n) = X.X22;
  left_M.bottomRightCorner(n, n).setIdentity();
  Mat left_L = Mat::Zero(2 * n, 2 * n);
  left_L.topLeftCorner(n, n).setIdentity();
  left_L.topRightCorner(n, n) = X.X11;
  left_L.bottomRightCorner(n, n) = X.X21;
  return {left_M * cls.S2, left_L * cls.S1};
}

HermitianBlock from_pair(const SymplecticPair& pair, const PairClass& cls,
                         const Tolerances& tol) {
  RequirePairShape(pair, "from_pair");
  const int n = pair.half_dim();
  if (cls.S1.rows() != 2 * n) {
    throw DimensionError("from_pair: class and pair sizes disagree");
  }
  const Mat LS = pair.L * cls.S1.inverse();
  const Mat MS = pair.M * cls.S2.inverse();
  Mat R_inv(2 * n, 2 * n);
  R_inv << LS.leftCols(n), MS.rightCols(n);
  Mat R;
  try {
    R = inverse_checked(R_inv, tol.rank_tol, "from_pair");
  } catch (const SingularityError&) {
    throw NotInClassError(
        "from_pair: pair cannot be normalized within this class");
  }
  const Mat ML = R * MS;
  const Mat LL = R * LS;
  HermitianBlock X;
  X.X12 = ML.topLeftCorner(n, n);
  X.X22 = hermitian_part(ML.bottomLeftCorner(n, n));
  X.X11 = hermitian_part(LL.topRightCorner(n, n));
  X.X21 = LL.bottomRightCorner(n, n);
  X.X12 = 0.5 * (X.X12 + X.X21.adjoint());
  X.X21 = X.X12.adjoint();
  return X;
}

Classification classify(const SymplecticPair& pair, const Tolerances& tol) {
  RequirePairShape(pair, "classify");
  const double scale = pair.M.norm() + pair.L.norm();
  Classification out;
  cd best_sigma = 0.0;
  double best_ratio = 0.0;
  for (cd lambda : ProbePoints()) {
    const double ratio =
        smallest_singular(pair.M - lambda * pair.L) / std::max(scale, 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_sigma = lambda;
    }
  }
  out.regular = best_ratio > tol.rank_tol;
  if (!out.regular) return out;

  const int dim = static_cast<int>(pair.L.rows());
  if (numerical_rank(pair.L, tol.rank_tol) == dim) {
    out.ind_inf = IndexClass::kZero;
    return out;
  }
  // Infinite eigenvalues of (M, L) are the zero eigenvalues of B; index one
  // means that zero eigenvalue is semisimple.
  const Mat B = (pair.M - best_sigma * pair.L).partialPivLu().solve(pair.L);
  const int rank_B = numerical_rank(B, tol.structural_tol);
  const int rank_B2 = numerical_rank(B * B, tol.structural_tol);
  out.ind_inf = rank_B == rank_B2 ? IndexClass::kOne : IndexClass::kTooHigh;
  return out;
}

EigenSplit eigen_split(const SymplecticPair& pair, const Tolerances& tol) {
  const Classification cls = classify(pair, tol);
  if (!cls.regular) throw NotRegularError("eigen_split: pair is not regular");
  if (cls.ind_inf == IndexClass::kTooHigh) {
    throw IndexTooHighError("eigen_split: index at infinity exceeds one");
  }
  const int n = pair.half_dim();
  const Mat J = make_J(n);

  EigenSplit split;
  split.U0 = null_space(pair.M, tol.rank_tol);
  split.Uinf = null_space(pair.L, tol.rank_tol);
  if (split.U0.cols() != split.Uinf.cols()) {
    throw NumericalBreakdown("eigen_split: dim ker M != dim ker L");
  }
  split.ell = static_cast<int>(split.U0.cols());
  split.nhat = n - split.ell;

  if (split.ell > 0) {
    const Mat K2 = split.U0.adjoint() * J * split.Uinf;
    try {
      split.Uinf = split.Uinf * inverse_checked(K2, tol.rank_tol, "K2");
    } catch (const SingularityError&) {
      throw NumericalBreakdown("eigen_split: U0^H J Uinf is singular");
    }
  }

  Mat basis(2 * n, 2 * split.ell);
  basis << split.U0, split.Uinf;
  const Mat U1 = split.ell > 0 ? null_space(basis.adjoint() * J, tol.rank_tol)
                               : Mat(Mat::Identity(2 * n, 2 * n));
  if (U1.cols() != 2 * split.nhat) {
    throw NumericalBreakdown("eigen_split: complement has wrong dimension");
  }

  if (split.nhat > 0) {
    // Congruence normalization W^H K1 W = J_nhat through the Hermitian
    // matrix i K1, whose inertia must be (nhat, nhat).
    const int m = split.nhat;
    const Mat K1 = U1.adjoint() * J * U1;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(kI * K1));
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const double emax = ev.cwiseAbs().maxCoeff();
    int positive = 0;
    for (int i = 0; i < 2 * m; ++i) {
      if (std::abs(ev(i)) <= tol.rank_tol * emax) {
        throw NumericalBreakdown("eigen_split: U1^H J U1 is singular");
      }
      if (ev(i) > 0) ++positive;
    }
    if (positive != m) {
      throw NumericalBreakdown("eigen_split: i U1^H J U1 has wrong inertia");
    }
    // Positive eigenvalues first, each group in index order.
    Mat F(2 * m, 2 * m);
    for (int j = 0; j < m; ++j) {
      F.col(j) = es.eigenvectors().col(m + j) / std::sqrt(ev(m + j));
      F.col(m + j) = es.eigenvectors().col(j) / std::sqrt(-ev(j));
    }
    Mat Q(2 * m, 2 * m);
    const Mat Im = Mat::Identity(m, m);
    Q << Im, Im, -kI * Im, kI * Im;
    Q /= std::sqrt(2.0);
    split.U1 = U1 * F * Q.adjoint();

    const Mat LU = pair.L * split.U1;
    const Mat MU = pair.M * split.U1;
    split.Shat = (LU.adjoint() * LU).ldlt().solve(LU.adjoint() * MU);
    split.shat_residual = (MU - LU * split.Shat).norm() /
                          std::max(1.0, MU.norm());
  } else {
    split.U1 = Mat(2 * n, 0);
    split.Shat = Mat(0, 0);
  }
  return split;
}

FlowGenerator build_generator(const SymplecticPair& pair,
                              const EigenSplit& split, const Tolerances& tol) {
  RequirePairShape(pair, "build_generator");
  const int n = pair.half_dim();
  const int m = split.nhat;
  const int ell = split.ell;
  const Mat U = split.U();
  const Mat U_inv = split.U_inverse();

  FlowGenerator gen;
  gen.Hhat = m > 0 ? mat_log(split.Shat, tol) : Mat(0, 0);
  if (m > 0) gen.Hhat = hamiltonian_part(gen.Hhat);

  Mat core = Mat::Zero(2 * n, 2 * n);
  core.topLeftCorner(2 * m, 2 * m) = gen.Hhat;
  gen.H = hamiltonian_part(U * core * U_inv);

  Mat p0 = Mat::Zero(2 * n, 2 * n);
  Mat pinf = Mat::Zero(2 * n, 2 * n);
  p0.topLeftCorner(2 * m + ell, 2 * m + ell).setIdentity();
  pinf.topLeftCorner(2 * m, 2 * m).setIdentity();
  pinf.bottomRightCorner(ell, ell).setIdentity();
  gen.Pi0 = U * p0 * U_inv;
  gen.PiInf = U * pinf * U_inv;
  return gen;
}

SymplecticPair perturb(const SymplecticPair& pair, const EigenSplit& split,
                       double eps) {
  RequirePairShape(pair, "perturb");
  if (split.ell == 0 || eps == 0.0) return pair;
  const Mat J = make_J(pair.half_dim());
  // Phi = eps * I, so Phi^H = Phi.
  const Mat coupling = split.U0 * split.Uinf.adjoint();
  SymplecticPair out = pair;
  out.M -= eps * pair.L * coupling * J;
  out.L += eps * pair.M * split.Uinf * split.U0.adjoint() * J;
  return out;
}

PairClass class_from_json(const json& j, int n) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "identity" || name == "S1") return PairClass::Identity(n);
    if (name == "nme" || name == "S2") return PairClass::NmeClass(n);
    throw UsageError("unknown pair class preset '" + name + "'");
  }
  PairClass cls{matrix_from_json(j.at("S1")), matrix_from_json(j.at("S2"))};
  cls.Validate();
  return cls;
}

json class_to_json(const PairClass& cls) {
  return {{"S1", matrix_to_json(cls.S1)}, {"S2", matrix_to_json(cls.S2)}};
}

HermitianBlock block_from_json(const json& j) {
  HermitianBlock X;
  try {
    X.X11 = matrix_from_json(j.at("X11"));
    X.X12 = matrix_from_json(j.at("X12"));
    X.X21 = j.contains("X21") ? matrix_from_json(j.at("X21"))
                              : Mat(X.X12.adjoint());
    X.X22 = matrix_from_json(j.at("X22"));
  } catch (const json::exception& e) {
    throw UsageError(std::string("HermitianBlock JSON: ") + e.what());
  }
  X.Validate();
  if (!is_hermitian(X.assembled())) {
    throw UsageError("HermitianBlock JSON: assembled X is not Hermitian");
  }
  return X;
}

json block_to_json(const HermitianBlock& X) {
  return {{"X11", matrix_to_json(X.X11)},
          {"X12", matrix_to_json(X.X12)},
          {"X21", matrix_to_json(X.X21)},
          {"X22", matrix_to_json(X.X22)}};
}

SymplecticPair pair_from_json(const json& j) {
  try {
    return {matrix_from_json(j.at("M")), matrix_from_json(j.at("L"))};
  } catch (const json::exception& e) {
    throw UsageError(std::string("pair JSON: ") + e.what());
  }
}

json pair_to_json(const SymplecticPair& p) {
  return {{"M", matrix_to_json(p.M)}, {"L", matrix_to_json(p.L)}};
}

std::string to_string(IndexClass c) {
  switch (c) {
    case IndexClass::kZero:
      return "0";
    case IndexClass::kOne:
      return "1";
    case IndexClass::kTooHigh:
      return "too_high";
  }
  return "?";
}

}  // namespace sympflow
