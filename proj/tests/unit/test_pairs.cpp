#include <doctest.h>

#include "pair_fixtures.hpp"
#include "sympflow/errors.hpp"
#include "sympflow/pairs.hpp"
#include "test_util.hpp"

namespace sympflow {
namespace {

using testing::deficient_block;
using testing::random_block;
using testing::random_class;
using testing::rel_diff;

SymplecticPair DiagonalIndexOnePair() {
  Mat M = Mat::Zero(2, 2), L = Mat::Zero(2, 2);
  M(1, 1) = 1.0;
  L(0, 0) = 1.0;
  return {M, L};
}

// Blockwise distance between two Hermitian blocks.
double BlockDiff(const HermitianBlock& a, const HermitianBlock& b) {
  return rel_diff(a.assembled(), b.assembled());
}

TEST_CASE("to_pair with X = 0 in the identity class") {
  const int n = 2;
  HermitianBlock X = HermitianBlock::FromMatrix(Mat::Zero(4, 4));
  const SymplecticPair p = to_pair(X, PairClass::Identity(n));
  Mat M = Mat::Zero(4, 4), L = Mat::Zero(4, 4);
  M.bottomRightCorner(2, 2).setIdentity();
  L.topLeftCorner(2, 2).setIdentity();
  CHECK(p.M == M);
  CHECK(p.L == L);
}

TEST_CASE("to_pair output is a symplectic pair") {
  for (int seed = 0; seed < 20; ++seed) {
    const int n = 1 + seed % 4;
    const SymplecticPair p =
        to_pair(random_block(n, seed), random_class(n, 50 + seed));
    CHECK(p.symplectic_residual() <= 1e-10);
  }
  CHECK_THROWS_AS(to_pair(random_block(2, 1), PairClass::Identity(3)),
                  DimensionError);
}

TEST_CASE("from_pair inverts to_pair and ignores left factors") {
  for (int seed = 0; seed < 20; ++seed) {
    const int n = 1 + seed % 4;
    const HermitianBlock X = random_block(n, seed);
    const PairClass cls = random_class(n, 100 + seed);
    const SymplecticPair p = to_pair(X, cls);
    CHECK(BlockDiff(from_pair(p, cls), X) < 1e-12);
    const Mat C = random_complex(2 * n, 2 * n, 200 + seed);
    CHECK(BlockDiff(from_pair({C * p.M, C * p.L}, cls), X) < 1e-9);
  }
}

TEST_CASE("identity-class read-off recovers the doubling matrices") {
  const int n = 3;
  const Mat A = random_complex(n, n, 1);
  const Mat G = hermitian_part(random_complex(n, n, 2));
  const Mat H = hermitian_part(random_complex(n, n, 3));
  Mat M = Mat::Zero(2 * n, 2 * n), L = Mat::Zero(2 * n, 2 * n);
  M << A, Mat::Zero(n, n), -H, Mat::Identity(n, n);
  L << Mat::Identity(n, n), G, Mat::Zero(n, n), A.adjoint();
  const HermitianBlock X = from_pair({M, L}, PairClass::Identity(n));
  CHECK(rel_diff(X.X12, A) < 1e-14);
  CHECK(rel_diff(X.X11, G) < 1e-14);
  CHECK(rel_diff(X.X22, -H) < 1e-14);
}

TEST_CASE("NME-class pairs are left-equivalent to the doubling shape") {
  const int n = 3;
  const Mat A = random_complex(n, n, 4);
  const Mat Q = hermitian_part(random_complex(n, n, 5));
  const Mat P = hermitian_part(random_complex(n, n, 6));
  const Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
  Mat M(2 * n, 2 * n), L(2 * n, 2 * n);
  M << A, Z, Q, -I;
  L << -P, I, A.adjoint(), Z;
  const PairClass cls = PairClass::NmeClass(n);
  const HermitianBlock X = from_pair({M, L}, cls);
  // X = -[[P, -A], [-A^H, -Q]]^{-1}.
  Mat R_inv(2 * n, 2 * n);
  R_inv << P, -A, -A.adjoint(), -Q;
  CHECK(rel_diff(X.assembled(), -R_inv.inverse()) < 1e-12);
  const SymplecticPair back = to_pair(X, cls);
  CHECK(rel_diff(R_inv * back.M, M) < 1e-12);
  CHECK(rel_diff(R_inv * back.L, L) < 1e-12);
}

TEST_CASE("from_pair rejects pairs outside the class") {
  const SymplecticPair p = DiagonalIndexOnePair();
  // R^{-1} = [first column of L | second column of M] = I here, so use a
  // pair whose columns collapse.
  Mat M = Mat::Zero(2, 2), L = Mat::Zero(2, 2);
  M(0, 0) = 1.0;
  L(1, 1) = 1.0;
  CHECK_THROWS_AS(from_pair({M, L}, PairClass::Identity(1)), NotInClassError);
  CHECK_NOTHROW(from_pair(p, PairClass::Identity(1)));
}

TEST_CASE("classify") {
  const Mat I = Mat::Identity(2, 2);
  Classification c = classify({I, I});
  CHECK(c.regular);
  CHECK(c.ind_inf == IndexClass::kZero);

  c = classify(DiagonalIndexOnePair());
  CHECK(c.regular);
  CHECK(c.ind_inf == IndexClass::kOne);

  Mat N = Mat::Zero(2, 2);
  N(0, 1) = 1.0;
  c = classify({I, N});
  CHECK(c.regular);
  CHECK(c.ind_inf == IndexClass::kTooHigh);

  const Mat Z = Mat::Zero(2, 2);
  CHECK_FALSE(classify({N, N}).regular);
  CHECK_FALSE(classify({Z, Z}).regular);
}

TEST_CASE("eigen_split of (e^H0, I)") {
  for (int seed = 0; seed < 10; ++seed) {
    const int n = 2 + seed % 2;
    const Mat H0 = random_instance(InstanceKind::kHamiltonian, n, seed) * 0.5;
    const Mat S = mat_exp(H0);
    const EigenSplit split =
        eigen_split({S, Mat::Identity(2 * n, 2 * n)});
    CHECK(split.ell == 0);
    CHECK(split.nhat == n);
    Eigen::VectorXcd a = Eigen::ComplexEigenSolver<Mat>(split.Shat).eigenvalues();
    Eigen::VectorXcd b = Eigen::ComplexEigenSolver<Mat>(S).eigenvalues();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      double best = 1e300;
      for (Eigen::Index j = 0; j < b.size(); ++j) {
        best = std::min(best, std::abs(a(i) - b(j)));
      }
      CHECK(best < 1e-8);
    }
    CHECK(is_symplectic(split.Shat));
  }
}

TEST_CASE("eigen_split of the diagonal index-one pair") {
  const EigenSplit split = eigen_split(DiagonalIndexOnePair());
  CHECK(split.nhat == 0);
  CHECK(split.ell == 1);
  const Mat J = make_J(1);
  CHECK(std::abs(std::abs(split.U0(0, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(split.Uinf(0, 0)) < 1e-14);
  CHECK(std::abs((split.U0.adjoint() * J * split.Uinf)(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("eigen_split and build_generator on random index-one pairs") {
  for (int seed = 0; seed < 30; ++seed) {
    const int n = 2 + seed % 3;
    const int deficiency = 1 + seed % 2;
    const PairClass cls = seed % 3 == 0 ? PairClass::Identity(n)
                                        : random_class(n, 300 + seed);
    const SymplecticPair p = to_pair(deficient_block(n, deficiency, seed), cls);
    const Classification c = classify(p);
    REQUIRE(c.regular);
    REQUIRE(c.ind_inf == IndexClass::kOne);
    const EigenSplit split = eigen_split(p);
    CHECK(split.ell == deficiency);
    const Mat J = make_J(n);
    const Mat U = split.U();
    CHECK((U.adjoint() * J * U - make_J_sum(split.nhat, split.ell)).norm() <=
          1e-8 * std::max(1.0, U.squaredNorm()));
    const double scale = p.M.norm() + p.L.norm();
    CHECK((p.M * split.U0).norm() <= 1e-8 * scale);
    CHECK((p.L * split.Uinf).norm() <= 1e-8 * scale);
    CHECK(split.shat_residual <= 1e-8);
    CHECK(is_symplectic(split.Shat));
    // J-orthogonality between the three subspaces.
    CHECK((split.U0.adjoint() * J * split.U0).norm() <= 1e-8);
    CHECK((split.Uinf.adjoint() * J * split.Uinf).norm() <= 1e-8 * U.squaredNorm());
    CHECK((split.U1.adjoint() * J * split.U0).norm() <= 1e-8 * U.squaredNorm());
    CHECK((split.U1.adjoint() * J * split.Uinf).norm() <= 1e-8 * U.squaredNorm());

    const FlowGenerator gen = build_generator(p, split);
    CHECK(is_hamiltonian(gen.H));
    CHECK(is_hamiltonian(gen.Hhat));
    CHECK(rel_diff(mat_exp(gen.Hhat), split.Shat) <= 1e-8);
    CHECK(rel_diff(gen.Pi0 * gen.Pi0, gen.Pi0) <= 1e-8);
    CHECK(rel_diff(gen.PiInf * gen.PiInf, gen.PiInf) <= 1e-8);
    const Mat lhs = p.M * gen.Pi0;
    CHECK((lhs - p.L * gen.PiInf * mat_exp(gen.H)).norm() <=
          1e-8 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("build_generator on index-zero pairs") {
  const int n = 3;
  const SymplecticPair p = to_pair(random_block(n, 5), random_class(n, 6));
  REQUIRE(classify(p).ind_inf == IndexClass::kZero);
  const EigenSplit split = eigen_split(p);
  const FlowGenerator gen = build_generator(p, split);
  const Mat I = Mat::Identity(2 * n, 2 * n);
  CHECK(rel_diff(gen.Pi0, I) < 1e-8);
  CHECK(rel_diff(gen.PiInf, I) < 1e-8);
  CHECK(rel_diff(p.M, p.L * mat_exp(gen.H)) < 1e-8);
}

TEST_CASE("build_generator on the diagonal index-one pair") {
  const SymplecticPair p = DiagonalIndexOnePair();
  const FlowGenerator gen = build_generator(p, eigen_split(p));
  CHECK(gen.H.norm() == 0.0);
  CHECK((p.M * gen.Pi0 - p.L * gen.PiInf * mat_exp(gen.H)).norm() <= 1e-12);
}

TEST_CASE("index-two pairs are rejected") {
  Mat N = Mat::Zero(2, 2);
  N(0, 1) = 1.0;
  CHECK_THROWS_AS(eigen_split({Mat::Identity(2, 2), N}), IndexTooHighError);
  Mat Z = Mat::Zero(2, 2);
  CHECK_THROWS_AS(eigen_split({Z, Z}), NotRegularError);
}

TEST_CASE("perturb") {
  const SymplecticPair p = DiagonalIndexOnePair();
  const EigenSplit split = eigen_split(p);
  const SymplecticPair same = perturb(p, split, 0.0);
  CHECK(same.M == p.M);
  CHECK(same.L == p.L);

  const SymplecticPair q = perturb(p, split, 0.1);
  Mat Me = Mat::Zero(2, 2), Le = Mat::Zero(2, 2);
  Me(0, 0) = 0.1;
  Me(1, 1) = 1.0;
  Le(0, 0) = 1.0;
  Le(1, 1) = 0.1;
  CHECK((q.M - Me).norm() <= 1e-12);
  CHECK((q.L - Le).norm() <= 1e-12);
  CHECK((q.M * split.U0 - 0.1 * q.L * split.U0).norm() <= 1e-12);
  CHECK(smallest_singular(q.L) > 0.05);

  const int n = 3;
  const SymplecticPair p0 = to_pair(random_block(n, 8), random_class(n, 9));
  const SymplecticPair r = perturb(p0, eigen_split(p0), 0.3);
  CHECK(r.M == p0.M);
}

TEST_CASE("perturbation is a symplectic pair and continuous in eps") {
  for (int seed = 0; seed < 10; ++seed) {
    const int n = 3;
    const SymplecticPair p =
        to_pair(deficient_block(n, 1, 500 + seed), random_class(n, 600 + seed));
    const EigenSplit split = eigen_split(p);
    double prev = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2}) {
      const SymplecticPair q = perturb(p, split, eps);
      CHECK(q.symplectic_residual() <= 1e-8);
      CHECK(smallest_singular(q.L) > 1e-12);
      const double dm = (q.M - p.M).norm();
      if (prev > 0) CHECK(dm / prev == doctest::Approx(10.0).epsilon(1e-6));
      prev = dm;
    }
  }
}

}  // namespace
}  // namespace sympflow
