#include <cmath>
#include <numbers>

#include <doctest.h>

#include "sympflow/errors.hpp"
#include "sympflow/io.hpp"
#include "sympflow/linalg.hpp"
#include "test_util.hpp"

namespace sympflow {
namespace {

using testing::rel_diff;

TEST_CASE("make_J basics") {
  Mat J1(2, 2);
  J1 << 0, 1, -1, 0;
  CHECK(make_J(1) == J1);
  for (int n = 1; n <= 4; ++n) {
    const Mat J = make_J(n);
    CHECK((J * J + Mat::Identity(2 * n, 2 * n)).norm() == 0.0);
    CHECK((J.adjoint() + J).norm() == 0.0);
  }
  CHECK_THROWS_AS(make_J(0), DimensionError);
}

TEST_CASE("structural predicates") {
  Mat A(2, 2);
  A << 1, kI, -kI, 2;
  CHECK(is_hermitian(A));
  Mat N(2, 2);
  N << 0, 1, 0, 0;
  CHECK_FALSE(is_hermitian(N));
  CHECK(is_hermitian(hermitian_part(random_complex(5, 5, 3))));
  CHECK_THROWS_AS(is_hermitian(Mat::Zero(2, 3)), DimensionError);

  CHECK(is_symplectic(Mat::Identity(4, 4)));
  CHECK(is_symplectic(make_J(2)));
  Mat S(2, 2);
  S << 2, 0, 0, 1;
  CHECK_FALSE(is_symplectic(S));
  CHECK_THROWS_AS(is_symplectic(Mat::Identity(3, 3)), DimensionError);

  CHECK(is_hamiltonian(make_J(3)));
  CHECK_FALSE(is_hamiltonian(Mat::Identity(4, 4)));
  Mat H(2, 2);
  const cd a(0.3, -1.2);
  H << a, 2.5, -0.7, -std::conj(a);
  CHECK(is_hamiltonian(H));
  CHECK_THROWS_AS(is_hamiltonian(Mat::Identity(3, 3)), DimensionError);
}

TEST_CASE("predicates are scale invariant") {
  const Mat S = random_instance(InstanceKind::kSymplectic, 3, 5);
  const Mat H = random_instance(InstanceKind::kHamiltonian, 3, 5);
  CHECK(is_hamiltonian(1e6 * H));
  CHECK(is_hamiltonian(1e-6 * H));
  CHECK(is_hermitian(1e8 * hermitian_part(H)));
  CHECK(is_symplectic(S));
}

TEST_CASE("mat_exp") {
  CHECK(mat_exp(Mat::Zero(3, 3)) == Mat::Identity(3, 3));
  Mat N(2, 2);
  N << 0, 1, 0, 0;
  Mat expected(2, 2);
  expected << 1, 2.5, 0, 1;
  CHECK(rel_diff(mat_exp(2.5 * N), expected) < 1e-15);
  CHECK_THROWS_AS(mat_exp(Mat::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(mat_exp(1e6 * Mat::Identity(2, 2)), OverflowError);

  // Eigendecomposition oracle on random diagonalizable matrices.
  for (int seed = 0; seed < 10; ++seed) {
    const Mat A = random_complex(5, 5, 100 + seed) * 0.5;
    Eigen::ComplexEigenSolver<Mat> es(A);
    const Mat V = es.eigenvectors();
    const Vec expl = es.eigenvalues().array().exp();
    const Mat oracle = V * expl.asDiagonal() * V.inverse();
    CHECK(rel_diff(mat_exp(A), oracle) < 1e-10);
  }
}

TEST_CASE("mat_log") {
  CHECK(mat_log(Mat::Identity(4, 4)).norm() < 1e-15);
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = std::exp(1.0);
  D(1, 1) = std::exp(-1.0);
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = -1.0;
  CHECK(rel_diff(mat_log(D), expected) < 1e-14);
  CHECK_THROWS_AS(mat_log(Mat::Zero(2, 2)), SingularityError);

  for (int seed = 0; seed < 10; ++seed) {
    Mat H = random_instance(InstanceKind::kHamiltonian, 3, 200 + seed);
    H *= 0.9 / H.operatorNorm();
    const Mat L = mat_log(mat_exp(H));
    CHECK(rel_diff(L, H) < 1e-10);
    CHECK(is_hamiltonian(L, Tolerances{1e-14, 1e-15}));
  }
}

TEST_CASE("mat_log rotates the cut away from negative eigenvalues") {
  // diag(-2, -1/2) is symplectic; the principal cut passes through both
  // eigenvalues.
  Mat S = Mat::Zero(2, 2);
  S(0, 0) = -2.0;
  S(1, 1) = -0.5;
  const Mat L = mat_log(S);
  CHECK(rel_diff(mat_exp(L), S) < 1e-12);
  CHECK(is_hamiltonian(L));

  // Eigenvalues spread around the full circle except a gap.
  Mat R = Mat::Zero(3, 3);
  R(0, 0) = -1.0;
  R(1, 1) = std::polar(1.0, 2.0);
  R(2, 2) = std::polar(1.0, -2.0);
  CHECK(rel_diff(mat_exp(mat_log(R)), R) < 1e-12);
}

TEST_CASE("mat_log on random symplectic matrices") {
  for (int seed = 0; seed < 20; ++seed) {
    const Mat S = random_instance(InstanceKind::kSymplectic, 3, 300 + seed);
    const Mat L = mat_log(S);
    CHECK(is_hamiltonian(L, Tolerances{1e-13, 1e-15}));
    CHECK((mat_exp(L) - S).norm() <= 1e-8 * S.norm());
  }
}

TEST_CASE("smallest_singular") {
  CHECK(smallest_singular(Mat::Identity(3, 3)) == doctest::Approx(1.0));
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 1.0;
  CHECK(smallest_singular(A) == 0.0);
  const Mat Q = random_complex(6, 6, 9).householderQr().householderQ();
  CHECK(std::abs(smallest_singular(Q) - 1.0) < 1e-12);
}

TEST_CASE("random_instance") {
  for (auto kind : {InstanceKind::kHermitian, InstanceKind::kHamiltonian,
                    InstanceKind::kSymplectic}) {
    CHECK(random_instance(kind, 3, 42) == random_instance(kind, 3, 42));
    CHECK(random_instance(kind, 3, 42) != random_instance(kind, 3, 43));
  }
  CHECK(is_hermitian(random_instance(InstanceKind::kHermitian, 4, 1)));
  CHECK(is_hamiltonian(random_instance(InstanceKind::kHamiltonian, 4, 1)));
  CHECK(is_symplectic(random_instance(InstanceKind::kSymplectic, 4, 1),
                      Tolerances{1e-9, 1e-10}));
  CHECK_THROWS_AS(random_instance(InstanceKind::kHermitian, 0, 1),
                  DimensionError);
}

TEST_CASE("exponential properties on random Hamiltonians") {
  for (int seed = 0; seed < 20; ++seed) {
    const Mat H = random_instance(InstanceKind::kHamiltonian, 2, 400 + seed);
    const double t = -5.0 + 0.5 * seed;
    CHECK(is_symplectic(mat_exp(H * t), Tolerances{1e-9, 1e-10}));
    const double s = 2.0 - 0.2 * seed;
    const double u = -1.5 + 0.17 * seed;
    const Mat lhs = mat_exp(H * (s + u));
    CHECK((lhs - mat_exp(H * s) * mat_exp(H * u)).norm() <= 1e-9 * lhs.norm());
  }
}

TEST_CASE("json matrix roundtrip") {
  const Mat A = random_complex(3, 2, 1);
  CHECK(matrix_from_json(matrix_to_json(A)) == A);
  json bad = {{"rows", 2}, {"cols", 2}, {"re", {{1, 2}}}};
  CHECK_THROWS_AS(matrix_from_json(bad), UsageError);
  json real = {{"rows", 1}, {"cols", 2}, {"re", {{1, 2}}}};
  CHECK(matrix_from_json(real)(0, 1) == cd(2, 0));
}

}  // namespace
}  // namespace sympflow
