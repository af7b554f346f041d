#include <cmath>
#include <algorithm>
#include <numbers>

#include <doctest.h>

#include "sympflow/errors.hpp"
#include "sympflow/hjcf.hpp"
#include "test_util.hpp"

namespace sympflow {
namespace {

using testing::loglog_slope;
using testing::rel_diff;

TEST_CASE("build_J on single blocks") {
  JordanSpec r1;
  r1.r.push_back({cd(1.0, 0.0), 1});
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = -1.0;
  CHECK(build_J(r1) == expected);

  JordanSpec e1;
  e1.e.push_back({0.0, 1, 1});
  expected.setZero();
  expected(0, 1) = 1.0;
  CHECK(build_J(e1) == expected);
}

TEST_CASE("build_J reproduces the 4x4 coupled block layout") {
  const double gamma = 7.8340, delta = 7.2888;
  JordanSpec spec;
  spec.d.push_back({gamma, delta, 1, 2, 1});
  const Mat J = build_J(spec);
  const double h = std::sqrt(2.0) / 2.0;
  Mat R = Mat::Zero(4, 4);
  R(0, 0) = R(1, 1) = cd(0, gamma);
  R(0, 1) = 1.0;
  R(2, 2) = cd(0, delta);
  R(1, 3) = R(2, 3) = -h;
  R(3, 3) = cd(0, 0.5 * (gamma + delta));
  Mat D = Mat::Zero(4, 4);
  D(1, 3) = 1.0;
  D(2, 3) = -1.0;
  D(3, 1) = -1.0;
  D(3, 2) = 1.0;
  D(3, 3) = -h * kI * (gamma - delta);
  D *= h * kI;
  Mat G = Mat::Zero(4, 4);
  G(3, 3) = -0.5 * (gamma - delta);
  CHECK((J.topLeftCorner(4, 4) - R).norm() < 1e-15);
  CHECK((J.topRightCorner(4, 4) - D).norm() < 1e-15);
  CHECK((J.bottomLeftCorner(4, 4) - G).norm() < 1e-15);
  CHECK((J.bottomRightCorner(4, 4) + R.adjoint()).norm() < 1e-15);
}

TEST_CASE("build_J is Hamiltonian for random specs") {
  for (int seed = 0; seed < 50; ++seed) {
    CHECK(is_hamiltonian(build_J(random_spec(seed)), Tolerances{1e-14, 1e-15}));
  }
}

TEST_CASE("spec validation") {
  JordanSpec bad;
  CHECK_THROWS_AS(build_J(bad), SpecError);
  bad.r.push_back({cd(-1.0, 0.0), 1});
  CHECK_THROWS_AS(build_J(bad), SpecError);
  JordanSpec beta;
  beta.e.push_back({0.0, 2, 1});
  CHECK_THROWS_AS(build_J(beta), SpecError);
  JordanSpec same;
  same.d.push_back({1.0, 1.0, 1, 1, 1});
  CHECK_THROWS_AS(same.Validate(), SpecError);
}

TEST_CASE("spec json roundtrip") {
  for (int seed = 0; seed < 10; ++seed) {
    const JordanSpec spec = random_spec(seed);
    CHECK(build_J(spec_from_json(spec_to_json(spec))) == build_J(spec));
  }
  CHECK_THROWS_AS(spec_from_json(json{{"x", 1}}), SpecError);
}

TEST_CASE("stencil values") {
  const ExpStencil s1 = stencil(1, 0.7);
  CHECK(s1.Phi(0, 0) == 1.0);
  CHECK(s1.P(0, 0) == -1.0);
  CHECK(s1.GammaHat(0, 0) == doctest::Approx(-0.7));
  const ExpStencil s2 = stencil(2, 1.0);
  Eigen::MatrixXd Phi2(2, 2);
  Phi2 << 1, 1, 0, 1;
  CHECK(s2.Phi == Phi2);
}

TEST_CASE("stencil invariants") {
  for (int k = 1; k <= 8; ++k) {
    const Eigen::MatrixXd P = signed_antidiag(k);
    const Eigen::MatrixXd N = nilpotent(k);
    CHECK((P.inverse() * N * P + N.transpose()).norm() < 1e-14);
    for (int i = 0; i < 10; ++i) {
      const double t = -4.0 + 0.83 * i;
      const ExpStencil st = stencil(k, t);
      const Eigen::MatrixXd PhiInvH = st.Phi.inverse().transpose();
      CHECK((st.PhiHat - PhiInvH).norm() <= 1e-10 * PhiInvH.norm());
      const Eigen::RowVectorXd identity_row =
          st.phi.transpose() * PhiInvH + st.psi.transpose() * st.P;
      CHECK(identity_row.norm() <= 1e-10);
    }
  }
}

TEST_CASE("exp_J agrees with the generic exponential") {
  for (int seed = 0; seed < 50; ++seed) {
    const JordanSpec spec = random_spec(1000 + seed);
    const Mat J = build_J(spec);
    for (int i = 0; i < 5; ++i) {
      const double t = -5.0 + 2.3 * i + 0.01 * seed;
      const Mat E = exp_J(spec, t);
      CHECK((E - mat_exp(J * t)).norm() <= 1e-9 * E.norm());
    }
  }
}

TEST_CASE("exp_J simple closed forms") {
  JordanSpec e1;
  e1.e.push_back({0.0, 1, 1});
  Mat expected(2, 2);
  expected << 1, 3.5, 0, 1;
  CHECK(rel_diff(exp_J(e1, 3.5), expected) < 1e-15);

  JordanSpec r;
  const cd lambda(0.4, 1.1);
  r.r.push_back({lambda, 3});
  const double t = 1.3;
  const Mat E = exp_J(r, t);
  const Mat Phi = Phi_k(3, t).cast<cd>();
  CHECK(rel_diff(E.topLeftCorner(3, 3), std::exp(lambda * t) * Phi) < 1e-15);
  CHECK(rel_diff(E.bottomRightCorner(3, 3),
                 std::exp(-std::conj(lambda) * t) * Phi.inverse().adjoint()) <
        1e-14);
}

TEST_CASE("exp_J handles a second part of size zero") {
  JordanSpec spec;
  spec.d.push_back({2.2337, 9.7818, 1, 1, 0});
  spec.c.push_back({0.5, -1, 0, 2});
  const Mat J = build_J(spec);
  for (double t : {-3.0, 0.4, 2.5}) {
    const Mat E = exp_J(spec, t);
    CHECK((E - mat_exp(J * t)).norm() <= 1e-10 * E.norm());
  }
}

TEST_CASE("exp_J group law and symplecticity") {
  for (int seed = 0; seed < 20; ++seed) {
    const JordanSpec spec = random_spec(2000 + seed);
    const double t = -2.0 + 0.2 * seed;
    const double s = 1.7 - 0.15 * seed;
    const Mat lhs = exp_J(spec, t + s);
    CHECK((exp_J(spec, t) * exp_J(spec, s) - lhs).norm() <= 1e-9 * lhs.norm());
    CHECK(is_symplectic(exp_J(spec, t), Tolerances{1e-9, 1e-10}));
  }
}

TEST_CASE("kappa closed form and numeric evaluation") {
  CHECK(kappa(2) == 0.0);
  CHECK(kappa(3) == 2.0);
  CHECK(std::abs(kappa_numeric(4, 1.7)) < 1e-9);
  for (int n = 1; n <= 8; ++n) {
    for (double t : {-2.5, -1.0, 1.0, 2.5}) {
      CHECK(std::abs(kappa_numeric(n, t) - kappa(n)) < 1e-9);
    }
  }
}

TEST_CASE("digamma determinant") {
  CHECK(digamma_det(1, 2) == doctest::Approx(0.5));
  Eigen::MatrixXd F(2, 2);
  F << 1, 0.5, 1, 1;
  CHECK(digamma_matrix(1, 2) == F);
  for (int k = 1; k <= 8; ++k) {
    CHECK(digamma_det(k, k) == doctest::Approx(1.0 / factorial(k)));
  }
  const double numeric = digamma_matrix(2, 4).determinant();
  CHECK(std::abs(digamma_det(2, 4) - numeric) <= 1e-12 * std::abs(numeric));
  for (int k1 = 0; k1 <= 8; ++k1) {
    for (int k2 = k1; k2 <= std::max(k1, 2 * k1); ++k2) {
      const double exact = digamma_det_exact(k1, k2);
      CHECK(std::abs(digamma_det(k1, k2) - exact) <= 1e-12 * std::abs(exact));
    }
  }
  CHECK_THROWS_AS(digamma_det(2, 5), SpecError);
  CHECK_THROWS_AS(digamma_det(3, 2), SpecError);
  CHECK_THROWS_AS(factorial(21), SpecError);
}

TEST_CASE("single-block inverse decays like 1/t") {
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> ts, ys;
    for (double t = 100.0; t <= 10000.0; t *= 1.5) {
      const ExpStencil st = stencil(n, t);
      ts.push_back(t);
      ys.push_back((st.PhiHat * st.GammaHat.inverse()).norm());
    }
    CHECK(std::abs(loglog_slope(ts, ys) + 1.0) <= 0.1);
  }
}

TEST_CASE("coupled-block inverse decays like 1/t^2") {
  const Mat W = random_complex(4, 4, 5);
  const Mat w = random_complex(4, 1, 6);
  const int n1 = 2, n2 = 2;
  std::vector<double> ts, ys;
  for (double t = 100.0; t <= 10000.0; t *= 1.5) {
    Mat Phi = Mat::Zero(4, 4);
    Phi.topLeftCorner(n1, n1) = Phi_k(n1, t).cast<cd>();
    Phi.bottomRightCorner(n2, n2) = Phi_k(n2, t).cast<cd>();
    Mat phi1(4, 1);
    phi1.topRows(n1) = -std::sqrt(0.5) * phi_k(n1, t).cast<cd>();
    phi1.bottomRows(n2) = -std::sqrt(0.5) * phi_k(n2, t).cast<cd>();
    Mat Gamma = Mat::Zero(4, 4);
    Gamma.topLeftCorner(n1, n1) =
        -kI * (Gamma_k(n1 + 1, 2 * n1, t) * signed_antidiag(n1)).cast<cd>();
    Gamma.bottomRightCorner(n2, n2) =
        kI * (Gamma_k(n2 + 1, 2 * n2, t) * signed_antidiag(n2)).cast<cd>();
    const Mat upsilon = Phi * W + phi1 * w.adjoint();
    ts.push_back(t);
    ys.push_back((upsilon + Gamma).inverse().norm());
  }
  CHECK(std::abs(loglog_slope(ts, ys) + 2.0) <= 0.1);
}

}  // namespace
}  // namespace sympflow
