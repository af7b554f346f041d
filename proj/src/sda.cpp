#include "sympflow/sda.hpp"

#include <algorithm>
#include <cmath>

#include "sympflow/errors.hpp"

namespace sympflow {
namespace {

// Solves K X = B after the breakdown check sigma_min(K) < rank_tol |K|.
Mat SolveOrBreak(const Mat& K, const Mat& B, const Tolerances& tol,
                 const char* what) {
  const double smax = largest_singular(K);
  const double smin = smallest_singular(K);
  if (!(smin >= tol.rank_tol * smax) || smax == 0.0) {
    throw BreakdownError(std::string(what) + " is numerically singular",
                         smin);
  }
  return K.partialPivLu().solve(B);
}

void RequireSquareSame(const Mat& A, const Mat& B, const char* who) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() != A.cols()) {
    throw DimensionError(std::string(who) + ": inconsistent sizes");
  }
}

double RelDelta(const Mat& next, const Mat& prev) {
  const double num = (next - prev).norm();
  const double den = next.norm();
  if (num == 0.0) return 0.0;
  return num / std::max(den, 1e-300);
}

template <typename State, typename Step, typename Candidate,
          typename Residual>
SdaTrace Run(State state, double tol, int kmax, const Tolerances& tols,
             Step step, Candidate candidate, Residual residual) {
  if (kmax < 1) throw UsageError("run_sda: kmax must be at least 1");
  SdaTrace trace;
  trace.records.push_back({1, state, state.A.norm(), 0.0,
                           residual(candidate(state))});
  if (state.A.norm() <= tol) {
    trace.verdict = SdaVerdict::kConverged;
    return trace;
  }
  for (int k = 2; k <= kmax; ++k) {
    State next;
    try {
      next = step(state, tols);
    } catch (const BreakdownError& e) {
      trace.verdict = SdaVerdict::kBreakdown;
      trace.breakdown_sigma = e.sigma_min();
      trace.message = e.what();
      return trace;
    }
    const double delta = RelDelta(candidate(next), candidate(state));
    state = std::move(next);
    trace.records.push_back({k, state, state.A.norm(), delta,
                             residual(candidate(state))});
    if (state.A.norm() <= tol || delta <= tol) {
      trace.verdict = SdaVerdict::kConverged;
      return trace;
    }
  }
  trace.verdict = SdaVerdict::kMaxIter;
  return trace;
}

}  // namespace

Sda1State sda1_step(const Sda1State& s, const Tolerances& tol) {
  RequireSquareSame(s.A, s.G, "sda1_step");
  RequireSquareSame(s.A, s.H, "sda1_step");
  const Eigen::Index n = s.A.rows();
  const Mat I = Mat::Identity(n, n);
  // (I + H G)^{-1} = ((I + G H)^{-H})^H for Hermitian G, H; both are formed
  // directly to keep the recurrences literal.
  const Mat IGH_inv_A = SolveOrBreak(I + s.G * s.H, s.A, tol, "I + G H");
  const Mat IHG = I + s.H * s.G;
  const Mat X = SolveOrBreak(IHG, s.A.adjoint(), tol, "I + H G");
  const Mat Y = SolveOrBreak(IHG, s.H * s.A, tol, "I + H G");
  Sda1State out;
  out.A = s.A * IGH_inv_A;
  out.G = hermitian_part(s.G + s.A * s.G * X);
  out.H = hermitian_part(s.H + s.A.adjoint() * Y);
  return out;
}

Sda2State sda2_step(const Sda2State& s, const Tolerances& tol) {
  RequireSquareSame(s.A, s.Q, "sda2_step");
  RequireSquareSame(s.A, s.P, "sda2_step");
  const Mat K = s.Q - s.P;
  const Mat KA = SolveOrBreak(K, s.A, tol, "Q - P");
  const Mat KAh = SolveOrBreak(K, s.A.adjoint(), tol, "Q - P");
  Sda2State out;
  out.A = s.A * KA;
  out.Q = hermitian_part(s.Q - s.A.adjoint() * KA);
  out.P = hermitian_part(s.P + s.A * KAh);
  return out;
}

SdaTrace run_sda(const DareProblem& p, double tol, int kmax,
                 const Tolerances& tols) {
  RequireSquareSame(p.A, p.G, "run_sda");
  RequireSquareSame(p.A, p.H, "run_sda");
  return Run(Sda1State{p.A, p.G, p.H}, tol, kmax, tols, sda1_step,
             [](const Sda1State& s) { return s.H; },
             [&](const Mat& X) { return dare_residual(p, X); });
}

SdaTrace run_sda(const NmeProblem& p, double tol, int kmax,
                 const Tolerances& tols) {
  RequireSquareSame(p.A, p.Q, "run_sda");
  const Eigen::Index n = p.A.rows();
  return Run(Sda2State{p.A, p.Q, Mat::Zero(n, n)}, tol, kmax, tols,
             sda2_step, [](const Sda2State& s) { return s.Q; },
             [&](const Mat& X) { return nme_residual(p, X); });
}

DareProblem cayley(const CareProblem& care, double gamma,
                   const Tolerances& tol) {
  RequireSquareSame(care.A, care.G, "cayley");
  RequireSquareSame(care.A, care.H, "cayley");
  if (!(gamma > 0)) throw UsageError("cayley: gamma must be positive");
  const Eigen::Index n = care.A.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat A_g = care.A - gamma * I;
  const Mat A_g_inv = inverse_checked(A_g, tol.rank_tol, "cayley: A - gamma I");
  // W = A_g^H + H A_g^{-1} G.
  const Mat W = A_g.adjoint() + care.H * A_g_inv * care.G;
  const Mat W_inv = inverse_checked(W, tol.rank_tol, "cayley: shifted system");
  DareProblem out;
  out.A = I + 2.0 * gamma * W_inv.adjoint();
  out.G = hermitian_part(2.0 * gamma * A_g_inv * care.G * W_inv);
  out.H = hermitian_part(2.0 * gamma * W_inv * care.H * A_g_inv);
  return out;
}

SymplecticPair iterate_pair(const SdaState& state, const PairClass& cls) {
  if (const auto* s = std::get_if<Sda1State>(&state)) {
    const Eigen::Index n = s->A.rows();
    if (cls.S1.rows() != 2 * n || !cls.is_identity_class()) {
      throw UsageError("iterate_pair: DARE iterates live in the (I, I) class");
    }
    Mat M = Mat::Zero(2 * n, 2 * n), L = Mat::Zero(2 * n, 2 * n);
    M << s->A, Mat::Zero(n, n), -s->H, Mat::Identity(n, n);
    L << Mat::Identity(n, n), s->G, Mat::Zero(n, n), s->A.adjoint();
    return {M, L};
  }
  const auto& s = std::get<Sda2State>(state);
  const Eigen::Index n = s.A.rows();
  if (cls.S1.rows() != 2 * n || !cls.is_nme_class()) {
    throw UsageError("iterate_pair: NME iterates live in the (-I, J) class");
  }
  Mat M(2 * n, 2 * n), L(2 * n, 2 * n);
  M << s.A, Mat::Zero(n, n), s.Q, -Mat::Identity(n, n);
  L << -s.P, Mat::Identity(n, n), s.A.adjoint(), Mat::Zero(n, n);
  return {M, L};
}

HermitianBlock iterate_block(const SdaState& state, const Tolerances& tol) {
  if (const auto* s = std::get_if<Sda1State>(&state)) {
    return {s->G, s->A, s->A.adjoint(), -s->H};
  }
  const auto& s = std::get<Sda2State>(state);
  const Eigen::Index n = s.A.rows();
  Mat R_inv(2 * n, 2 * n);
  R_inv << s.P, -s.A, -s.A.adjoint(), -s.Q;
  Mat X;
  try {
    X = -inverse_checked(R_inv, tol.rank_tol, "iterate_block");
  } catch (const SingularityError&) {
    throw NotInClassError("iterate_block: iterate cannot be normalized");
  }
  return HermitianBlock::FromMatrix(hermitian_part(X));
}

SdaState state_from_block(const HermitianBlock& X, const PairClass& cls,
                          const Tolerances& tol) {
  X.Validate();
  const int n = X.half_dim();
  if (cls.is_identity_class()) {
    return Sda1State{X.X12, X.X11, -X.X22};
  }
  if (!cls.is_nme_class()) {
    throw UsageError("state_from_block: class is not a doubling preset");
  }
  Mat R;
  try {
    R = -inverse_checked(X.assembled(), tol.rank_tol, "state_from_block");
  } catch (const SingularityError&) {
    throw NotInClassError("state_from_block: block is singular");
  }
  return Sda2State{-R.topRightCorner(n, n), -R.bottomRightCorner(n, n),
                   R.topLeftCorner(n, n)};
}

double dare_residual(const DareProblem& p, const Mat& X) {
  const Eigen::Index n = X.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat R = X - p.A.adjoint() * X * (I + p.G * X).partialPivLu().solve(p.A) - p.H;
  return R.norm() / std::max(1.0, X.norm());
}

double nme_residual(const NmeProblem& p, const Mat& X) {
  const Mat R = X + p.A.adjoint() * X.partialPivLu().solve(p.A) - p.Q;
  return R.norm() / std::max(1.0, X.norm());
}

double care_residual(const CareProblem& p, const Mat& X) {
  const Mat R = -X * p.G * X + p.A.adjoint() * X + X * p.A + p.H;
  return R.norm() / std::max(1.0, X.norm());
}

Mat care_solve_eigen(const CareProblem& p) {
  const Eigen::Index n = p.A.rows();
  Mat Hc(2 * n, 2 * n);
  Hc << p.A, -p.G, -p.H, -p.A.adjoint();
  Eigen::ComplexEigenSolver<Mat> es(Hc);
  Mat U(2 * n, n);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0) {
      if (col == n) throw SingularityError("care_solve_eigen: no dichotomy");
      U.col(col++) = es.eigenvectors().col(i);
    }
  }
  if (col != n) throw SingularityError("care_solve_eigen: no dichotomy");
  const Mat X = U.bottomRows(n) * U.topRows(n).inverse();
  return hermitian_part(X);
}

std::string to_string(SdaVerdict v) {
  switch (v) {
    case SdaVerdict::kConverged:
      return "converged";
    case SdaVerdict::kBreakdown:
      return "breakdown";
    case SdaVerdict::kMaxIter:
      return "max_iter";
  }
  return "?";
}

AnyProblem problem_from_json(const json& j, double* gamma) {
  try {
    const auto type = j.at("type").get<std::string>();
    const Mat A = matrix_from_json(j.at("A"));
    auto hermitian = [&](const char* key) {
      Mat X = matrix_from_json(j.at(key));
      if (X.rows() != A.rows() || X.cols() != A.cols()) {
        throw UsageError(std::string("problem JSON: ") + key +
                         " has the wrong size");
      }
      if (!is_hermitian(X)) {
        throw UsageError(std::string("problem JSON: ") + key +
                         " is not Hermitian");
      }
      return X;
    };
    if (A.rows() != A.cols() || A.rows() == 0) {
      throw UsageError("problem JSON: A must be square and non-empty");
    }
    if (gamma != nullptr) *gamma = j.value("gamma", 1.0);
    if (type == "dare") return DareProblem{A, hermitian("G"), hermitian("H")};
    if (type == "care") return CareProblem{A, hermitian("G"), hermitian("H")};
    if (type == "nme") return NmeProblem{A, hermitian("Q")};
    throw UsageError("problem JSON: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw UsageError(std::string("problem JSON: ") + e.what());
  }
}

}  // namespace sympflow
