#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sympflow/io.hpp"
#include "sympflow/linalg.hpp"
#include "sympflow/pairs.hpp"

namespace sympflow {

/// X = A^H X (I + G X)^{-1} A + H.
struct DareProblem {
  Mat A, G, H;
};

/// X + A^H X^{-1} A = Q.
struct NmeProblem {
  Mat A, Q;
};

/// -X G X + A^H X + X A + H = 0.
struct CareProblem {
  Mat A, G, H;
};

/// Iterate (A_k, G_k, H_k) of the DARE doubling.
struct Sda1State {
  Mat A, G, H;
};

/// Iterate (A_k, Q_k, P_k) of the NME doubling.
struct Sda2State {
  Mat A, Q, P;
};

using SdaState = std::variant<Sda1State, Sda2State>;

enum class SdaVerdict { kConverged, kBreakdown, kMaxIter };

struct SdaRecord {
  int k = 0;
  SdaState state;
  double norm_A = 0.0;
  /// |H_k - H_{k-1}| / |H_k| (resp. Q_k); zero for k = 1.
  double rel_delta = 0.0;
  /// Equation residual of the current candidate solution.
  double residual = 0.0;
};

struct SdaTrace {
  std::vector<SdaRecord> records;
  SdaVerdict verdict = SdaVerdict::kMaxIter;
  /// Set when the run ended in breakdown.
  std::optional<double> breakdown_sigma;
  std::string message;

  const SdaRecord& last() const { return records.back(); }
};

Sda1State sda1_step(const Sda1State& s, const Tolerances& tol = {});
Sda2State sda2_step(const Sda2State& s, const Tolerances& tol = {});

SdaTrace run_sda(const DareProblem& p, double tol, int kmax,
                 const Tolerances& tols = {});
SdaTrace run_sda(const NmeProblem& p, double tol, int kmax,
                 const Tolerances& tols = {});

/// Cayley transform with shift gamma; the resulting DARE shares the
/// stabilizing solution of the CARE.
DareProblem cayley(const CareProblem& care, double gamma = 1.0,
                   const Tolerances& tol = {});

/// Builds (M_k, L_k) in the doubling shape. The class must be the preset
/// matching the state variant.
SymplecticPair iterate_pair(const SdaState& state, const PairClass& cls);

/// The Hermitian block parameterizing the iterate inside its preset class.
HermitianBlock iterate_block(const SdaState& state,
                             const Tolerances& tol = {});

/// Inverse of iterate_block: recovers the doubling state whose iterate
/// block is X. The class selects the state variant.
SdaState state_from_block(const HermitianBlock& X, const PairClass& cls,
                          const Tolerances& tol = {});

double dare_residual(const DareProblem& p, const Mat& X);
double nme_residual(const NmeProblem& p, const Mat& X);
double care_residual(const CareProblem& p, const Mat& X);

/// Stabilizing CARE solution from the stable invariant subspace of the
/// Hamiltonian matrix; used as an independent check.
Mat care_solve_eigen(const CareProblem& p);

std::string to_string(SdaVerdict v);

// JSON: {"type": "dare" | "nme" | "care", "A": ..., "G": ..., "H": ...,
// "Q": ..., "gamma": ...}.
using AnyProblem = std::variant<DareProblem, NmeProblem, CareProblem>;
AnyProblem problem_from_json(const json& j, double* gamma = nullptr);

}  // namespace sympflow
