#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sympflow/linalg.hpp"
#include "sympflow/pairs.hpp"
#include "sympflow/sda.hpp"

namespace sympflow {

/// t -> e^{H t} for a fixed Hamiltonian H.
using ExpFn = std::function<Mat(double)>;

/// [Q; P] = Y R with Y having orthonormal columns. R itself may overflow on
/// long horizons, so only its inverse is kept.
struct Frame {
  Mat Y;
  Mat R_inv;

  Eigen::Index half_dim() const { return Y.cols(); }
  auto top() const { return Y.topRows(Y.cols()); }
  auto bottom() const { return Y.bottomRows(Y.cols()); }
  /// sigma_min of top(): the cosine of the largest principal angle between
  /// span [Q; P] and span [I; 0]. Lies in [0, 1] and vanishes at blow-ups.
  double sigma_min() const;
};

/// Applies e^{H t} to [I; W0]. Without a closed form the horizon is split into
/// steps with |H| dt <= 1 and the frame is re-orthonormalized after each step,
/// which keeps the column space accurate when e^{H t} is far from normal.
class Propagator {
 public:
  Propagator() = default;
  explicit Propagator(Mat H);
  /// Uses exp_h(t) = e^{H t}. Horizons longer than max_step are split into
  /// equal steps, which matters when H has eigenvalues off the imaginary
  /// axis and one application would swamp the slowly growing directions.
  Propagator(Mat H, ExpFn exp_h,
             double max_step = std::numeric_limits<double>::infinity());

  const Mat& H() const { return H_; }
  Eigen::Index half_dim() const { return H_.rows() / 2; }
  Frame frame(const Mat& W0, double t) const;

 private:
  Mat H_;
  ExpFn exp_h_;
  double max_step_ = std::numeric_limits<double>::infinity();
};

struct FlowProblem {
  PairClass cls;
  HermitianBlock X1;
  SymplecticPair pair;
  EigenSplit split;
  FlowGenerator gen;
  /// -D S2 H S2^{-1} D with D = diag(I, -I).
  Mat Htilde;
  /// J^{-1} S1 H S1^{-1} J.
  Mat Hstar;
  /// Propagators for S2 H S2^{-1} and Hstar. Callers holding a closed form
  /// for the exponentials may replace them.
  Propagator prop_h2;
  Propagator prop_hstar;

  int half_dim() const { return X1.half_dim(); }
  /// S2 H S2^{-1}.
  Mat H2() const;
};

struct FlowSample {
  double t = 0.0;
  /// Radon factors of the S2 flow at 1 - t and of the star flow at t - 1.
  /// They may overflow on long horizons; X is computed from the frames.
  Mat Q, P, Qstar, Pstar;
  /// |Q^{-1}|_2, infinite at a blow-up.
  double norm_Q_inv = 0.0;
  /// Empty at a blow-up.
  std::optional<HermitianBlock> X;
  /// sigma_min of the Q block of an orthonormal basis of span [Q; P]. Lies in
  /// [0, 1] and vanishes exactly at blow-ups.
  double sigma_min_Q = 0.0;
  double sigma_min_Qstar = 0.0;

  bool blowup() const { return !X.has_value(); }
};

struct SingularTime {
  double t = 0.0;
  /// Bracketing grid cell.
  double lo = 0.0;
  double hi = 0.0;
  /// Normalized sigma_min (see FlowSample) at t.
  double sigma_min = 0.0;
};

struct SingularTimeList {
  std::vector<SingularTime> times;
  std::vector<std::string> warnings;
};

struct ScanOptions {
  /// Golden-section stops once the bracket is narrower than this.
  double refine_tol = 1e-8;
  /// Grid minima with relative sigma_min above this are ignored.
  double dip_threshold = 0.25;
  /// A refined minimum counts as a singular time when its relative sigma_min
  /// is at most this.
  double accept_tol = 1e-6;
};

/// (Q, P) with [Q; P] = e^{H t} [I; W0].
struct RadonFactors {
  Mat Q, P;
};

FlowProblem build_flow_problem(const PairClass& cls, const HermitianBlock& X1,
                               const Tolerances& tol = {});

RadonFactors propagate(const Mat& H, const Mat& W0, double t);
RadonFactors propagate(const Propagator& prop, const Mat& W0, double t);

/// W(t) = P Q^{-1}; empty when the normalized sigma_min of Q is at most
/// rank_tol.
std::optional<Mat> rde_solve(const Mat& H, const Mat& W0, double t,
                             const Tolerances& tol = {});

/// Right-hand side H21 + H22 W - W H11 - W H12 W of the Riccati equation
/// driven by H.
Mat rde_rhs(const Mat& H, const Mat& W);

/// Minima of a relative singular value profile sampled on a uniform grid,
/// refined by golden-section search. Grid evaluations run in parallel.
SingularTimeList scan_singular(const std::function<double(double)>& sigma,
                               double t0, double t1, int grid,
                               const ScanOptions& opts = {});

/// Singular times of Q(t) for [Q; P] = e^{H t} [I; W0].
SingularTimeList singular_times(const Mat& H, const Mat& W0, double t0,
                                double t1, int grid = 2001,
                                const ScanOptions& opts = {});
SingularTimeList singular_times(const Propagator& prop, const Mat& W0, double t0,
                                double t1, int grid = 2001,
                                const ScanOptions& opts = {});

enum class FlowFactor { kQ, kQstar };

/// Singular times of the extended solution in flow time, tracked through Q
/// (the S2 flow) or Qstar (the star flow).
SingularTimeList singular_times(const FlowProblem& problem, FlowFactor which,
                                double t0, double t1, int grid = 2001,
                                const ScanOptions& opts = {});

/// The extended solution X(t) in flow time; X(1) = X1.
FlowSample extended_X(const FlowProblem& problem, double t,
                      const Tolerances& tol = {});

struct FlowPairResult {
  SymplecticPair pair;
  double res_U0 = 0.0;    // |M(t) U0|
  double res_Uinf = 0.0;  // |L(t) Uinf|
  double res_U1 = 0.0;    // |M(t) U1 - L(t) U1 e^{Hhat t}|
  /// |M(t)| + |L(t)|, for relative comparisons.
  double scale = 0.0;
};

/// Throws PoleError when X(t) blows up.
FlowPairResult flow_pair(const FlowProblem& problem, double t,
                         const Tolerances& tol = {});

struct LinearSystemResult {
  HermitianBlock X;
  /// sigma_max / sigma_min of the coefficient matrix.
  double condition = 0.0;
};

/// Solves the eigenvector- and structure-preserving linear system for X(t)
/// directly. Throws NoSolution when the coefficient matrix is singular.
LinearSystemResult crosscheck_linear_system(const FlowProblem& problem,
                                            double t,
                                            const Tolerances& tol = {});

struct DoublingRow {
  int k = 0;
  double t = 0.0;
  /// Blockwise relative differences X11, X12, X21, X22; empty on failure.
  std::optional<std::array<double, 4>> rel_diff;
  std::string status;  // "ok", "blowup" or "breakdown"
};

/// Compares SDA iterates with the extended solution at t = 2^{k-1}.
std::vector<DoublingRow> sample_doubling(const FlowProblem& problem, int kmax,
                                         const Tolerances& tol = {});

/// Relative difference used by sample_doubling:
/// |A - B| / max(|A|, |B|), or 0 when both vanish.
double block_rel_diff(const Mat& A, const Mat& B);

}  // namespace sympflow
