#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sympflow/flow.hpp"
#include "sympflow/hjcf.hpp"
#include "sympflow/io.hpp"
#include "sympflow/linalg.hpp"
#include "sympflow/pairs.hpp"

namespace sympflow {

enum class Direction { kPlus, kMinus };

std::string to_string(Direction d);
std::string to_string(BlockKind k);

/// The four constants of a coupled (c or d) block:
/// f_u = (-1)^m (w - i beta) / 2,    g_u = (-1)^n (w + i beta) / 2,
/// f_v = (-1)^m (i beta w + 1) / 2,  g_v = (-1)^n (1 - i beta w) / 2,
/// where w is the real diagonal coupling of the block.
struct FgConstants {
  cd f_u, f_v, g_u, g_v;
};

FgConstants fg_constants(double w, int beta, int m, int n);

/// Quasi-periodic orbit of a single coupled block. With
/// U1(t) = U1 + e^{i theta t} zeta1 e_n^H (and likewise U2(t)),
///   W_inf(t)      = U2(t) U1(t)^{-1}
///                 = U2 U1^{-1} + e^{i theta t} / (1 + e^{i theta t} c) K_W,
///   Q_inf^{-1}(t) = e^{-i gamma t} / (1 + e^{i theta t} c) K_Q.
/// A c block is the case theta = 0, zeta = 0.
struct Orbit {
  Mat U1, U2;
  Vec zeta1, zeta2;
  double theta = 0.0;
  double gamma = 0.0;
  cd c;
  Mat K_W, K_Q;
  FgConstants fg;
  /// Last entry of [U1 | u1]^{-1} v1; empty when [U1 | u1] is singular.
  std::optional<cd> z12;
  double sigma_min_Uu1 = 0.0;

  Mat U1_at(double t) const;
  Mat U2_at(double t) const;
  /// 1 + e^{i theta t} c.
  cd denominator(double t) const;
};

enum class RateKind { kExponential, kAlgebraic };

struct ElementaryPrediction {
  BlockKind kind = BlockKind::kR;
  Direction direction = Direction::kPlus;
  std::optional<Mat> limit_plus;
  std::optional<Mat> limit_minus;
  /// Exponential: |W(t) - limit| = O(e^{-exponent |t|} |t|^poly_degree).
  /// Algebraic: O(|t|^{-1}).
  RateKind rate = RateKind::kAlgebraic;
  double exponent = 0.0;
  int poly_degree = 0;
  std::optional<Orbit> orbit;
};

/// Prediction for a spec with exactly one block. Throws HypothesisError
/// naming the singular matrix when an invertibility hypothesis fails.
ElementaryPrediction elementary_limit(BlockKind kind, const JordanSpec& spec,
                                      const Mat& S, const Mat& W0,
                                      Direction direction,
                                      const Tolerances& tol = {});

/// (W_inf(t), Q_inf^{-1}(t)).
struct OrbitValue {
  Mat W;
  Mat Q_inv;
};

/// Throws UsageError without an orbit and PoleError when
/// |1 + e^{i theta t} c| <= pole_tol.
OrbitValue orbit_eval(const ElementaryPrediction& pred, double t,
                      double pole_tol = 1e-12);

struct BlowupPeriod {
  double period = 0.0;
  /// First singular time of U1(t) in [0, period).
  double t_star = 0.0;
};

/// Empty when theta = 0. Throws HypothesisError when [U1 | u1] is singular.
std::optional<BlowupPeriod> blowup_period(const ElementaryPrediction& pred);

/// Time-dependent diagonals of the general prediction, one entry per coupled
/// block.
struct SigmaDiagonals {
  Vec omega11, omega12, omega21, omega22;
  Vec gamma;  // (-1)^m e^{i gamma t}
  Vec delta;  // (-1)^n e^{i delta t}
};

/// Limit data for an arbitrary spec. Columns of U1, U2 are ordered as
/// [r (first or second half by direction), e, coupled blocks without their
/// last column, one combined column per coupled block]. Blocks follow the
/// spec's index map.
struct GeneralPrediction {
  Direction direction = Direction::kPlus;
  int mu = 0;
  Mat U1, U2;
  /// Last first-half and second-half columns of each coupled block, split
  /// into top (1) and bottom (2) halves; n x mu each.
  Mat Uu1, Uu2, Uv1, Uv2;
  /// Couplings between the last indices of the coupled blocks (mu x mu).
  Mat Wcd;
  /// Columns of Z_1 at the last indices of the coupled blocks (n x mu).
  Mat Zcd;
  std::vector<FgConstants> fg;
  std::vector<double> gamma, delta;
  std::vector<int> beta, m, n;
  /// sigma_min of the matrix behind the direction's assumption.
  double assumption_sigma = 0.0;

  int half_dim() const { return static_cast<int>(U1.rows()); }
  /// U2 U1^{-1}; the limit of W(t) when mu = 0.
  Mat constant_limit() const;
  SigmaDiagonals sigmas(double t) const;
  /// Delta U^{cd}_{1,2}(t), n x mu.
  Mat dU1(double t) const;
  Mat dU2(double t) const;
  Mat U1_at(double t) const;
  Mat U2_at(double t) const;
  /// Throws PoleError when U1(t) is numerically singular.
  Mat W_inf(double t, double rank_tol = 1e-12) const;
  Mat Q_inf_inv(double t, double rank_tol = 1e-12) const;
  /// Both of the above from one factorization of U1(t).
  OrbitValue evaluate(double t, double rank_tol = 1e-12) const;
};

/// Throws AssumptionError when the direction's assumption fails and
/// HypothesisError when U1 is singular.
GeneralPrediction general_limit(const JordanSpec& spec, const Mat& S,
                                const Mat& W0, Direction direction,
                                const Tolerances& tol = {});

enum class Verdict { kQuadratic, kLinear, kOscillatory };

std::string to_string(Verdict v);

struct ConvergenceClass {
  Verdict verdict = Verdict::kQuadratic;
  /// Quadratic: min Re over the off-axis eigenvalues. Linear: 1/2.
  /// Oscillatory: mu, the bound on the rank of the correction terms.
  double rate = 0.0;
  /// Limits of X22^k (already negated) and X11^k; present when a similarity
  /// and an initial block were supplied.
  std::optional<Mat> limit_X22;
  std::optional<Mat> limit_X11;
  /// Orbit data behind the limits when mu > 0.
  std::optional<GeneralPrediction> minus, plus;
  /// Set by the eigenvalue heuristic when imaginary-axis clusters are
  /// closer than 1e-6 or a rank decision was marginal.
  bool low_confidence = false;
  std::vector<std::string> notes;
};

/// Verdict from the block structure alone.
ConvergenceClass sda_class(const JordanSpec& spec);

/// Verdict and limits for the doubling iteration whose flow generator is
/// S J S^{-1}, with initial block X1 in the class (S1, S2). Throws
/// AssumptionError when the doubling assumption fails.
ConvergenceClass sda_class(const JordanSpec& spec, const Mat& S,
                           const PairClass& cls, const HermitianBlock& X1,
                           const Tolerances& tol = {});

/// Verdict from the eigenvalues of gen.H with a multiplicity heuristic.
ConvergenceClass sda_class(const FlowGenerator& gen, const Tolerances& tol = {});

struct ResidualRow {
  double t = 0.0;
  double err_W = 0.0;
  double err_Qinv = 0.0;
  double sigma_min_U1 = 0.0;
  /// Frobenius norms of the flow and of the prediction; infinite at a pole.
  double norm_W = 0.0;
  double norm_W_inf = 0.0;
  double norm_Qinv = 0.0;
  double norm_Qinv_inf = 0.0;
  /// True when either the flow or the prediction is at a pole; the errors
  /// are then infinite.
  bool blowup = false;
};

/// |W(t) - W_inf(t)|_F, |Q(t)^{-1} - Q_inf^{-1}(t)|_F and sigma_min(U1(t))
/// on a uniform grid, evaluated in parallel. prop must generate S J S^{-1}.
std::vector<ResidualRow> residual_scan(const GeneralPrediction& pred,
                                       const Propagator& prop, const Mat& W0,
                                       double t0, double t1, int grid);

/// Least-squares slope of log y against log |x|.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

json prediction_to_json(const ElementaryPrediction& pred);
json prediction_to_json(const GeneralPrediction& pred);
json class_to_json(const ConvergenceClass& cls);

}  // namespace sympflow
