#include "sympflow/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sympflow/errors.hpp"
#include "sympflow/parallel.hpp"

namespace sympflow {

namespace {

double Sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

std::string Num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// Inverse of A, or HypothesisError naming A when it is numerically singular.
Mat InverseOrHypothesis(const Mat& A, double rank_tol, const std::string& name) {
  const double smax = largest_singular(A);
  const double smin = smallest_singular(A);
  if (!(smin > rank_tol * smax)) {
    throw HypothesisError(name + " is singular (sigma_min = " + Num(smin) + ")");
  }
  return A.partialPivLu().inverse();
}

// [W1; W2] = S^{-1} [I; W0].
std::pair<Mat, Mat> InitialCoordinates(const Mat& S, const Mat& W0) {
  const Eigen::Index n = W0.rows();
  if (S.rows() != 2 * n || S.cols() != 2 * n || W0.cols() != n) {
    throw DimensionError("asymptotics: S must be 2n x 2n and W0 n x n");
  }
  Mat Y(2 * n, n);
  Y << Mat::Identity(n, n), W0;
  const Mat W = S.partialPivLu().solve(Y);
  return {W.topRows(n), W.bottomRows(n)};
}

struct CoupledParams {
  double gamma, delta;
  int beta, m, n;
};

CoupledParams Coupled(const JordanSpec& spec, const BlockRange& br) {
  if (br.kind == BlockKind::kC) {
    const CBlock& b = spec.c[br.index];
    return {b.eta, b.eta, b.beta, b.m, b.n};
  }
  const DBlock& b = spec.d[br.index];
  return {b.gamma, b.delta, b.beta, b.s, b.t};
}

Mat Columns(const Mat& A, const std::vector<int>& idx) {
  Mat out(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = A.col(idx[j]);
  return out;
}

json Complex(cd z) { return json::array({z.real(), z.imag()}); }

}  // namespace

std::string to_string(Direction d) {
  return d == Direction::kPlus ? "plus" : "minus";
}

std::string to_string(BlockKind k) {
  switch (k) {
    case BlockKind::kR: return "r";
    case BlockKind::kE: return "e";
    case BlockKind::kC: return "c";
    case BlockKind::kD: return "d";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kQuadratic: return "quadratic";
    case Verdict::kLinear: return "linear";
    case Verdict::kOscillatory: return "oscillatory";
  }
  return "?";
}

FgConstants fg_constants(double w, int beta, int m, int n) {
  const cd ib = kI * static_cast<double>(beta);
  FgConstants fg;
  fg.f_u = 0.5 * Sign(m) * (w - ib);
  fg.g_u = 0.5 * Sign(n) * (w + ib);
  fg.f_v = 0.5 * Sign(m) * (ib * w + 1.0);
  fg.g_v = 0.5 * Sign(n) * (1.0 - ib * w);
  return fg;
}

// ---------------------------------------------------------------------------
// Elementary blocks.

Mat Orbit::U1_at(double t) const {
  Mat U = U1;
  U.col(U.cols() - 1) += std::exp(kI * (theta * t)) * zeta1;
  return U;
}

Mat Orbit::U2_at(double t) const {
  Mat U = U2;
  U.col(U.cols() - 1) += std::exp(kI * (theta * t)) * zeta2;
  return U;
}

cd Orbit::denominator(double t) const {
  return 1.0 + std::exp(kI * (theta * t)) * c;
}

ElementaryPrediction elementary_limit(BlockKind kind, const JordanSpec& spec,
                                      const Mat& S, const Mat& W0,
                                      Direction direction,
                                      const Tolerances& tol) {
  spec.Validate();
  const std::vector<BlockRange> map = spec.index_map();
  if (map.size() != 1) {
    throw UsageError("elementary_limit: spec must contain exactly one block");
  }
  if (map[0].kind != kind) {
    throw UsageError("elementary_limit: requested case " + to_string(kind) +
                     " but the spec holds a " + to_string(map[0].kind) +
                     " block");
  }
  const int n = spec.half_dim();
  const auto [W1, W2] = InitialCoordinates(S, W0);
  const Mat U1 = S.topLeftCorner(n, n);
  const Mat U2 = S.bottomLeftCorner(n, n);
  const Mat V1 = S.topRightCorner(n, n);
  const Mat V2 = S.bottomRightCorner(n, n);
  const double rt = tol.rank_tol;

  ElementaryPrediction pred;
  pred.kind = kind;
  pred.direction = direction;

  switch (kind) {
    case BlockKind::kR: {
      const RBlock& b = spec.r[0];
      pred.rate = RateKind::kExponential;
      pred.exponent = 2.0 * b.lambda.real();
      pred.poly_degree = 2 * (b.size - 1);
      if (direction == Direction::kPlus) {
        const Mat U1inv = InverseOrHypothesis(U1, rt, "U1");
        InverseOrHypothesis(W1, rt, "W1");
        pred.limit_plus = hermitian_part(U2 * U1inv);
      } else {
        const Mat V1inv = InverseOrHypothesis(V1, rt, "V1");
        InverseOrHypothesis(W2, rt, "W2");
        pred.limit_minus = hermitian_part(V2 * V1inv);
      }
      return pred;
    }
    case BlockKind::kE: {
      const Mat U1inv = InverseOrHypothesis(U1, rt, "U1");
      InverseOrHypothesis(W2, rt, "W2");
      const Mat L = hermitian_part(U2 * U1inv);
      pred.limit_plus = L;
      pred.limit_minus = L;
      return pred;
    }
    case BlockKind::kC:
    case BlockKind::kD:
      break;
  }

  const CoupledParams p = Coupled(spec, map[0]);
  const Mat W2inv = InverseOrHypothesis(W2, rt, "W2");
  const Mat Wb = W1 * W2inv;
  const double w = Wb(n - 1, n - 1).real();
  const FgConstants fg = fg_constants(w, p.beta, p.m, p.n);

  const Vec u1 = U1.col(n - 1), u2 = U2.col(n - 1);
  const Vec v1 = V1.col(n - 1), v2 = V2.col(n - 1);
  Orbit orb;
  orb.fg = fg;
  orb.gamma = p.gamma;
  orb.U1 = U1;
  orb.U2 = U2;
  const bool is_c = kind == BlockKind::kC;
  if (is_c) {
    orb.U1.col(n - 1) = (fg.f_u + fg.g_u) * u1 + (fg.f_v + fg.g_v) * v1;
    orb.U2.col(n - 1) = (fg.f_u + fg.g_u) * u2 + (fg.f_v + fg.g_v) * v2;
    orb.zeta1 = Vec::Zero(n);
    orb.zeta2 = Vec::Zero(n);
    orb.theta = 0.0;
  } else {
    orb.U1.col(n - 1) = fg.f_u * u1 + fg.f_v * v1;
    orb.U2.col(n - 1) = fg.f_u * u2 + fg.f_v * v2;
    orb.zeta1 = fg.g_u * u1 + fg.g_v * v1;
    orb.zeta2 = fg.g_u * u2 + fg.g_v * v2;
    orb.theta = p.delta - p.gamma;
  }
  const Mat Ub1inv = InverseOrHypothesis(orb.U1, rt, is_c ? "U1,0" : "bold U1");
  const Mat L = orb.U2 * Ub1inv;
  const Eigen::RowVectorXcd en_Uinv = Ub1inv.row(n - 1);
  orb.c = (en_Uinv * orb.zeta1)(0);
  orb.K_W = (orb.zeta2 - L * orb.zeta1) * en_Uinv;
  orb.K_Q = W2inv.col(n - 1) * en_Uinv;

  orb.sigma_min_Uu1 = smallest_singular(U1);
  if (orb.sigma_min_Uu1 > rt * largest_singular(U1)) {
    const Vec z = U1.partialPivLu().solve(v1);
    orb.z12 = z(n - 1);
  }
  if (is_c) {
    pred.limit_plus = hermitian_part(L);
    pred.limit_minus = pred.limit_plus;
  }
  pred.rate = RateKind::kAlgebraic;
  pred.orbit = std::move(orb);
  return pred;
}

OrbitValue orbit_eval(const ElementaryPrediction& pred, double t,
                      double pole_tol) {
  if (!pred.orbit) throw UsageError("orbit_eval: prediction has no orbit");
  const Orbit& o = *pred.orbit;
  const cd den = o.denominator(t);
  if (std::abs(den) <= pole_tol) {
    throw PoleError("orbit_eval: |1 + e^{i theta t} c| = " +
                    Num(std::abs(den)) + " at t = " + Num(t));
  }
  const Mat L = o.U2 * o.U1.partialPivLu().inverse();
  const cd e = std::exp(kI * (o.theta * t));
  OrbitValue v;
  v.W = L + (e / den) * o.K_W;
  v.Q_inv = (std::exp(-kI * (o.gamma * t)) / den) * o.K_Q;
  return v;
}

std::optional<BlowupPeriod> blowup_period(const ElementaryPrediction& pred) {
  if (!pred.orbit) throw UsageError("blowup_period: prediction has no orbit");
  const Orbit& o = *pred.orbit;
  if (!o.z12) {
    throw HypothesisError("[U1 | u1] is singular (sigma_min = " +
                          Num(o.sigma_min_Uu1) + ")");
  }
  if (o.theta == 0.0) return std::nullopt;
  // The last column of U1(t) is a multiple of u1 modulo span U1 with factor
  // a + b e^{i theta t}; a and b have equal modulus since z12 is real.
  const double z = o.z12->real();
  const cd a = o.fg.f_u + z * o.fg.f_v;
  const cd b = o.fg.g_u + z * o.fg.g_v;
  const double period = 2.0 * std::numbers::pi / std::abs(o.theta);
  double ts = std::arg(-a / b) / o.theta;
  ts = std::fmod(ts, period);
  if (ts < 0) ts += period;
  return BlowupPeriod{period, ts};
}

// ---------------------------------------------------------------------------
// General spec.

Mat GeneralPrediction::constant_limit() const {
  return U2 * U1.partialPivLu().inverse();
}

SigmaDiagonals GeneralPrediction::sigmas(double t) const {
  SigmaDiagonals s;
  s.omega11.resize(mu);
  s.omega12.resize(mu);
  s.omega21.resize(mu);
  s.omega22.resize(mu);
  s.gamma.resize(mu);
  s.delta.resize(mu);
  for (int j = 0; j < mu; ++j) {
    const cd eg = Sign(m[j]) * std::exp(kI * (gamma[j] * t));
    const cd ed = Sign(n[j]) * std::exp(kI * (delta[j] * t));
    const cd ib = kI * static_cast<double>(beta[j]);
    s.gamma(j) = eg;
    s.delta(j) = ed;
    s.omega11(j) = 0.5 * (eg + ed);
    s.omega22(j) = s.omega11(j);
    s.omega12(j) = -0.5 * ib * (eg - ed);
    s.omega21(j) = 0.5 * ib * (eg - ed);
  }
  return s;
}

namespace {

Mat DeltaU(const Mat& Uu, const Mat& Uv, const Mat& Wcd,
           const std::vector<int>& beta, const SigmaDiagonals& s) {
  const Eigen::Index mu = Wcd.rows();
  Vec b(mu);
  for (Eigen::Index j = 0; j < mu; ++j) b(j) = static_cast<double>(beta[j]);
  const Vec ginv = s.gamma.cwiseInverse();
  const Mat lead = Uu * s.omega11.asDiagonal() + Uv * s.omega21.asDiagonal();
  const Mat tail = 0.5 * (Uv + kI * (Uu * b.asDiagonal()));
  return lead * Wcd * ginv.asDiagonal() +
         tail * s.delta.cwiseProduct(ginv).asDiagonal();
}

}  // namespace

Mat GeneralPrediction::dU1(double t) const {
  return DeltaU(Uu1, Uv1, Wcd, beta, sigmas(t));
}

Mat GeneralPrediction::dU2(double t) const {
  return DeltaU(Uu2, Uv2, Wcd, beta, sigmas(t));
}

Mat GeneralPrediction::U1_at(double t) const {
  Mat U = U1;
  if (mu > 0) U.rightCols(mu) += dU1(t);
  return U;
}

Mat GeneralPrediction::U2_at(double t) const {
  Mat U = U2;
  if (mu > 0) U.rightCols(mu) += dU2(t);
  return U;
}

namespace {

Mat InverseOrPole(const Mat& A, double rank_tol, double t) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  if (sv.size() > 0 && !(sv(sv.size() - 1) > rank_tol * sv(0))) {
    throw PoleError("U1(t) is singular at t = " + Num(t));
  }
  return A.partialPivLu().inverse();
}

}  // namespace

Mat GeneralPrediction::W_inf(double t, double rank_tol) const {
  return evaluate(t, rank_tol).W;
}

Mat GeneralPrediction::Q_inf_inv(double t, double rank_tol) const {
  return evaluate(t, rank_tol).Q_inv;
}

OrbitValue GeneralPrediction::evaluate(double t, double rank_tol) const {
  const int nn = half_dim();
  const Mat Uinv = InverseOrPole(U1_at(t), rank_tol, t);
  OrbitValue v;
  v.W = U2_at(t) * Uinv;
  if (mu == 0) {
    v.Q_inv = Mat::Zero(nn, nn);
  } else {
    const Vec ginv = sigmas(t).gamma.cwiseInverse();
    v.Q_inv = Zcd * ginv.asDiagonal() * Uinv.bottomRows(mu);
  }
  return v;
}

GeneralPrediction general_limit(const JordanSpec& spec, const Mat& S,
                                const Mat& W0, Direction direction,
                                const Tolerances& tol) {
  spec.Validate();
  const int n = spec.half_dim();
  const auto [W1, W2] = InitialCoordinates(S, W0);
  const std::vector<BlockRange> map = spec.index_map();

  int nr = 0;
  std::vector<int> r_cols, e_cols, hat_cols, last;
  std::vector<CoupledParams> params;
  for (const BlockRange& br : map) {
    for (int i = 0; i < br.size; ++i) {
      const int idx = br.offset + i;
      switch (br.kind) {
        case BlockKind::kR:
          r_cols.push_back(idx);
          ++nr;
          break;
        case BlockKind::kE:
          e_cols.push_back(idx);
          break;
        default:
          if (i + 1 < br.size) hat_cols.push_back(idx);
          break;
      }
    }
    if (br.kind == BlockKind::kC || br.kind == BlockKind::kD) {
      last.push_back(br.offset + br.size - 1);
      params.push_back(Coupled(spec, br));
    }
  }

  // Z_1^{-1}: rows of the r part from W1 for t -> +inf, all of W2 for -inf.
  Mat Zinv = W2;
  if (direction == Direction::kPlus) Zinv.topRows(nr) = W1.topRows(nr);
  const double zmax = largest_singular(Zinv);
  const double zmin = smallest_singular(Zinv);
  const std::string aname = direction == Direction::kPlus ? "A+" : "A-";
  if (!(zmin > tol.rank_tol * zmax)) {
    throw AssumptionError("assumption " + aname +
                          " fails: sigma_min = " + Num(zmin));
  }
  const Mat Z1 = Zinv.partialPivLu().inverse();
  const Mat Wb = W1 * Z1;

  GeneralPrediction g;
  g.direction = direction;
  g.assumption_sigma = zmin;
  g.mu = static_cast<int>(last.size());
  const int mu = g.mu;

  std::vector<int> u_last, v_last;
  for (int L : last) {
    u_last.push_back(L);
    v_last.push_back(n + L);
  }
  const Mat Uu = Columns(S, u_last);
  const Mat Uv = Columns(S, v_last);
  g.Uu1 = Uu.topRows(n);
  g.Uu2 = Uu.bottomRows(n);
  g.Uv1 = Uv.topRows(n);
  g.Uv2 = Uv.bottomRows(n);

  g.Wcd.resize(mu, mu);
  g.Zcd.resize(n, mu);
  for (int j = 0; j < mu; ++j) {
    for (int l = 0; l < mu; ++l) g.Wcd(j, l) = Wb(last[j], last[l]);
    g.Zcd.col(j) = Z1.col(last[j]);
    const CoupledParams& p = params[j];
    g.gamma.push_back(p.gamma);
    g.delta.push_back(p.delta);
    g.beta.push_back(p.beta);
    g.m.push_back(p.m);
    g.n.push_back(p.n);
    g.fg.push_back(fg_constants(g.Wcd(j, j).real(), p.beta, p.m, p.n));
  }

  std::vector<int> first = r_cols;
  if (direction == Direction::kMinus) {
    for (int& c : first) c += n;
  }
  first.insert(first.end(), e_cols.begin(), e_cols.end());
  first.insert(first.end(), hat_cols.begin(), hat_cols.end());
  Mat U(2 * n, n);
  const Eigen::Index lead = static_cast<Eigen::Index>(first.size());
  U.leftCols(lead) = Columns(S, first);
  if (mu > 0) {
    Vec b(mu);
    for (int j = 0; j < mu; ++j) b(j) = static_cast<double>(g.beta[j]);
    U.rightCols(mu) = 0.5 * (Uv - kI * (Uu * b.asDiagonal()));
  }
  g.U1 = U.topRows(n);
  g.U2 = U.bottomRows(n);
  InverseOrHypothesis(g.U1, tol.rank_tol,
                      direction == Direction::kPlus ? "U1,+" : "U1,-");
  return g;
}

// ---------------------------------------------------------------------------
// Doubling convergence class.

ConvergenceClass sda_class(const JordanSpec& spec) {
  spec.Validate();
  ConvergenceClass cls;
  const int mu = spec.num_cd();
  if (mu > 0) {
    cls.verdict = Verdict::kOscillatory;
    cls.rate = mu;
  } else if (!spec.e.empty()) {
    cls.verdict = Verdict::kLinear;
    cls.rate = 0.5;
  } else {
    cls.verdict = Verdict::kQuadratic;
    double r = INFINITY;
    for (const auto& b : spec.r) r = std::min(r, b.lambda.real());
    cls.rate = r;
  }
  return cls;
}

ConvergenceClass sda_class(const JordanSpec& spec, const Mat& S,
                           const PairClass& pc, const HermitianBlock& X1,
                           const Tolerances& tol) {
  ConvergenceClass cls = sda_class(spec);
  const int n = spec.half_dim();
  if (pc.half_dim() != n || X1.half_dim() != n) {
    throw DimensionError("sda_class: class, X1 and spec sizes disagree");
  }
  const Mat Sm = pc.S2 * S;
  const Mat Sp = make_J(n).adjoint() * pc.S1 * S;
  GeneralPrediction minus, plus;
  try {
    minus = general_limit(spec, Sm, -X1.X22, Direction::kMinus, tol);
    plus = general_limit(spec, Sp, X1.X11, Direction::kPlus, tol);
  } catch (const AssumptionError& e) {
    throw AssumptionError(std::string("doubling assumption: ") + e.what());
  }
  // With only c blocks among the coupled ones U(t) is constant, so the
  // limits include the coupled columns.
  bool all_c = spec.d.empty();
  if (all_c) {
    cls.limit_X22 = -hermitian_part(minus.W_inf(0.0));
    cls.limit_X11 = hermitian_part(plus.W_inf(0.0));
  } else {
    cls.limit_X22 = -hermitian_part(minus.constant_limit());
    cls.limit_X11 = hermitian_part(plus.constant_limit());
    cls.notes.push_back(
        "d blocks present: limits are the constant parts of quasi-periodic "
        "orbits");
  }
  if (minus.mu > 0) {
    cls.minus = std::move(minus);
    cls.plus = std::move(plus);
  }
  return cls;
}

ConvergenceClass sda_class(const FlowGenerator& gen, const Tolerances& tol) {
  const Mat& H = gen.H;
  const Eigen::Index dim = H.rows();
  if (dim == 0 || H.cols() != dim || dim % 2 != 0) {
    throw DimensionError("sda_class: generator must be 2n x 2n");
  }
  Eigen::ComplexEigenSolver<Mat> es(H, false);
  if (es.info() != Eigen::Success) {
    throw NumericalBreakdown("sda_class: eigenvalue computation failed");
  }
  const Vec ev = es.eigenvalues();
  (void)tol;
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  // Defective eigenvalues split under rounding by about eps^{1/k}, so
  // clusters are formed with a loose radius and then examined.
  const double cluster_tol = 1e-4 * scale;
  const double tight = 1e-6 * scale;

  std::vector<int> label(dim, -1);
  int groups = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (label[i] >= 0) continue;
    label[i] = groups;
    std::vector<Eigen::Index> stack{i};
    while (!stack.empty()) {
      const Eigen::Index a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < dim; ++b) {
        if (label[b] < 0 && std::abs(ev(a) - ev(b)) <= cluster_tol) {
          label[b] = groups;
          stack.push_back(b);
        }
      }
    }
    ++groups;
  }

  ConvergenceClass cls;
  double r = INFINITY;
  int odd_blocks = 0;
  bool imaginary = false;
  for (int gi = 0; gi < groups; ++gi) {
    cd center = 0;
    int count = 0;
    double spread = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (label[i] != gi) continue;
      center += ev(i);
      ++count;
    }
    center /= static_cast<double>(count);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (label[i] == gi) spread = std::max(spread, std::abs(ev(i) - center));
    }
    if (std::abs(center.real()) > cluster_tol) {
      if (center.real() > 0) r = std::min(r, center.real());
      continue;
    }
    imaginary = true;
    if (count > 1 && spread > tight) cls.low_confidence = true;
    // Jordan block sizes from the rank sequence of (H - center I)^j.
    const Mat N = H - center * Mat::Identity(dim, dim);
    std::vector<int> ranks{static_cast<int>(dim)};
    Mat P = Mat::Identity(dim, dim);
    // Singular values are measured against |N|^j so that a power which is
    // zero up to rounding does not look full rank.
    const double norm_n =
        std::max(Eigen::JacobiSVD<Mat>(N).singularValues()(0), 1e-300);
    for (int j = 1; j <= count; ++j) {
      P = P * N;
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(P).singularValues();
      const double smax = std::pow(norm_n, j);
      const double cut = 1e-6 * smax;
      int rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k) {
        const double rel = sv(k) / smax;
        if (sv(k) > cut) ++rank;
        if (rel > 1e-10 && rel < 1e-3) cls.low_confidence = true;
      }
      ranks.push_back(rank);
    }
    ranks.push_back(ranks.back());
    // Blocks of size >= j: ranks[j-1] - ranks[j]; exactly j: difference of
    // consecutive counts.
    for (int j = 1; j <= count; ++j) {
      const int ge_j = ranks[j - 1] - ranks[j];
      const int ge_next = (j + 1 < static_cast<int>(ranks.size()))
                              ? ranks[j] - ranks[j + 1]
                              : 0;
      const int exactly = ge_j - ge_next;
      if (j % 2 == 1 && exactly > 0) odd_blocks += exactly;
    }
  }
  if (odd_blocks > 0) {
    cls.verdict = Verdict::kOscillatory;
    cls.rate = std::max(1, odd_blocks / 2);
  } else if (imaginary) {
    cls.verdict = Verdict::kLinear;
    cls.rate = 0.5;
  } else {
    cls.verdict = Verdict::kQuadratic;
    cls.rate = r;
  }
  if (cls.low_confidence) {
    cls.notes.push_back(
        "imaginary-axis structure is close to a decision threshold");
  }
  return cls;
}

// ---------------------------------------------------------------------------
// Residual scans and serialization.

std::vector<ResidualRow> residual_scan(const GeneralPrediction& pred,
                                       const Propagator& prop, const Mat& W0,
                                       double t0, double t1, int grid) {
  if (grid < 2) throw UsageError("residual_scan: grid must be at least 2");
  if (!(t1 > t0)) throw UsageError("residual_scan: need t0 < t1");
  std::vector<ResidualRow> rows(grid);
  const double h = (t1 - t0) / (grid - 1);
  parallel_for(static_cast<std::size_t>(grid), [&](std::size_t i) {
    ResidualRow& row = rows[i];
    row.t = (i + 1 == static_cast<std::size_t>(grid)) ? t1 : t0 + h * i;
    const Mat U1t = pred.U1_at(row.t);
    row.sigma_min_U1 = smallest_singular(U1t);
    const Frame f = prop.frame(W0, row.t);
    const double inf = std::numeric_limits<double>::infinity();
    row.err_W = row.err_Qinv = inf;
    row.norm_W = row.norm_Qinv = inf;
    row.norm_W_inf = row.norm_Qinv_inf = inf;
    try {
      const OrbitValue v = pred.evaluate(row.t);
      const Mat& W_inf = v.W;
      const Mat& Qinv_inf = v.Q_inv;
      row.norm_W_inf = W_inf.norm();
      row.norm_Qinv_inf = Qinv_inf.norm();
      if (f.sigma_min() <= 1e-12) {
        row.blowup = true;
        return;
      }
      const auto lu = f.top().transpose().partialPivLu();
      const Mat W = lu.solve(f.bottom().transpose()).transpose();
      const Mat Qinv = lu.solve(f.R_inv.transpose()).transpose();
      row.norm_W = W.norm();
      row.norm_Qinv = Qinv.norm();
      row.err_W = (W - W_inf).norm();
      row.err_Qinv = (Qinv - Qinv_inf).norm();
    } catch (const PoleError&) {
      row.blowup = true;
    }
  });
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError("loglog_slope: need at least two paired samples");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(std::abs(x[i]));
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

json prediction_to_json(const ElementaryPrediction& pred) {
  json j;
  j["case"] = to_string(pred.kind);
  j["direction"] = to_string(pred.direction);
  if (pred.limit_plus) j["limit_plus"] = matrix_to_json(*pred.limit_plus);
  if (pred.limit_minus) j["limit_minus"] = matrix_to_json(*pred.limit_minus);
  j["rate"] = pred.rate == RateKind::kExponential ? "exponential" : "algebraic";
  if (pred.rate == RateKind::kExponential) {
    j["exponent"] = pred.exponent;
    j["poly_degree"] = pred.poly_degree;
  }
  if (pred.orbit) {
    const Orbit& o = *pred.orbit;
    json oj;
    oj["U1"] = matrix_to_json(o.U1);
    oj["U2"] = matrix_to_json(o.U2);
    oj["zeta1"] = matrix_to_json(o.zeta1);
    oj["zeta2"] = matrix_to_json(o.zeta2);
    oj["theta"] = o.theta;
    oj["gamma"] = o.gamma;
    oj["c"] = Complex(o.c);
    oj["K_W"] = matrix_to_json(o.K_W);
    oj["K_Q"] = matrix_to_json(o.K_Q);
    oj["fg"] = {{"f_u", Complex(o.fg.f_u)}, {"f_v", Complex(o.fg.f_v)},
                {"g_u", Complex(o.fg.g_u)}, {"g_v", Complex(o.fg.g_v)}};
    j["orbit"] = oj;
  }
  return j;
}

json prediction_to_json(const GeneralPrediction& pred) {
  json j;
  j["direction"] = to_string(pred.direction);
  j["mu"] = pred.mu;
  j["U1"] = matrix_to_json(pred.U1);
  j["U2"] = matrix_to_json(pred.U2);
  j["constant_limit"] = matrix_to_json(pred.constant_limit());
  j["W_cd"] = matrix_to_json(pred.Wcd);
  j["Z_cd"] = matrix_to_json(pred.Zcd);
  j["assumption_sigma"] = pred.assumption_sigma;
  json blocks = json::array();
  for (int k = 0; k < pred.mu; ++k) {
    const FgConstants& fg = pred.fg[k];
    blocks.push_back({{"gamma", pred.gamma[k]},
                      {"delta", pred.delta[k]},
                      {"beta", pred.beta[k]},
                      {"m", pred.m[k]},
                      {"n", pred.n[k]},
                      {"f_u", Complex(fg.f_u)},
                      {"f_v", Complex(fg.f_v)},
                      {"g_u", Complex(fg.g_u)},
                      {"g_v", Complex(fg.g_v)}});
  }
  j["blocks"] = blocks;
  return j;
}

json class_to_json(const ConvergenceClass& cls) {
  json j;
  j["verdict"] = to_string(cls.verdict);
  j["rate"] = cls.rate;
  if (cls.limit_X22) j["limit_X22"] = matrix_to_json(*cls.limit_X22);
  if (cls.limit_X11) j["limit_X11"] = matrix_to_json(*cls.limit_X11);
  j["low_confidence"] = cls.low_confidence;
  j["notes"] = cls.notes;
  return j;
}

}  // namespace sympflow
