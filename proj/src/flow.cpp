#include "sympflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "sympflow/errors.hpp"
#include "sympflow/parallel.hpp"

namespace sympflow {
namespace {

// Orthonormalizes Z = Y R and returns (Y, R).
std::pair<Mat, Mat> ThinQr(const Mat& Z) {
  const Eigen::Index n = Z.cols();
  Eigen::HouseholderQR<Mat> qr(Z);
  Mat Y = qr.householderQ() * Mat::Identity(Z.rows(), n);
  Mat R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  return {std::move(Y), std::move(R)};
}

// B X^{-1} through a solve with X^T.
Mat RightDivide(const Mat& B, const Mat& X) {
  return X.transpose().partialPivLu().solve(B.transpose()).transpose();
}

Mat SignFlip(int n) {
  Mat D = Mat::Identity(2 * n, 2 * n);
  D.bottomRightCorner(n, n) *= -1.0;
  return D;
}

// Golden-section minimization of f on [a, b].
std::pair<double, double> GoldenSection(const std::function<double(double)>& f,
                                        double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  const double ft = f(t);
  if (ft <= std::min(fc, fd)) return {t, ft};
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

double Frame::sigma_min() const {
  const Eigen::Index n = half_dim();
  if (n == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(top());
  return svd.singularValues()(n - 1);
}

Propagator::Propagator(Mat H) : H_(std::move(H)) {
  if (H_.rows() != H_.cols() || H_.rows() % 2 != 0) {
    throw DimensionError("Propagator: H must be 2n x 2n");
  }
}

Propagator::Propagator(Mat H, ExpFn exp_h, double max_step)
    : Propagator(std::move(H)) {
  if (!(max_step > 0)) throw UsageError("Propagator: max_step must be positive");
  exp_h_ = std::move(exp_h);
  max_step_ = max_step;
}

Frame Propagator::frame(const Mat& W0, double t) const {
  const Eigen::Index n = half_dim();
  if (W0.rows() != n || W0.cols() != n) {
    throw DimensionError("propagate: generator and W0 sizes disagree");
  }
  if (!std::isfinite(t)) throw UsageError("propagate: t must be finite");
  Mat Z(2 * n, n);
  Z << Mat::Identity(n, n), W0;
  auto [Y, R] = ThinQr(Z);
  // R_inv accumulates (R_k ... R_1)^{-1} = R_1^{-1} ... R_k^{-1}.
  Mat R_inv = R.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  auto apply = [&](const Mat& E) {
    // Very large factors are scaled down first so the QR norms stay finite;
    // the scale is folded back into R_inv.
    const double norm = E.norm();
    const double scale = norm > 1e100 ? 1.0 / norm : 1.0;
    auto [Yn, Rn] = ThinQr((scale * E) * Y);
    if (!Yn.allFinite()) throw OverflowError("propagator overflow");
    Y = std::move(Yn);
    R_inv = scale * Rn.transpose()
                        .triangularView<Eigen::Lower>()
                        .solve(R_inv.transpose())
                        .transpose();
  };
  if (exp_h_) {
    if (t != 0.0) {
      const int steps =
          std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_step_)));
      const Mat E = exp_h_(t / steps);
      for (int i = 0; i < steps; ++i) apply(E);
    }
  } else {
    const double reach = std::abs(t) * H_.norm();
    const int steps = static_cast<int>(std::ceil(reach));
    if (steps > 0) {
      const Mat E = (H_ * (t / steps)).exp();
      for (int i = 0; i < steps; ++i) apply(E);
    }
  }
  return {std::move(Y), std::move(R_inv)};
}

Mat FlowProblem::H2() const {
  const Mat D = SignFlip(half_dim());
  return -D * Htilde * D;
}

FlowProblem build_flow_problem(const PairClass& cls, const HermitianBlock& X1,
                               const Tolerances& tol) {
  cls.Validate(tol);
  FlowProblem p;
  p.cls = cls;
  p.X1 = X1;
  p.pair = to_pair(X1, cls);
  const Classification c = classify(p.pair, tol);
  if (!c.regular) throw NotRegularError("build_flow_problem: pair is singular");
  if (c.ind_inf == IndexClass::kTooHigh) {
    throw IndexTooHighError("build_flow_problem: index at infinity exceeds 1");
  }
  p.split = eigen_split(p.pair, tol);
  p.gen = build_generator(p.pair, p.split, tol);

  const int n = X1.half_dim();
  const Mat J = make_J(n);
  const Mat D = SignFlip(n);
  const Mat H2 = cls.S2 * p.gen.H * cls.S2.inverse();
  p.Htilde = hamiltonian_part(-D * H2 * D);
  p.Hstar = hamiltonian_part(J.adjoint() * cls.S1 * p.gen.H *
                             cls.S1.inverse() * J);
  p.prop_h2 = Propagator(p.H2());
  p.prop_hstar = Propagator(p.Hstar);
  return p;
}

RadonFactors propagate(const Propagator& prop, const Mat& W0, double t) {
  const Frame f = prop.frame(W0, t);
  const Eigen::Index n = f.half_dim();
  const Mat R = f.R_inv.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  return {f.top() * R, f.bottom() * R};
}

RadonFactors propagate(const Mat& H, const Mat& W0, double t) {
  return propagate(Propagator(H), W0, t);
}

std::optional<Mat> rde_solve(const Mat& H, const Mat& W0, double t,
                             const Tolerances& tol) {
  const Frame f = Propagator(H).frame(W0, t);
  if (f.sigma_min() <= tol.rank_tol) return std::nullopt;
  return RightDivide(f.bottom(), f.top());
}

Mat rde_rhs(const Mat& H, const Mat& W) {
  const Eigen::Index n = W.rows();
  const auto H11 = H.topLeftCorner(n, n);
  const auto H12 = H.topRightCorner(n, n);
  const auto H21 = H.bottomLeftCorner(n, n);
  const auto H22 = H.bottomRightCorner(n, n);
  return H21 + H22 * W - W * H11 - W * H12 * W;
}

SingularTimeList scan_singular(const std::function<double(double)>& sigma,
                               double t0, double t1, int grid,
                               const ScanOptions& opts) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw UsageError("singular time scan needs a finite range with t1 > t0");
  }
  if (grid < 2) throw UsageError("singular time scan needs grid >= 2");
  const double h = (t1 - t0) / (grid - 1);
  std::vector<double> ts(grid), vals(grid);
  for (int i = 0; i < grid; ++i) ts[i] = i + 1 == grid ? t1 : t0 + i * h;
  parallel_for(grid, [&](std::size_t i) { vals[i] = sigma(ts[i]); });

  std::vector<int> dips;
  for (int i = 0; i < grid; ++i) {
    const double left = i > 0 ? vals[i - 1] : INFINITY;
    const double right = i + 1 < grid ? vals[i + 1] : INFINITY;
    // Plateaus count once, at their left end.
    if (vals[i] <= opts.dip_threshold && vals[i] < left && vals[i] <= right) {
      dips.push_back(i);
    }
  }

  std::vector<std::optional<SingularTime>> refined(dips.size());
  std::vector<std::string> notes(dips.size());
  parallel_for(dips.size(), [&](std::size_t j) {
    const int i = dips[j];
    const double lo = ts[std::max(0, i - 1)];
    const double hi = ts[std::min(grid - 1, i + 1)];
    if (vals[i] == 0.0) {
      refined[j] = SingularTime{ts[i], lo, hi, 0.0};
      return;
    }
    const auto [t, v] = GoldenSection(sigma, lo, hi, opts.refine_tol);
    if (v <= opts.accept_tol) {
      refined[j] = SingularTime{t, lo, hi, v};
    } else if (v <= 1e3 * opts.accept_tol) {
      notes[j] = "unresolved dip in [" + std::to_string(lo) + ", " +
                 std::to_string(hi) + "] with sigma_min " + std::to_string(v) +
                 "; grid may be too coarse";
    }
  });

  SingularTimeList out;
  for (std::size_t j = 0; j < dips.size(); ++j) {
    if (!notes[j].empty()) out.warnings.push_back(notes[j]);
    if (!refined[j]) continue;
    if (!out.times.empty() &&
        refined[j]->t - out.times.back().t < 0.5 * h) {
      if (refined[j]->sigma_min < out.times.back().sigma_min) {
        out.times.back() = *refined[j];
      }
      continue;
    }
    out.times.push_back(*refined[j]);
  }
  return out;
}

SingularTimeList singular_times(const Propagator& prop, const Mat& W0,
                                double t0, double t1, int grid,
                                const ScanOptions& opts) {
  return scan_singular([&](double t) { return prop.frame(W0, t).sigma_min(); },
                       t0, t1, grid, opts);
}

SingularTimeList singular_times(const Mat& H, const Mat& W0, double t0,
                                double t1, int grid, const ScanOptions& opts) {
  return singular_times(Propagator(H), W0, t0, t1, grid, opts);
}

SingularTimeList singular_times(const FlowProblem& problem, FlowFactor which,
                                double t0, double t1, int grid,
                                const ScanOptions& opts) {
  if (which == FlowFactor::kQ) {
    const Mat W0 = -problem.X1.X22;
    return scan_singular(
        [&](double t) { return problem.prop_h2.frame(W0, 1.0 - t).sigma_min(); },
        t0, t1, grid, opts);
  }
  return scan_singular(
      [&](double t) {
        return problem.prop_hstar.frame(problem.X1.X11, t - 1.0).sigma_min();
      },
      t0, t1, grid, opts);
}

FlowSample extended_X(const FlowProblem& problem, double t,
                      const Tolerances& tol) {
  FlowSample s;
  s.t = t;
  const Eigen::Index n = problem.half_dim();
  const Frame f = problem.prop_h2.frame(-problem.X1.X22, 1.0 - t);
  const Frame g = problem.prop_hstar.frame(problem.X1.X11, t - 1.0);
  const Mat I = Mat::Identity(n, n);
  const Mat R = f.R_inv.triangularView<Eigen::Upper>().solve(I);
  const Mat R_star = g.R_inv.triangularView<Eigen::Upper>().solve(I);
  s.Q = f.top() * R;
  s.P = f.bottom() * R;
  s.Qstar = g.top() * R_star;
  s.Pstar = g.bottom() * R_star;
  s.sigma_min_Q = f.sigma_min();
  s.sigma_min_Qstar = g.sigma_min();
  if (s.sigma_min_Q <= tol.rank_tol || s.sigma_min_Qstar <= tol.rank_tol) {
    s.norm_Q_inv = INFINITY;
    return s;
  }
  // Q^{-1} = R^{-1} Y_top^{-1}.
  const Mat Q_inv = RightDivide(f.R_inv, f.top());
  const Mat Qstar_inv = RightDivide(g.R_inv, g.top());
  s.norm_Q_inv = largest_singular(Q_inv);
  if (t == 1.0) {
    s.X = problem.X1;
    return s;
  }
  HermitianBlock X;
  X.X22 = -RightDivide(f.bottom(), f.top());
  X.X12 = problem.X1.X12 * Q_inv;
  X.X11 = RightDivide(g.bottom(), g.top());
  X.X21 = problem.X1.X21 * Qstar_inv;
  s.X = std::move(X);
  return s;
}

FlowPairResult flow_pair(const FlowProblem& problem, double t,
                         const Tolerances& tol) {
  const FlowSample s = extended_X(problem, t, tol);
  if (s.blowup()) {
    throw PoleError("flow_pair: extended solution blows up at t = " +
                    std::to_string(t));
  }
  FlowPairResult r;
  r.pair = to_pair(*s.X, problem.cls);
  const EigenSplit& sp = problem.split;
  r.scale = r.pair.M.norm() + r.pair.L.norm();
  r.res_U0 = sp.ell > 0 ? (r.pair.M * sp.U0).norm() : 0.0;
  r.res_Uinf = sp.ell > 0 ? (r.pair.L * sp.Uinf).norm() : 0.0;
  if (sp.nhat > 0) {
    const Mat E = (problem.gen.Hhat * t).exp();
    r.res_U1 = (r.pair.M * sp.U1 - r.pair.L * sp.U1 * E).norm();
  }
  return r;
}

LinearSystemResult crosscheck_linear_system(const FlowProblem& problem,
                                            double t, const Tolerances& tol) {
  const int n = problem.half_dim();
  const EigenSplit& sp = problem.split;
  const int m2 = 2 * sp.nhat;
  const int ell = sp.ell;
  // R = e^{Hhat t} + E22 and Lm = I + E11 over the columns [U1, U0, Uinf].
  Mat R = Mat::Zero(2 * n, 2 * n);
  if (m2 > 0) R.topLeftCorner(m2, m2) = (problem.gen.Hhat * t).exp();
  R.bottomRightCorner(ell, ell).setIdentity();
  Mat Lm = Mat::Zero(2 * n, 2 * n);
  Lm.topLeftCorner(m2 + ell, m2 + ell).setIdentity();

  const Mat U = sp.U();
  const Mat V1 = problem.cls.S1 * U;
  const Mat V2 = problem.cls.S2 * U;
  Mat B(2 * n, 2 * n), C(2 * n, 2 * n);
  B << -V1.bottomRows(n) * R, V2.topRows(n) * Lm;
  C << V1.topRows(n) * R, -V2.bottomRows(n) * Lm;

  Eigen::JacobiSVD<Mat> svd(B);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= tol.rank_tol * sv(0)) {
    throw NoSolution("crosscheck_linear_system: coefficient matrix singular at t = " +
                     std::to_string(t));
  }
  LinearSystemResult out;
  out.condition = sv(0) / sv(sv.size() - 1);
  const Mat X = B.adjoint().partialPivLu().solve(C.adjoint()).adjoint();
  out.X = HermitianBlock::FromMatrix(X);
  return out;
}

double block_rel_diff(const Mat& A, const Mat& B) {
  const double scale = std::max(A.norm(), B.norm());
  if (scale == 0.0) return 0.0;
  return (A - B).norm() / scale;
}

std::vector<DoublingRow> sample_doubling(const FlowProblem& problem, int kmax,
                                         const Tolerances& tol) {
  if (kmax < 1) throw UsageError("sample_doubling: kmax must be >= 1");
  if (!problem.cls.is_identity_class() && !problem.cls.is_nme_class()) {
    throw UsageError("sample_doubling: class must be a doubling preset");
  }
  std::vector<DoublingRow> rows;
  std::optional<SdaState> state = state_from_block(problem.X1, problem.cls, tol);
  for (int k = 1; k <= kmax; ++k) {
    DoublingRow row;
    row.k = k;
    row.t = std::ldexp(1.0, k - 1);
    if (!state) {
      row.status = "breakdown";
      rows.push_back(row);
      continue;
    }
    const FlowSample s = extended_X(problem, row.t, tol);
    if (s.blowup()) {
      row.status = "blowup";
    } else {
      try {
        const HermitianBlock Xk = k == 1 ? problem.X1 : iterate_block(*state, tol);
        row.rel_diff = std::array<double, 4>{
            block_rel_diff(Xk.X11, s.X->X11), block_rel_diff(Xk.X12, s.X->X12),
            block_rel_diff(Xk.X21, s.X->X21), block_rel_diff(Xk.X22, s.X->X22)};
        row.status = "ok";
      } catch (const NotInClassError&) {
        row.status = "blowup";
      }
    }
    rows.push_back(row);
    try {
      if (auto* s1 = std::get_if<Sda1State>(&*state)) {
        state = sda1_step(*s1, tol);
      } else {
        state = sda2_step(std::get<Sda2State>(*state), tol);
      }
    } catch (const BreakdownError&) {
      state.reset();
    }
  }
  return rows;
}

}  // namespace sympflow
