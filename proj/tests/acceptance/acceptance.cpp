// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "../unit/pair_fixtures.hpp"
#include "sympflow/asymptotics.hpp"
#include "sympflow/errors.hpp"
#include "sympflow/examples.hpp"
#include "sympflow/flow.hpp"
#include "sympflow/hjcf.hpp"
#include "sympflow/sda.hpp"

namespace sympflow::acceptance {
namespace {

using testing::deficient_block;
using testing::random_block;
using testing::random_class;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

Mat Scalar(double v) { return Mat::Constant(1, 1, v); }

// 1. Structured exponential against the generic one.
Outcome StructuredExponential() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  double worst = 0;
  int max_dim = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const JordanSpec spec = random_spec(seed, 3, 4, 10);
    max_dim = std::max(max_dim, 2 * spec.half_dim());
    const Mat J = build_J(spec);
    for (int i = 0; i < 20; ++i) {
      const double t = dist(rng);
      const Mat E = exp_J(spec, t);
      worst = std::max(worst, (E - mat_exp(J * t)).norm() / E.norm());
    }
  }
  const double secs = Seconds(start);
  return {worst <= 1e-9 && secs < 10.0 && max_dim <= 20,
          Fmt("max rel err %.3g", worst) + Fmt(", %.2f s", secs) +
              ", max 2n = " + std::to_string(max_dim)};
}

// 2. Closed-form kappa against the numeric evaluation.
Outcome Kappa() {
  double worst = 0;
  for (int n = 1; n <= 8; ++n) {
    for (double t : {-2.5, -1.0, 1.0, 2.5}) {
      worst = std::max(worst, std::abs(kappa_numeric(n, t) - kappa(n)));
    }
  }
  return {worst <= 1e-9, Fmt("max abs err %.3g", worst)};
}

// 3. Closed-form determinant against exact elimination.
Outcome DigammaDet() {
  double worst = 0;
  int count = 0;
  for (int k1 = 0; k1 <= 8; ++k1) {
    for (int k2 = k1; k2 <= std::max(k1, 2 * k1); ++k2) {
      const double exact = digamma_det_exact(k1, k2);
      worst = std::max(worst, std::abs(digamma_det(k1, k2) - exact) / std::abs(exact));
      ++count;
    }
  }
  return {worst <= 1e-12,
          Fmt("max rel err %.3g", worst) + " over " + std::to_string(count) +
              " pairs"};
}

// 4. Doubling iterates equal the extended solution at t = 2^{k-1}.
Outcome DoublingEqualsFlow() {
  const int n = 4;
  const std::uint64_t seed = 42;
  const Mat A = 0.5 * random_complex(n, n, seed) / std::sqrt(double(n));
  const Mat Q = 3.0 * Mat::Identity(n, n) +
                0.3 * hermitian_part(random_complex(n, n, seed + 1)) /
                    std::sqrt(double(n));
  const HermitianBlock X1 = iterate_block(Sda2State{A, Q, Mat::Zero(n, n)});
  const FlowProblem p = build_flow_problem(PairClass::NmeClass(n), X1);
  double worst = 0;
  bool ok = true;
  for (const DoublingRow& r : sample_doubling(p, 5)) {
    if (r.status != "ok" || !r.rel_diff) {
      ok = false;
      continue;
    }
    for (double d : *r.rel_diff) worst = std::max(worst, d);
  }
  return {ok && worst <= 1e-7, Fmt("max blockwise rel diff %.3g over k = 1..5", worst)};
}

// 5. Scalar blow-up at t = 1.
Outcome ScalarBlowup() {
  Mat H = Mat::Zero(2, 2);
  H(0, 1) = 1.0;
  const SingularTimeList s = singular_times(H, Scalar(-1.0), -2.0, 2.0);
  if (s.times.size() != 1) {
    return {false, std::to_string(s.times.size()) + " singular times found"};
  }
  const double err = std::abs(s.times[0].t - 1.0);
  return {err <= 1e-8, Fmt("t = %.12f", s.times[0].t) + Fmt(", |t - 1| = %.3g", err)};
}

// 6. Period and decay rate for the single d-block experiment.
Outcome Example41() {
  const auto start = std::chrono::steady_clock::now();
  const ExampleInstance ex = example_instance(41, 7);
  const GeneralPrediction g = general_limit(ex.spec, ex.S, ex.W0, Direction::kPlus);
  const ElementaryPrediction e =
      elementary_limit(BlockKind::kD, ex.spec, ex.S, ex.W0, Direction::kPlus);

  const SingularTimeList dips = scan_singular(
      [&](double t) {
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat>(g.U1_at(t)).singularValues();
        return sv(sv.size() - 1) / sv(0);
      },
      0.0, 1000.0, 20001);
  if (dips.times.size() < 2) return {false, "fewer than two singular times"};
  const double spacing = (dips.times.back().t - dips.times.front().t) /
                         static_cast<double>(dips.times.size() - 1);

  constexpr double kRho = 0.1;
  std::vector<double> t, err;
  for (const ResidualRow& r : residual_scan(g, ex.prop, ex.W0, 100.0, 1000.0, 9001)) {
    if (r.blowup || std::abs(e.orbit->denominator(r.t)) <= kRho) continue;
    t.push_back(r.t);
    err.push_back(r.err_W);
  }
  const double slope = loglog_slope(t, err);
  const double secs = Seconds(start);
  const bool ok = std::abs(spacing - 11.5248) <= 1e-3 &&
                  std::abs(slope + 1.0) <= 0.15 && secs < 60.0;
  return {ok, Fmt("spacing %.6f", spacing) + " over " +
                  std::to_string(dips.times.size()) + " dips" +
                  Fmt(", slope %.4f", slope) + Fmt(", %.1f s", secs)};
}

// 7. Quadratic convergence of the NME doubling with a = 1, q = 3.
Outcome QuadraticSda() {
  const double x_star = (3.0 + std::sqrt(5.0)) / 2.0;
  const SdaTrace tr = run_sda(NmeProblem{Scalar(1.0), Scalar(3.0)}, 1e-15, 40);
  std::vector<double> e;
  for (const SdaRecord& r : tr.records) {
    e.push_back(std::abs(std::get<Sda2State>(r.state).Q(0, 0) - x_star));
  }
  const double final_err = e.back();
  // Errors at the rounding floor carry no rate information.
  const double floor = 1e-14;
  bool rate_ok = true;
  int measured = 0;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (e[k] < floor) break;
    ++measured;
    rate_ok = rate_ok && e[k + 1] <= 10.0 * e[k] * e[k];
  }
  return {tr.verdict == SdaVerdict::kConverged && final_err <= 1e-12 && rate_ok &&
              measured >= 3,
          Fmt("final err %.3g", final_err) + ", " + std::to_string(measured) +
              " steps with e_{k+1} <= 10 e_k^2" + (rate_ok ? "" : " (violated)")};
}

// 8. Linear convergence on the critical NME a = 1, q = 2, whose generator has
// a single even Jordan block at zero.
Outcome LinearSda() {
  const SdaTrace tr = run_sda(NmeProblem{Scalar(1.0), Scalar(2.0)}, 1e-300, 9);
  std::vector<double> e;
  for (const SdaRecord& r : tr.records) {
    e.push_back(std::abs(std::get<Sda2State>(r.state).Q(0, 0) - 1.0));
  }
  if (e.size() < 9) return {false, "iteration stopped early"};
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 3; k <= 8; ++k) {
    const double ratio = e[k] / e[k - 1];  // e_{k+1} / e_k with 1-based k
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const ConvergenceClass cls = sda_class(build_flow_problem(
      PairClass::NmeClass(1),
      iterate_block(Sda2State{Scalar(1.0), Scalar(2.0), Scalar(0.0)})).gen);
  return {lo >= 0.4 && hi <= 0.6,
          Fmt("ratios in [%.4f, ", lo) + Fmt("%.4f] for k = 3..8", hi) +
              ", classified " + to_string(cls.verdict)};
}

// 9. Singular times of Q and Qstar coincide.
Outcome DualFlowSingularTimes() {
  int instances = 0, compared = 0;
  double worst = 0;
  bool ok = true;
  for (int seed = 0; seed < 40; ++seed) {
    const int n = 1 + seed % 3;
    const FlowProblem p = build_flow_problem(random_class(n, 900 + seed),
                                             random_block(n, 950 + seed));
    const SingularTimeList a = singular_times(p, FlowFactor::kQ, -3.0, 3.0);
    if (a.times.empty()) continue;
    const SingularTimeList b = singular_times(p, FlowFactor::kQstar, -3.0, 3.0);
    ++instances;
    if (a.times.size() != b.times.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      worst = std::max(worst, std::abs(a.times[i].t - b.times[i].t));
      ++compared;
    }
  }
  return {ok && instances >= 5 && worst <= 1e-6,
          std::to_string(instances) + " instances, " + std::to_string(compared) +
              " times" + Fmt(", max diff %.3g", worst)};
}

// 10. Structural invariants over a seeded corpus.
Outcome InvariantCorpus() {
  double sympl = 0, herm = 0, gen_res = 0, pair_res = 0, radon = 0;
  int instances = 0, radon_points = 0;
  const Tolerances tol;
  for (int seed = 0; seed < 60; ++seed) {
    const int n = 1 + seed % 4;
    const HermitianBlock X1 = seed % 3 == 0 ? deficient_block(n, 1, 500 + seed)
                                            : random_block(n, 500 + seed);
    const FlowProblem p = build_flow_problem(random_class(n, 600 + seed), X1);
    ++instances;
    const Mat& H = p.gen.H;
    const Mat J = make_J(n);

    const Mat lhs = p.pair.M * p.gen.Pi0;
    gen_res = std::max(gen_res, (lhs - p.pair.L * p.gen.PiInf * mat_exp(H)).norm() /
                                    std::max(1.0, lhs.norm()));

    const Mat W0 = hermitian_part(random_complex(n, n, 700 + seed));
    for (double t : {-1.3, -0.4, 0.6, 2.1}) {
      const Mat E = mat_exp(H * t);
      sympl = std::max(sympl, (E.adjoint() * J * E - J).norm() /
                                  std::max(1.0, E.squaredNorm()));

      if (auto W = rde_solve(H, W0, t, tol)) {
        herm = std::max(herm, (*W - W->adjoint()).norm() / std::max(1.0, W->norm()));
        // Central difference of W against the right-hand side, away from
        // blow-ups.
        const double h = 1e-5;
        const auto Wp = rde_solve(H, W0, t + h, tol);
        const auto Wm = rde_solve(H, W0, t - h, tol);
        if (Wp && Wm && Propagator(H).frame(W0, t).sigma_min() > 1e-3) {
          const Mat rhs = rde_rhs(H, *W);
          radon = std::max(radon, ((*Wp - *Wm) / (2 * h) - rhs).norm() /
                                      std::max(1.0, rhs.norm()));
          ++radon_points;
        }
      }

      try {
        const FlowPairResult r = flow_pair(p, t);
        const double s = std::max(1.0, r.scale);
        pair_res = std::max({pair_res, r.res_U0 / s, r.res_Uinf / s, r.res_U1 / s});
      } catch (const PoleError&) {
      }
    }
  }
  const bool ok = instances >= 50 && sympl <= 1e-9 && herm <= 1e-9 &&
                  gen_res <= 1e-8 && pair_res <= 1e-7 && radon <= 1e-5 &&
                  radon_points > 0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%d instances: symplectic %.2g, hermitian %.2g, generator %.2g, "
                "pair %.2g, finite difference %.2g (%d points)",
                instances, sympl, herm, gen_res, pair_res, radon, radon_points);
  return {ok, buf};
}

}  // namespace

int Main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"structured exponential", StructuredExponential},
      {"kappa closed form", Kappa},
      {"digamma determinant", DigammaDet},
      {"doubling equals flow", DoublingEqualsFlow},
      {"scalar blow-up", ScalarBlowup},
      {"d-block period and decay", Example41},
      {"quadratic doubling", QuadraticSda},
      {"linear doubling", LinearSda},
      {"dual flow singular times", DualFlowSingularTimes},
      {"invariant corpus", InvariantCorpus},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace sympflow::acceptance

int main() { return sympflow::acceptance::Main(); }
