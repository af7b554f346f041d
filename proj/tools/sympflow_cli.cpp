// Command-line driver: doubling solves, flow scans, canonical-form checks and
// the long-time asymptotic experiments. CSV goes to --out (or stdout); all
// computation finishes before anything is written.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sympflow/asymptotics.hpp"
#include "sympflow/errors.hpp"
#include "sympflow/examples.hpp"
#include "sympflow/flow.hpp"
#include "sympflow/hjcf.hpp"
#include "sympflow/io.hpp"
#include "sympflow/parallel.hpp"
#include "sympflow/sda.hpp"

namespace sympflow::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBreakdown = 2;
constexpr int kExitMaxIter = 3;

struct Config {
  std::string input;
  std::string out;
  std::string scan;
  std::optional<double> t0;
  std::optional<double> t1;
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  double tol = 1e-13;
  int kmax = 60;
  int which = 41;
  int doubling = 0;

  void Validate() const {
    if (grid && *grid < 2) throw UsageError("--grid must be at least 2");
    if (t0 && t1 && !(*t1 > *t0)) throw UsageError("--t1 must exceed --t0");
    if (!(tol > 0)) throw UsageError("--tol must be positive");
    if (kmax < 1) throw UsageError("--kmax must be positive");
  }
};

std::string Num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { Row(header); }

  void Row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ << ',';
      body_ << cells[i];
    }
    body_ << '\n';
  }

  void Section(const std::string& name) { footer_ << "# [" << name << "]\n"; }
  void Footer(const std::string& line) { footer_ << "# " << line << '\n'; }

  std::string str() const { return body_.str() + footer_.str(); }

 private:
  std::ostringstream body_;
  std::ostringstream footer_;
};

void Emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

std::vector<double> Grid(double t0, double t1, int n) {
  std::vector<double> t(n);
  const double h = (t1 - t0) / (n - 1);
  for (int i = 0; i < n; ++i) t[i] = (i + 1 == n) ? t1 : t0 + h * i;
  return t;
}

void SingularFooter(Csv& csv, const std::string& name,
                    const SingularTimeList& list) {
  csv.Section(name);
  csv.Footer("t,lo,hi,sigma_min");
  for (const SingularTime& s : list.times) {
    csv.Footer(Num(s.t) + ',' + Num(s.lo) + ',' + Num(s.hi) + ',' +
               Num(s.sigma_min));
  }
  for (const std::string& w : list.warnings) csv.Footer("warning," + w);
}

// ---------------------------------------------------------------------------
// sda

int CmdSda(const Config& cfg) {
  if (cfg.input.empty()) throw UsageError("sda: --input is required");
  double gamma = 1.0;
  const AnyProblem problem = problem_from_json(read_json_file(cfg.input), &gamma);
  SdaTrace trace;
  std::string kind;
  if (const auto* p = std::get_if<DareProblem>(&problem)) {
    kind = "dare";
    trace = run_sda(*p, cfg.tol, cfg.kmax);
  } else if (const auto* p = std::get_if<NmeProblem>(&problem)) {
    kind = "nme";
    trace = run_sda(*p, cfg.tol, cfg.kmax);
  } else {
    kind = "care";
    trace = run_sda(cayley(std::get<CareProblem>(problem), gamma), cfg.tol,
                    cfg.kmax);
  }

  Csv csv({"k", "norm_A", "rel_delta", "residual", "status"});
  for (const SdaRecord& r : trace.records) {
    const bool finite = std::isfinite(r.norm_A) && std::isfinite(r.rel_delta) &&
                        std::isfinite(r.residual);
    csv.Row({std::to_string(r.k), Num(r.norm_A), Num(r.rel_delta),
             Num(r.residual), finite ? "ok" : "nonfinite"});
  }
  csv.Section("result");
  csv.Footer("problem," + kind);
  csv.Footer("verdict," + to_string(trace.verdict));
  if (trace.breakdown_sigma) {
    csv.Footer("breakdown_sigma," + Num(*trace.breakdown_sigma));
  }
  if (!trace.message.empty()) csv.Footer("message," + trace.message);
  if (!trace.records.empty()) {
    const SdaState& s = trace.last().state;
    const Mat X = std::holds_alternative<Sda1State>(s)
                      ? std::get<Sda1State>(s).H
                      : std::get<Sda2State>(s).Q;
    csv.Footer("solution," + matrix_to_json(X).dump());
  }
  Emit(csv.str(), cfg.out);
  switch (trace.verdict) {
    case SdaVerdict::kConverged:
      return kExitOk;
    case SdaVerdict::kBreakdown:
      std::cerr << "sda: breakdown: " << trace.message << '\n';
      return kExitBreakdown;
    case SdaVerdict::kMaxIter:
      std::cerr << "sda: no convergence within " << cfg.kmax << " steps\n";
      return kExitMaxIter;
  }
  return kExitError;
}

// ---------------------------------------------------------------------------
// flow

// Riccati flow W(t) = P Q^{-1} for {"H": ..., "W0": ...}.
std::string FlowRiccati(const Config& cfg, const Mat& H, const Mat& W0) {
  const double t0 = cfg.t0.value_or(-2.0), t1 = cfg.t1.value_or(2.0);
  const int grid = cfg.grid.value_or(401);
  const std::vector<double> ts = Grid(t0, t1, grid);
  struct Row {
    double sigma = 0, norm_W = 0, residual = 0;
    bool blowup = false;
  };
  std::vector<Row> rows(grid);
  const Propagator prop(H);
  parallel_for(ts.size(), [&](std::size_t i) {
    const double t = ts[i];
    const Frame f = prop.frame(W0, t);
    Row& r = rows[i];
    r.sigma = f.sigma_min();
    if (r.sigma <= 1e-12) {
      r.blowup = true;
      r.norm_W = r.residual = std::numeric_limits<double>::infinity();
      return;
    }
    auto w_at = [&](double s) -> std::optional<Mat> {
      const Frame g = prop.frame(W0, s);
      if (g.sigma_min() <= 1e-12) return std::nullopt;
      return Mat(g.bottom() * g.top().inverse());
    };
    const Mat W = *w_at(t);
    r.norm_W = W.norm();
    // Central difference against the right-hand side of the equation.
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    const auto Wp = w_at(t + h), Wm = w_at(t - h);
    if (!Wp || !Wm) {
      r.residual = std::numeric_limits<double>::infinity();
      return;
    }
    const Mat rhs = rde_rhs(H, W);
    r.residual = ((*Wp - *Wm) / (2 * h) - rhs).norm() / std::max(1.0, rhs.norm());
  });
  Csv csv({"t", "sigma_min_Q", "norm_W", "blowup", "rde_residual"});
  for (int i = 0; i < grid; ++i) {
    csv.Row({Num(ts[i]), Num(rows[i].sigma), Num(rows[i].norm_W),
             rows[i].blowup ? "1" : "0", Num(rows[i].residual)});
  }
  SingularFooter(csv, "singular_times",
                 singular_times(prop, W0, t0, t1, std::max(grid, 2001)));
  return csv.str();
}

std::string FlowExtended(const Config& cfg, const FlowProblem& problem) {
  const double t0 = cfg.t0.value_or(0.0), t1 = cfg.t1.value_or(2.0);
  const int grid = cfg.grid.value_or(201);
  const std::vector<double> ts = Grid(t0, t1, grid);
  struct Row {
    double sigma = 0, norm_X22 = 0, norm_X12 = 0, residual = 0;
    bool blowup = false;
  };
  std::vector<Row> rows(grid);
  parallel_for(ts.size(), [&](std::size_t i) {
    const FlowSample s = extended_X(problem, ts[i]);
    Row& r = rows[i];
    r.sigma = s.sigma_min_Q;
    if (s.blowup()) {
      r.blowup = true;
      r.norm_X22 = r.norm_X12 = r.residual =
          std::numeric_limits<double>::infinity();
      return;
    }
    r.norm_X22 = s.X->X22.norm();
    r.norm_X12 = s.X->X12.norm();
    try {
      const FlowPairResult p = flow_pair(problem, ts[i]);
      r.residual = std::max({p.res_U0, p.res_Uinf, p.res_U1}) /
                   std::max(1.0, p.scale);
    } catch (const PoleError&) {
      r.blowup = true;
      r.residual = std::numeric_limits<double>::infinity();
    }
  });
  Csv csv({"t", "sigma_min_Q", "norm_X22", "norm_X12", "blowup",
           "pair_residual"});
  for (int i = 0; i < grid; ++i) {
    const Row& r = rows[i];
    csv.Row({Num(ts[i]), Num(r.sigma), Num(r.norm_X22), Num(r.norm_X12),
             r.blowup ? "1" : "0", Num(r.residual)});
  }
  SingularFooter(csv, "singular_times",
                 singular_times(problem, FlowFactor::kQ, t0, t1,
                                std::max(grid, 2001)));
  if (cfg.doubling > 0) {
    csv.Section("doubling");
    csv.Footer("k,t,X11,X12,X21,X22,status");
    for (const DoublingRow& d : sample_doubling(problem, cfg.doubling)) {
      std::string line = std::to_string(d.k) + ',' + Num(d.t);
      for (int b = 0; b < 4; ++b) {
        line += ',' + (d.rel_diff ? Num((*d.rel_diff)[b]) : std::string("nan"));
      }
      csv.Footer(line + ',' + d.status);
    }
  }
  return csv.str();
}

int CmdFlow(const Config& cfg) {
  std::string text;
  if (!cfg.input.empty()) {
    const json j = read_json_file(cfg.input);
    try {
      if (j.contains("H")) {
        const Mat H = matrix_from_json(j.at("H"));
        const Mat W0 = matrix_from_json(j.at("W0"));
        if (H.rows() != H.cols() || H.rows() != 2 * W0.rows() ||
            W0.rows() != W0.cols()) {
          throw UsageError("flow: H must be 2n x 2n and W0 n x n");
        }
        text = FlowRiccati(cfg, H, W0);
      } else {
        const HermitianBlock X1 = block_from_json(j.at("X"));
        const PairClass cls = class_from_json(j.at("class"), X1.half_dim());
        text = FlowExtended(cfg, build_flow_problem(cls, X1));
      }
    } catch (const json::exception& e) {
      throw UsageError(std::string("flow JSON: ") + e.what());
    }
  } else {
    if (!cfg.seed) throw UsageError("flow: give --input or --seed");
    // Seeded identity-class block with an invertible X12 (index zero).
    const int n = 2;
    const Mat X = hermitian_part(random_complex(2 * n, 2 * n, *cfg.seed));
    HermitianBlock X1 = HermitianBlock::FromMatrix(X);
    X1.X12 += 2.0 * Mat::Identity(n, n);
    X1.X21 = X1.X12.adjoint();
    text = FlowExtended(cfg, build_flow_problem(PairClass::Identity(n), X1));
  }
  Emit(text, cfg.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// canon

int CmdCanon(const Config& cfg) {
  JordanSpec spec;
  if (!cfg.input.empty()) {
    spec = spec_from_json(read_json_file(cfg.input));
  } else if (cfg.seed) {
    spec = random_spec(*cfg.seed);
  } else {
    throw UsageError("canon: give --input or --seed");
  }
  spec.Validate();
  const int n = spec.half_dim();
  const Mat Jc = build_J(spec);
  const Mat J = make_J(n);

  std::mt19937_64 rng(cfg.seed.value_or(0));
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<double> ts(20);
  for (double& t : ts) t = dist(rng);

  double exp_err = 0, sympl_err = 0;
  for (double t : ts) {
    const Mat E = exp_J(spec, t);
    const Mat G = mat_exp(Jc * t);
    exp_err = std::max(exp_err, (E - G).norm() / E.norm());
    sympl_err = std::max(sympl_err, (E.adjoint() * J * E - J).norm() /
                                        std::max(1.0, E.squaredNorm()));
  }
  const double hamiltonian_err =
      (Jc.adjoint() * J + J * Jc).norm() / std::max(1.0, Jc.norm());

  double kappa_err = 0;
  for (int k = 1; k <= 8; ++k) {
    for (double t : {-2.5, -1.0, 1.0, 2.5}) {
      kappa_err = std::max(kappa_err, std::abs(kappa_numeric(k, t) - kappa(k)));
    }
  }
  double det_err = 0;
  for (int k1 = 0; k1 <= 8; ++k1) {
    for (int k2 = k1; k2 <= std::max(k1, 2 * k1); ++k2) {
      const double exact = digamma_det(k1, k2);
      const double dense = digamma_det_exact(k1, k2);
      det_err = std::max(det_err, std::abs(dense - exact) / std::abs(exact));
    }
  }

  struct Check {
    std::string name;
    double value, threshold;
  };
  const std::vector<Check> checks = {
      {"exp_rel_error", exp_err, 1e-9},
      {"symplectic_residual", sympl_err, 1e-9},
      {"hamiltonian_residual", hamiltonian_err, 1e-12},
      {"kappa_error", kappa_err, 1e-9},
      {"digamma_det_rel_error", det_err, 1e-12},
  };
  Csv csv({"check", "value", "threshold", "pass"});
  bool ok = true;
  for (const Check& c : checks) {
    const bool pass = c.value <= c.threshold;
    ok = ok && pass;
    csv.Row({c.name, Num(c.value), Num(c.threshold), pass ? "1" : "0"});
  }
  csv.Section("spec");
  csv.Footer(spec_to_json(spec).dump());
  Emit(csv.str(), cfg.out);
  if (!ok) std::cerr << "canon: at least one check exceeded its threshold\n";
  return ok ? kExitOk : kExitError;
}

// ---------------------------------------------------------------------------
// example

struct SideSummary {
  std::vector<SingularTime> dips;
  double slope = NAN;
  std::size_t fit_points = 0;
  std::size_t colocated = 0;
  std::size_t deep_dips = 0;
};

SideSummary Summarize(const std::vector<ResidualRow>& rows,
                      const GeneralPrediction& pred,
                      const std::optional<ElementaryPrediction>& elem,
                      double t0, double t1, int grid) {
  SideSummary s;
  const SingularTimeList dips = scan_singular(
      [&](double t) {
        const Eigen::VectorXd sv =
            Eigen::JacobiSVD<Mat>(pred.U1_at(t)).singularValues();
        return sv(sv.size() - 1) / sv(0);
      },
      t0, t1, grid);
  s.dips = dips.times;

  // Slope on |t| >= 100, away from poles.
  constexpr double kRho = 0.1;
  std::vector<double> t, e;
  for (const ResidualRow& r : rows) {
    if (r.blowup || std::abs(r.t) < 100.0) continue;
    const bool near_pole = elem ? std::abs(elem->orbit->denominator(r.t)) <= kRho
                                : r.sigma_min_U1 <= kRho;
    if (near_pole || !(r.err_W > 0)) continue;
    t.push_back(r.t);
    e.push_back(r.err_W);
  }
  s.fit_points = t.size();
  if (t.size() >= 2) s.slope = loglog_slope(t, e);

  // Every dip of sigma_min(U1) below 1e-3 should carry a peak of the
  // difference curve: climbing from the grid point nearest the dip must stop
  // within two grid cells.
  const double h = (t1 - t0) / (grid - 1);
  auto value = [&](long i) {
    return rows[i].blowup ? INFINITY : rows[i].err_W;
  };
  const long last = static_cast<long>(rows.size()) - 1;
  for (const SingularTime& d : s.dips) {
    if (d.sigma_min > 1e-3) continue;
    ++s.deep_dips;
    long i = std::clamp(std::lround((d.t - t0) / h), 0L, last);
    while (true) {
      const double here = value(i);
      if (std::isinf(here)) break;
      const double left = i > 0 ? value(i - 1) : -1.0;
      const double right = i < last ? value(i + 1) : -1.0;
      if (left <= here && right <= here) break;
      i += right > left ? 1 : -1;
    }
    if (std::abs(rows[i].t - d.t) <= 2 * h) ++s.colocated;
  }
  return s;
}

int CmdExample(const Config& cfg) {
  if (cfg.which != 41 && cfg.which != 42) {
    throw UsageError("example: --which must be 41 or 42");
  }
  const std::uint64_t seed = cfg.seed.value_or(7);
  const double T = cfg.t1.value_or(1000.0);
  if (!(T > 0)) throw UsageError("example: --t1 must be positive");
  const int grid = cfg.grid.value_or(20001);
  const ExampleInstance ex = example_instance(cfg.which, seed);

  Csv csv({"side", "t", "sigma_min_U1", "norm_W_inf", "norm_W",
           "norm_Qinv_inf", "norm_Qinv", "diff_W", "diff_Qinv", "blowup"});
  std::vector<std::string> footer;
  for (Direction d : {Direction::kMinus, Direction::kPlus}) {
    const bool plus = d == Direction::kPlus;
    const double t0 = plus ? 0.0 : -T, t1 = plus ? T : 0.0;
    const GeneralPrediction pred = general_limit(ex.spec, ex.S, ex.W0, d);
    std::optional<ElementaryPrediction> elem;
    if (cfg.which == 41) {
      elem = elementary_limit(BlockKind::kD, ex.spec, ex.S, ex.W0, d);
    }
    const auto rows = residual_scan(pred, ex.prop, ex.W0, t0, t1, grid);
    const std::string side = to_string(d);
    for (const ResidualRow& r : rows) {
      csv.Row({side, Num(r.t), Num(r.sigma_min_U1), Num(r.norm_W_inf),
               Num(r.norm_W), Num(r.norm_Qinv_inf), Num(r.norm_Qinv),
               Num(r.err_W), Num(r.err_Qinv), r.blowup ? "1" : "0"});
    }
    const SideSummary s = Summarize(rows, pred, elem, t0, t1, grid);
    csv.Section("side " + side);
    csv.Footer("singular_times," + std::to_string(s.dips.size()));
    std::string list = "t";
    for (const SingularTime& st : s.dips) list += ',' + Num(st.t);
    csv.Footer(list);
    if (s.dips.size() >= 2) {
      const double spacing =
          (s.dips.back().t - s.dips.front().t) / (s.dips.size() - 1);
      csv.Footer("mean_spacing," + Num(spacing));
    }
    if (elem) {
      if (const auto bp = blowup_period(*elem)) {
        csv.Footer("predicted_period," + Num(bp->period));
        csv.Footer("predicted_t_star," + Num(bp->t_star));
      }
    }
    csv.Footer("slope_diff_W," + Num(s.slope));
    csv.Footer("slope_points," + std::to_string(s.fit_points));
    csv.Footer("dips_below_1e-3," + std::to_string(s.deep_dips));
    csv.Footer("dips_with_peak," + std::to_string(s.colocated));
  }
  csv.Section("instance");
  csv.Footer("which," + std::to_string(cfg.which));
  csv.Footer("seed," + std::to_string(seed));
  csv.Footer("spec," + spec_to_json(ex.spec).dump());
  Emit(csv.str(), cfg.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// asymptotic

int CmdAsymptotic(const Config& cfg) {
  JordanSpec spec;
  std::uint64_t seed = cfg.seed.value_or(1);
  if (!cfg.input.empty()) {
    const json j = read_json_file(cfg.input);
    if (j.contains("spec")) {
      spec = spec_from_json(j.at("spec"));
      if (j.contains("seed") && !cfg.seed) seed = j.at("seed").get<std::uint64_t>();
    } else {
      spec = spec_from_json(j);
    }
  } else {
    if (cfg.which == 41) {
      spec = example_41_spec();
    } else if (cfg.which == 42) {
      spec = example_42_spec();
    } else {
      throw UsageError("asymptotic: --which must be 41 or 42");
    }
  }
  const ExampleInstance ex = make_instance(spec, seed);

  json out;
  out["spec"] = spec_to_json(spec);
  out["seed"] = seed;
  out["class"] = class_to_json(sda_class(spec));
  std::optional<GeneralPrediction> preds[2];
  for (Direction d : {Direction::kPlus, Direction::kMinus}) {
    const std::string key = to_string(d);
    try {
      preds[d == Direction::kPlus] = general_limit(spec, ex.S, ex.W0, d);
      out["general"][key] = prediction_to_json(*preds[d == Direction::kPlus]);
    } catch (const HypothesisError& e) {
      out["general"][key] = {{"error", e.what()}};
    } catch (const AssumptionError& e) {
      out["general"][key] = {{"error", e.what()}};
    }
  }
  if (spec.r.size() + spec.e.size() + spec.c.size() + spec.d.size() == 1) {
    const BlockKind kind = !spec.r.empty()   ? BlockKind::kR
                           : !spec.e.empty() ? BlockKind::kE
                           : !spec.c.empty() ? BlockKind::kC
                                             : BlockKind::kD;
    for (Direction d : {Direction::kPlus, Direction::kMinus}) {
      try {
        const ElementaryPrediction p = elementary_limit(kind, spec, ex.S, ex.W0, d);
        json jp = prediction_to_json(p);
        if (p.orbit) {
          if (const auto bp = blowup_period(p)) {
            jp["period"] = bp->period;
            jp["t_star"] = bp->t_star;
          }
        }
        out["elementary"][to_string(d)] = jp;
      } catch (const HypothesisError& e) {
        out["elementary"][to_string(d)] = {{"error", e.what()}};
      }
    }
  }

  std::string scan_csv;
  if (!cfg.scan.empty()) {
    const double t0 = cfg.t0.value_or(0.0), t1 = cfg.t1.value_or(100.0);
    const int grid = cfg.grid.value_or(1001);
    const bool plus = t0 + t1 >= 0;
    const auto& pred = preds[plus];
    if (!pred) throw UsageError("asymptotic: no prediction for this direction");
    Csv csv({"t", "err_W", "err_Qinv", "sigma_min_U1", "blowup"});
    for (const ResidualRow& r : residual_scan(*pred, ex.prop, ex.W0, t0, t1, grid)) {
      csv.Row({Num(r.t), Num(r.err_W), Num(r.err_Qinv), Num(r.sigma_min_U1),
               r.blowup ? "1" : "0"});
    }
    csv.Section("instance");
    csv.Footer("direction," + std::string(plus ? "plus" : "minus"));
    csv.Footer("seed," + std::to_string(seed));
    scan_csv = csv.str();
  }
  Emit(out.dump(2) + "\n", cfg.out);
  if (!cfg.scan.empty()) Emit(scan_csv, cfg.scan);
  return kExitOk;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Doubling iterations, Riccati flows and their asymptotics."};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Input JSON file");
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
  };
  auto range = [&](CLI::App* sub) {
    sub->add_option("--t0", cfg.t0, "Start of the time range");
    sub->add_option("--t1", cfg.t1, "End of the time range");
    sub->add_option("--grid", cfg.grid, "Number of grid points")
        ->check(CLI::Range(2, 100000000));
  };

  CLI::App* sda = app.add_subcommand("sda", "Run a doubling iteration");
  common(sda);
  sda->add_option("--tol", cfg.tol, "Relative-change stopping tolerance")
      ->capture_default_str();
  sda->add_option("--kmax", cfg.kmax, "Maximum number of steps")
      ->capture_default_str();

  CLI::App* flow = app.add_subcommand("flow", "Scan a Riccati flow");
  common(flow);
  range(flow);
  flow->add_option("--seed", cfg.seed, "Seed for a random problem");
  flow->add_option("--doubling", cfg.doubling,
                   "Compare with this many doubling steps");

  CLI::App* canon = app.add_subcommand("canon", "Check a canonical form");
  common(canon);
  canon->add_option("--seed", cfg.seed, "Seed for a random spec and sample times");

  CLI::App* example = app.add_subcommand("example", "Long-time experiment data");
  example->add_option("--out", cfg.out, "Output file (default: stdout)");
  example->add_option("--which", cfg.which, "41 or 42")->capture_default_str();
  example->add_option("--seed", cfg.seed, "Seed for S and W0 (default 7)");
  example->add_option("--t1", cfg.t1, "Half-width T of [-T, 0] and [0, T]");
  example->add_option("--grid", cfg.grid, "Grid points per side (default 20001)")
      ->check(CLI::Range(2, 100000000));

  CLI::App* asym = app.add_subcommand("asymptotic", "Limit predictions as JSON");
  common(asym);
  range(asym);
  asym->add_option("--seed", cfg.seed, "Seed for S and W0 (default 1)");
  asym->add_option("--which", cfg.which, "41 or 42 when no input is given");
  asym->add_option("--scan", cfg.scan, "Write a residual scan CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    cfg.Validate();
    if (sda->parsed()) return CmdSda(cfg);
    if (flow->parsed()) return CmdFlow(cfg);
    if (canon->parsed()) return CmdCanon(cfg);
    if (example->parsed()) return CmdExample(cfg);
    if (asym->parsed()) return CmdAsymptotic(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace sympflow::cli

int main(int argc, char** argv) { return sympflow::cli::Main(argc, argv); }
