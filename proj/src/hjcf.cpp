#include "sympflow/hjcf.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "sympflow/errors.hpp"

namespace sympflow {
namespace {

constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;

// t^j / j! for j >= 0, zero for j < 0.
double Power(double t, int j) {
  if (j < 0) return 0.0;
  double v = 1.0;
  for (int i = 1; i <= j; ++i) v *= t / i;
  return v;
}

// Phi_k(t)^{-H}; Phi is real and Phi(t)^{-1} = Phi(-t).
Eigen::MatrixXd PhiInvH(int k, double t) { return Phi_k(k, -t).transpose(); }

Mat Complex(const Eigen::MatrixXd& A) { return A.cast<cd>(); }

void CheckBeta(int beta, const char* kind) {
  if (beta != 1 && beta != -1) {
    throw SpecError(std::string(kind) + " block: beta must be +1 or -1, got " +
                    std::to_string(beta));
  }
}

// Writes one block of the canonical form at `offset` of a 2n x 2n matrix.
void PlaceBlock(Mat* out, int n, int offset, const Mat& R, const Mat& D,
                const Mat& G) {
  const int k = static_cast<int>(R.rows());
  out->block(offset, offset, k, k) = R;
  out->block(offset, n + offset, k, k) = D;
  out->block(n + offset, offset, k, k) = G;
  out->block(n + offset, n + offset, k, k) = -R.adjoint();
}

void PlaceExp(Mat* out, int n, int offset, const Mat& E) {
  const int k = static_cast<int>(E.rows() / 2);
  out->block(offset, offset, k, k) = E.topLeftCorner(k, k);
  out->block(offset, n + offset, k, k) = E.topRightCorner(k, k);
  out->block(n + offset, offset, k, k) = E.bottomLeftCorner(k, k);
  out->block(n + offset, n + offset, k, k) = E.bottomRightCorner(k, k);
}

// Canonical (R, D, G) of a c or d block; a c block is gamma == delta.
void CoupledBlock(double gamma, double delta, int beta, int m, int n, Mat* R,
                  Mat* D, Mat* G) {
  const int k = m + n + 1;
  *R = Mat::Zero(k, k);
  *D = Mat::Zero(k, k);
  *G = Mat::Zero(k, k);
  R->topLeftCorner(m, m) = Complex(nilpotent(m));
  R->topLeftCorner(m, m).diagonal().setConstant(cd(0, gamma));
  R->block(m, m, n, n) = Complex(nilpotent(n));
  R->block(m, m, n, n).diagonal().setConstant(cd(0, delta));
  R->coeffRef(k - 1, k - 1) = cd(0, 0.5 * (gamma + delta));
  const cd coupling = kHalfSqrt2 * kI * static_cast<double>(beta);
  if (m > 0) {
    R->coeffRef(m - 1, k - 1) = -kHalfSqrt2;
    D->coeffRef(m - 1, k - 1) = coupling;
    D->coeffRef(k - 1, m - 1) = -coupling;
  }
  if (n > 0) {
    R->coeffRef(m + n - 1, k - 1) = -kHalfSqrt2;
    D->coeffRef(m + n - 1, k - 1) = -coupling;
    D->coeffRef(k - 1, m + n - 1) = coupling;
  }
  D->coeffRef(k - 1, k - 1) = 0.5 * beta * (gamma - delta);
  G->coeffRef(k - 1, k - 1) = -0.5 * beta * (gamma - delta);
}

Mat ExpRBlock(const RBlock& b, double t) {
  const int k = b.size;
  Mat E = Mat::Zero(2 * k, 2 * k);
  E.topLeftCorner(k, k) = std::exp(b.lambda * t) * Complex(Phi_k(k, t));
  E.bottomRightCorner(k, k) =
      std::exp(-std::conj(b.lambda) * t) * Complex(PhiInvH(k, t));
  return E;
}

Mat ExpEBlock(const EBlock& b, double t) {
  const int k = b.size;
  const cd phase = std::exp(cd(0, b.alpha * t));
  const ExpStencil st = stencil(k, t);
  Mat E = Mat::Zero(2 * k, 2 * k);
  E.topLeftCorner(k, k) = phase * Complex(st.Phi);
  E.topRightCorner(k, k) =
      -phase * static_cast<double>(b.beta) * Complex(st.GammaHat);
  E.bottomRightCorner(k, k) = phase * Complex(PhiInvH(k, t));
  return E;
}

Mat ExpCoupledBlock(double gamma, double delta, int beta, int m, int n,
                    double t) {
  const int k = m + n + 1;
  const int q = m + n;
  const cd eg = std::exp(cd(0, gamma * t));
  const cd ed = std::exp(cd(0, delta * t));
  const cd ib = kI * static_cast<double>(beta);
  const Eigen::MatrixXd Pm = signed_antidiag(m);
  const Eigen::MatrixXd Pn = signed_antidiag(n);

  Mat E = Mat::Zero(2 * k, 2 * k);
  auto B = E.topLeftCorner(k, k);
  auto Dm = E.topRightCorner(k, k);
  auto Em = E.bottomRightCorner(k, k);

  // B = [[Phi_{m,n}, phi^1], [0, w11]].
  B.topLeftCorner(m, m) = eg * Complex(Phi_k(m, t));
  B.block(m, m, n, n) = ed * Complex(Phi_k(n, t));
  B.block(0, q, m, 1) = -kHalfSqrt2 * eg * Complex(phi_k(m, t));
  B.block(m, q, n, 1) = -kHalfSqrt2 * ed * Complex(phi_k(n, t));

  // D = [[GammaHat_{m+1,n+1}, phi^2], [psiHat^1^H, w12]].
  Dm.topLeftCorner(m, m) = -ib * eg * Complex(Gamma_k(m + 1, 2 * m, t) * Pm);
  Dm.block(m, m, n, n) = ib * ed * Complex(Gamma_k(n + 1, 2 * n, t) * Pn);
  Dm.block(0, q, m, 1) = kHalfSqrt2 * ib * eg * Complex(phi_k(m, t));
  Dm.block(m, q, n, 1) = -kHalfSqrt2 * ib * ed * Complex(phi_k(n, t));
  Dm.block(q, 0, 1, m) =
      kHalfSqrt2 * ib * eg * Complex(psi_k(m, t).transpose() * Pm);
  Dm.block(q, m, 1, n) =
      -kHalfSqrt2 * ib * ed * Complex(psi_k(n, t).transpose() * Pn);

  // E = [[PhiHat_{m,n}, 0], [psiHat^2^H, w22]].
  Em.topLeftCorner(m, m) = eg * Complex(PhiInvH(m, t));
  Em.block(m, m, n, n) = ed * Complex(PhiInvH(n, t));
  Em.block(q, 0, 1, m) =
      -kHalfSqrt2 * eg * Complex(psi_k(m, t).transpose() * Pm);
  Em.block(q, m, 1, n) =
      -kHalfSqrt2 * ed * Complex(psi_k(n, t).transpose() * Pn);

  // The 2 x 2 omega coupling between the last rows of the two halves.
  const cd w11 = 0.5 * (eg + ed);
  const cd w12 = -0.5 * ib * (eg - ed);
  const cd w21 = 0.5 * ib * (eg - ed);
  E(q, q) = w11;
  E(q, k + q) = w12;
  E(k + q, q) = w21;
  E(k + q, k + q) = w11;
  return E;
}

}  // namespace

int JordanSpec::half_dim() const {
  int n = 0;
  for (const auto& b : r) n += b.size;
  for (const auto& b : e) n += b.size;
  for (const auto& b : c) n += b.m + b.n + 1;
  for (const auto& b : d) n += b.s + b.t + 1;
  return n;
}

void JordanSpec::Validate() const {
  if (empty()) throw SpecError("JordanSpec: no blocks");
  for (const auto& b : r) {
    if (b.size < 1) throw SpecError("r block: size must be at least 1");
    if (!(b.lambda.real() > 0)) {
      throw SpecError("r block: Re(lambda) must be positive");
    }
  }
  for (const auto& b : e) {
    if (b.size < 1) throw SpecError("e block: size must be at least 1");
    CheckBeta(b.beta, "e");
  }
  for (const auto& b : c) {
    if (b.m < 0 || b.n < 0 || b.m + b.n < 1) {
      throw SpecError("c block: need m, n >= 0 and m + n >= 1");
    }
    CheckBeta(b.beta, "c");
  }
  for (const auto& b : d) {
    if (b.s < 0 || b.t < 0 || b.s + b.t < 1) {
      throw SpecError("d block: need s, t >= 0 and s + t >= 1");
    }
    if (b.gamma == b.delta) throw SpecError("d block: gamma must differ from delta");
    CheckBeta(b.beta, "d");
  }
}

std::vector<BlockRange> JordanSpec::index_map() const {
  std::vector<BlockRange> map;
  int offset = 0;
  auto add = [&](BlockKind kind, int index, int size) {
    map.push_back({kind, index, offset, size});
    offset += size;
  };
  for (std::size_t i = 0; i < r.size(); ++i) add(BlockKind::kR, i, r[i].size);
  for (std::size_t i = 0; i < e.size(); ++i) add(BlockKind::kE, i, e[i].size);
  for (std::size_t i = 0; i < c.size(); ++i) {
    add(BlockKind::kC, i, c[i].m + c[i].n + 1);
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    add(BlockKind::kD, i, d[i].s + d[i].t + 1);
  }
  return map;
}

json spec_to_json(const JordanSpec& spec) {
  json j = {{"r", json::array()}, {"e", json::array()}, {"c", json::array()},
            {"d", json::array()}};
  for (const auto& b : spec.r) {
    j["r"].push_back({{"lambda", {b.lambda.real(), b.lambda.imag()}},
                      {"size", b.size}});
  }
  for (const auto& b : spec.e) {
    j["e"].push_back({{"alpha", b.alpha}, {"beta", b.beta}, {"size", b.size}});
  }
  for (const auto& b : spec.c) {
    j["c"].push_back(
        {{"eta", b.eta}, {"beta", b.beta}, {"m", b.m}, {"n", b.n}});
  }
  for (const auto& b : spec.d) {
    j["d"].push_back({{"gamma", b.gamma}, {"delta", b.delta},
                      {"beta", b.beta}, {"s", b.s}, {"t", b.t}});
  }
  return j;
}

JordanSpec spec_from_json(const json& j) {
  JordanSpec spec;
  try {
    if (!j.is_object()) throw SpecError("JordanSpec JSON: expected an object");
    for (const auto& [key, value] : j.items()) {
      if (key != "r" && key != "e" && key != "c" && key != "d") {
        throw SpecError("JordanSpec JSON: unknown key '" + key + "'");
      }
    }
    for (const auto& b : j.value("r", json::array())) {
      const auto& lam = b.at("lambda");
      cd lambda = lam.is_array() ? cd(lam.at(0).get<double>(),
                                      lam.at(1).get<double>())
                                 : cd(lam.get<double>(), 0.0);
      spec.r.push_back({lambda, b.at("size").get<int>()});
    }
    for (const auto& b : j.value("e", json::array())) {
      spec.e.push_back({b.at("alpha").get<double>(), b.at("beta").get<int>(),
                        b.at("size").get<int>()});
    }
    for (const auto& b : j.value("c", json::array())) {
      spec.c.push_back({b.at("eta").get<double>(), b.at("beta").get<int>(),
                        b.at("m").get<int>(), b.at("n").get<int>()});
    }
    for (const auto& b : j.value("d", json::array())) {
      spec.d.push_back({b.at("gamma").get<double>(),
                        b.at("delta").get<double>(), b.at("beta").get<int>(),
                        b.at("s").get<int>(), b.at("t").get<int>()});
    }
  } catch (const json::exception& e) {
    throw SpecError(std::string("JordanSpec JSON: ") + e.what());
  }
  spec.Validate();
  return spec;
}

JordanSpec random_spec(std::uint64_t seed, int max_blocks, int max_size,
                       int max_half_dim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto freq = [&] { return -2.0 + 4.0 * unit(rng); };
  auto sign = [&] { return unit(rng) < 0.5 ? -1 : 1; };

  JordanSpec spec;
  const int blocks = uniform_int(1, max_blocks);
  int used = 0;
  for (int b = 0; b < blocks; ++b) {
    const int room = std::min(max_size, max_half_dim - used);
    if (room < 1) break;
    int kind = uniform_int(0, 3);
    if (room < 2 && kind >= 2) kind = uniform_int(0, 1);
    const int size = uniform_int(kind >= 2 ? 2 : 1, room);
    switch (kind) {
      case 0:
        spec.r.push_back({cd(0.1 + 0.9 * unit(rng), freq()), size});
        break;
      case 1:
        spec.e.push_back({freq(), sign(), size});
        break;
      case 2: {
        const int m = uniform_int(1, size - 1);
        spec.c.push_back({freq(), sign(), m, size - 1 - m});
        break;
      }
      default: {
        const int s = uniform_int(1, size - 1);
        const double gamma = freq();
        double delta = freq();
        if (std::abs(gamma - delta) < 0.1) delta = gamma + 0.5;
        spec.d.push_back({gamma, delta, sign(), s, size - 1 - s});
        break;
      }
    }
    used += size;
  }
  return spec;
}

Mat build_J(const JordanSpec& spec) {
  spec.Validate();
  const int n = spec.half_dim();
  Mat J = Mat::Zero(2 * n, 2 * n);
  for (const BlockRange& br : spec.index_map()) {
    const int k = br.size;
    Mat R = Mat::Zero(k, k), D = Mat::Zero(k, k), G = Mat::Zero(k, k);
    switch (br.kind) {
      case BlockKind::kR: {
        R = Complex(nilpotent(k));
        R.diagonal().setConstant(spec.r[br.index].lambda);
        break;
      }
      case BlockKind::kE: {
        const EBlock& b = spec.e[br.index];
        R = Complex(nilpotent(k));
        R.diagonal().setConstant(cd(0, b.alpha));
        D(k - 1, k - 1) = static_cast<double>(b.beta);
        break;
      }
      case BlockKind::kC: {
        const CBlock& b = spec.c[br.index];
        CoupledBlock(b.eta, b.eta, b.beta, b.m, b.n, &R, &D, &G);
        break;
      }
      case BlockKind::kD: {
        const DBlock& b = spec.d[br.index];
        CoupledBlock(b.gamma, b.delta, b.beta, b.s, b.t, &R, &D, &G);
        break;
      }
    }
    PlaceBlock(&J, n, br.offset, R, D, G);
  }
  return J;
}

Mat exp_J(const JordanSpec& spec, double t) {
  spec.Validate();
  const int n = spec.half_dim();
  Mat E = Mat::Zero(2 * n, 2 * n);
  for (const BlockRange& br : spec.index_map()) {
    switch (br.kind) {
      case BlockKind::kR:
        PlaceExp(&E, n, br.offset, ExpRBlock(spec.r[br.index], t));
        break;
      case BlockKind::kE:
        PlaceExp(&E, n, br.offset, ExpEBlock(spec.e[br.index], t));
        break;
      case BlockKind::kC: {
        const CBlock& b = spec.c[br.index];
        PlaceExp(&E, n, br.offset,
                 ExpCoupledBlock(b.eta, b.eta, b.beta, b.m, b.n, t));
        break;
      }
      case BlockKind::kD: {
        const DBlock& b = spec.d[br.index];
        PlaceExp(&E, n, br.offset,
                 ExpCoupledBlock(b.gamma, b.delta, b.beta, b.s, b.t, t));
        break;
      }
    }
  }
  return E;
}

Eigen::MatrixXd nilpotent(int k) {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) N(i, i + 1) = 1.0;
  return N;
}

Eigen::MatrixXd signed_antidiag(int k) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(k, k);
  for (int i = 1; i <= k; ++i) P(i - 1, k - i) = (i % 2 == 0) ? 1.0 : -1.0;
  return P;
}

Eigen::MatrixXd Phi_k(int k, double t) {
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) Phi(i, j) = Power(t, j - i);
  }
  return Phi;
}

Eigen::MatrixXd Gamma_k(int k1, int k2, double t) {
  const int size = k2 - k1 + 1;
  if (size < 0) throw SpecError("Gamma_k: k2 < k1 - 1");
  Eigen::MatrixXd G(size, size);
  for (int i = 1; i <= size; ++i) {
    for (int j = 1; j <= size; ++j) G(i - 1, j - 1) = Power(t, k1 - i + j);
  }
  return G;
}

Eigen::VectorXd phi_k(int k, double t) {
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = Power(t, k - i);
  return v;
}

Eigen::VectorXd psi_k(int k, double t) {
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = Power(t, i + 1);
  return v;
}

ExpStencil stencil(int k, double t) {
  if (k < 1) throw SpecError("stencil: k must be at least 1");
  ExpStencil st;
  st.P = signed_antidiag(k);
  st.Phi = Phi_k(k, t);
  // P is orthogonal, so P^{-1} = P^T.
  st.PhiHat = st.P.transpose() * st.Phi * st.P;
  st.phi = phi_k(k, t);
  st.psi = psi_k(k, t);
  st.GammaHat = Gamma_k(k, 2 * k - 1, t) * st.P;
  return st;
}

double kappa(int n) {
  if (n < 1) throw SpecError("kappa: n must be at least 1");
  return n % 2 == 0 ? 0.0 : 2.0;
}

double kappa_numeric(int n, double t) {
  if (n < 1) throw SpecError("kappa_numeric: n must be at least 1");
  // The Toeplitz system is badly conditioned for larger n, so it is solved
  // in extended precision.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const MatL P = signed_antidiag(n).cast<long double>();
  const long double tl = t;
  auto power = [&](int j) {
    long double v = 1.0L;
    for (int i = 1; i <= j; ++i) v *= tl / i;
    return j < 0 ? 0.0L : v;
  };
  MatL Gamma(n, n);
  VecL phi(n), psi(n);
  for (int i = 1; i <= n; ++i) {
    phi(i - 1) = power(n + 1 - i);
    psi(i - 1) = power(i);
    for (int j = 1; j <= n; ++j) Gamma(i - 1, j - 1) = power(n + 1 - i + j);
  }
  const MatL GammaHat = Gamma * P;
  const VecL x = GammaHat.partialPivLu().solve(phi);
  return static_cast<double>((psi.transpose() * P).dot(x));
}

double factorial(int n) {
  if (n < 0 || n > 20) {
    throw SpecError("factorial: argument " + std::to_string(n) +
                    " outside [0, 20]");
  }
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Eigen::MatrixXd digamma_matrix(int k1, int k2) {
  if (!((0 < k1 && k1 < k2 && k2 <= 2 * k1) || (k1 == k2 && k1 >= 0))) {
    throw SpecError("digamma: need 0 < k1 < k2 <= 2 k1 or k1 == k2");
  }
  const int size = k2 - k1 + 1;
  Eigen::MatrixXd F(size, size);
  for (int i = 1; i <= size; ++i) {
    for (int j = 1; j <= size; ++j) {
      F(i - 1, j - 1) = 1.0 / factorial(k1 - i + j);
    }
  }
  return F;
}

double digamma_det(int k1, int k2) {
  digamma_matrix(k1, k2);  // range and factorial guards
  const int delta = k2 - k1;
  double value = 1.0;
  for (int j = 1; j <= delta; ++j) value *= factorial(j);
  for (int j = k1; j <= k2; ++j) value /= factorial(j);
  return value;
}

double digamma_det_exact(int k1, int k2) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  digamma_matrix(k1, k2);  // range guard
  const int size = k2 - k1 + 1;
  // Scaling column j by (k1 - 1 + j)! turns each entry into the integer
  // (k1 - 1 + j)! / (k1 - i + j)!.
  std::vector<std::vector<cpp_int>> A(size, std::vector<cpp_int>(size));
  cpp_int scale = 1;
  for (int j = 1; j <= size; ++j) {
    cpp_int col = 1;
    for (int v = 2; v <= k1 - 1 + j; ++v) col *= v;
    scale *= col;
    for (int i = 1; i <= size; ++i) {
      cpp_int e = 1;
      for (int v = k1 - i + j + 1; v <= k1 - 1 + j; ++v) e *= v;
      A[i - 1][j - 1] = e;
    }
  }
  // Fraction-free (Bareiss) elimination.
  cpp_int sign = 1, prev = 1;
  for (int k = 0; k < size - 1; ++k) {
    if (A[k][k] == 0) {
      int swap = k + 1;
      while (swap < size && A[swap][k] == 0) ++swap;
      if (swap == size) return 0.0;
      std::swap(A[k], A[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < size; ++i) {
      for (int j = k + 1; j < size; ++j) {
        A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev;
      }
    }
    prev = A[k][k];
  }
  const cpp_rational det(sign * A[size - 1][size - 1], scale);
  return det.convert_to<double>();
}

}  // namespace sympflow
