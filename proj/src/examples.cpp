#include "sympflow/examples.hpp"

#include <algorithm>
#include <limits>

#include "sympflow/errors.hpp"

namespace sympflow {

ExampleInstance make_instance(const JordanSpec& spec, std::uint64_t seed) {
  spec.Validate();
  const int n = spec.half_dim();
  ExampleInstance ex;
  ex.spec = spec;
  ex.S = random_instance(InstanceKind::kSymplectic, n, seed);
  ex.W0 = random_instance(InstanceKind::kHermitian, n, seed + 1);
  const Mat J = make_J(n);
  // S^{-1} = J^H S^H J for symplectic S.
  const Mat S_inv = J.adjoint() * ex.S.adjoint() * J;
  ex.H = hamiltonian_part(ex.S * build_J(spec) * S_inv);
  const Mat S = ex.S;
  // Off-axis eigenvalues grow exponentially; keep each step's growth near e.
  double growth = 0.0;
  for (const RBlock& b : spec.r) growth = std::max(growth, b.lambda.real());
  const double max_step = growth > 0 ? 1.0 / growth
                                     : std::numeric_limits<double>::infinity();
  ex.prop = Propagator(
      ex.H,
      [spec, S, S_inv](double t) -> Mat { return S * exp_J(spec, t) * S_inv; },
      max_step);
  return ex;
}

JordanSpec example_41_spec(bool c_case) {
  JordanSpec spec;
  if (c_case) {
    spec.c.push_back(CBlock{7.8340, 1, 2, 1});
  } else {
    spec.d.push_back(DBlock{7.8340, 7.2888, 1, 2, 1});
  }
  return spec;
}

JordanSpec example_42_spec() {
  JordanSpec spec;
  spec.d.push_back(DBlock{5.8868, 9.2031, 1, 2, 1});
  spec.d.push_back(DBlock{4.8968, 0.7449, 1, 1, 1});
  spec.d.push_back(DBlock{2.2337, 9.7818, 1, 1, 0});
  return spec;
}

ExampleInstance example_instance(int which, std::uint64_t seed) {
  switch (which) {
    case 41: return make_instance(example_41_spec(), seed);
    case 42: return make_instance(example_42_spec(), seed);
    default: throw UsageError("example: --which must be 41 or 42");
  }
}

}  // namespace sympflow
