#pragma once

#include <cstdint>

#include "sympflow/flow.hpp"
#include "sympflow/hjcf.hpp"

namespace sympflow {

/// A Hamiltonian H = S J S^{-1} built from a canonical form J and a seeded
/// symplectic S, with a seeded Hermitian initial value W0.
struct ExampleInstance {
  JordanSpec spec;
  Mat S;
  Mat W0;
  Mat H;
  /// Closed-form propagator t -> S e^{J t} S^{-1}.
  Propagator prop;
};

ExampleInstance make_instance(const JordanSpec& spec, std::uint64_t seed);

/// One coupled block with first part of size 2 and second part of size 1.
/// The d variant uses gamma = 7.8340, delta = 7.2888; the c variant uses
/// eta = 7.8340.
JordanSpec example_41_spec(bool c_case = false);

/// Three d blocks with part sizes (2, 1), (1, 1), (1, 0).
JordanSpec example_42_spec();

/// which is 41 or 42; UsageError otherwise.
ExampleInstance example_instance(int which, std::uint64_t seed);

}  // namespace sympflow
