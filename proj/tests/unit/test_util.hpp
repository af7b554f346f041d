#pragma once

#include <doctest.h>

#include "sympflow/linalg.hpp"

namespace sympflow::testing {

// Frobenius distance relative to max(1, |B|).
inline double rel_diff(const Mat& A, const Mat& B) {
  return (A - B).norm() / std::max(1.0, B.norm());
}

}  // namespace sympflow::testing

#include <cmath>
#include <vector>

namespace sympflow::testing {

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sympflow::testing
