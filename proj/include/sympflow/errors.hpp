#pragma once

#include <stdexcept>
#include <string>

namespace sympflow {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SYMPFLOW_DEFINE_ERROR(Name)      \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

SYMPFLOW_DEFINE_ERROR(DimensionError);
SYMPFLOW_DEFINE_ERROR(OverflowError);
SYMPFLOW_DEFINE_ERROR(SingularityError);
SYMPFLOW_DEFINE_ERROR(BranchCutError);
SYMPFLOW_DEFINE_ERROR(NotInClassError);
SYMPFLOW_DEFINE_ERROR(IndexTooHighError);
SYMPFLOW_DEFINE_ERROR(NumericalBreakdown);
SYMPFLOW_DEFINE_ERROR(NotRegularError);
SYMPFLOW_DEFINE_ERROR(UsageError);
SYMPFLOW_DEFINE_ERROR(SpecError);
SYMPFLOW_DEFINE_ERROR(HypothesisError);
SYMPFLOW_DEFINE_ERROR(AssumptionError);
SYMPFLOW_DEFINE_ERROR(PoleError);
SYMPFLOW_DEFINE_ERROR(NoSolution);

#undef SYMPFLOW_DEFINE_ERROR

/// Raised when a doubling step meets a (numerically) singular matrix. The
/// offending smallest singular value is kept for diagnostics.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, double sigma_min)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

}  // namespace sympflow
