// Error taxonomy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace ot {

enum class errc {
  empty_measure,
  non_finite,
  length_mismatch,
  negative_weight,
  solver_failure,
  too_large,
  not_real,
  off_circle,
  out_of_range,
  eigen_failure,
  svd_failure,
  dim_mismatch,
  not_normal,
  not_unitary,
  certificate_gap,
  bad_plan,
  invalid_argument,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_measure:    return "EmptyMeasure";
    case errc::non_finite:       return "NonFinite";
    case errc::length_mismatch:  return "LengthMismatch";
    case errc::negative_weight:  return "NegativeWeight";
    case errc::solver_failure:   return "SolverFailure";
    case errc::too_large:        return "TooLarge";
    case errc::not_real:         return "NotReal";
    case errc::off_circle:       return "OffCircle";
    case errc::out_of_range:     return "OutOfRange";
    case errc::eigen_failure:    return "EigenFailure";
    case errc::svd_failure:      return "SVDFailure";
    case errc::dim_mismatch:     return "DimMismatch";
    case errc::not_normal:       return "NotNormal";
    case errc::not_unitary:      return "NotUnitary";
    case errc::certificate_gap:  return "CertificateGap";
    case errc::bad_plan:         return "BadPlan";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ot
