#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symcover {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// One point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VecRef = Eigen::Ref<const Vec>;

enum class ErrorKind {
  EmptyBody,
  Unbounded,
  DimMismatch,
  InvalidSpec,
  OriginNotInterior,
  UnsupportedBodyKind,
  TooFewSamples,
  SingularCovariance,
  NotIsotropic,
  NotCentered,
  DomainError,
  GridTooCoarse,
  UncoverableWitness,
  SolverStall,
  Overflow,
  ConfigParse,
  BodyParse,
  SchemaMismatch,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A Monte Carlo quantity with its standard error. `stderr_` is 0 for exact values.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;

  double upper(double sigmas = 3.0) const { return value + sigmas * stderr_; }
  double lower(double sigmas = 3.0) const { return value - sigmas * stderr_; }
};

inline void require_dim(Eigen::Index got, int want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + ": expected dimension " +
                                            std::to_string(want) + ", got " +
                                            std::to_string(got));
  }
}

}  // namespace symcover
