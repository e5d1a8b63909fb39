#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pnlevp {

using Real = double;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

using namespace std::complex_literals;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violated by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A point lies on a declared branch cut of the problem.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// T(z,p) is singular to working precision.
class RankError : public Error {
 public:
  RankError(const std::string& what, Complex z, Complex p) : Error(what), z_(z), p_(p) {}
  Complex z() const { return z_; }
  Complex p() const { return p_; }

 private:
  Complex z_;
  Complex p_;
};

/// Loewner realization could not be computed (projected pencil singular).
class RealizationError : public Error {
 public:
  using Error::Error;
};

/// The number of eigenvalues inside the domain changes across parameters.
class AssumptionViolation : public Error {
 public:
  AssumptionViolation(const std::string& what, std::vector<int> ranks)
      : Error(what), ranks_(std::move(ranks)) {}
  const std::vector<int>& ranks() const { return ranks_; }

 private:
  std::vector<int> ranks_;
};

/// A rational model was evaluated at (or numerically on) a spurious pole.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not available for this problem.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Model file could not be parsed or has the wrong version.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Generic numerical breakdown (e.g. degenerate model).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnlevp
