#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace twr {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  using Error::Error;
};

class SingularGramError : public Error {
 public:
  using Error::Error;
};

class WrongScenarioKindError : public Error {
 public:
  using Error::Error;
};

class LengthTooShortError : public Error {
 public:
  using Error::Error;
};

class BracketFailureError : public Error {
 public:
  using Error::Error;
};

class NonMonotoneStepError : public Error {
 public:
  using Error::Error;
};

class MaxIterError : public Error {
 public:
  using Error::Error;
};

// Config parse failure with file position attached.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0) : Error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace twr
