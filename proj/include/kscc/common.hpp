#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kscc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed input: bad dimensions, out-of-range indices, unparseable files.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical-consistency failure, e.g. a Gram matrix that is not PSD.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

}  // namespace kscc
