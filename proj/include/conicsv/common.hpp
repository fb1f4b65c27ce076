#ifndef CONICSV_COMMON_HPP
#define CONICSV_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace conicsv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// Selects the implementation of a data-parallel kernel. The serial path is
// the reference; the OpenMP path must return bit-identical results.
enum class Backend { Serial, OpenMP };

// Malformed or inconsistent input (dimensions, non-finite entries, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure that the caller may be able to recover from.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace conicsv

#endif  // CONICSV_COMMON_HPP
