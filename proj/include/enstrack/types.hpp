#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace enstrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Riccati samples and the SIMD kernels use row-major storage.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while integrating; the time grid is too coarse
/// for the dynamics (or the dynamics blew up).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : Error(what + " (diverged at step " + std::to_string(step) +
              "; refine the time grid)"),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Uniform grid t_k = k * T / K, k = 0..K, with t_K == T exactly.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }
  double node(std::size_t k) const;

  /// Index of the interval containing t and the local fraction in [0,1].
  /// t == T maps to (K-1, 1).
  std::pair<std::size_t, double> locate(double t) const;

  bool operator==(const TimeGrid& other) const noexcept {
    return horizon_ == other.horizon_ && steps_ == other.steps_;
  }

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

}  // namespace enstrack
