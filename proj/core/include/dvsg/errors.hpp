#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dvsg {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& what);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Generator validation failures. Indices are zero-based.
class NegativeOffDiagonal : public Error {
 public:
  NegativeOffDiagonal(std::size_t row, std::size_t col, double value);
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class RowSumNonzero : public Error {
 public:
  RowSumNonzero(std::size_t row, double sum);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class GraphDisconnected : public Error {
 public:
  explicit GraphDisconnected(std::vector<std::vector<std::size_t>> components);
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class NegativeInput : public Error {
 public:
  using Error::Error;
};

// exp(tQ) is not strictly positive for t > 0: the support graph is not
// strongly connected, so the Perron root need not be simple.
class NotIrreducible : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(int iterations, double residual);
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& where, double best_value, double gradient_norm, int iterations);
  double best_value() const { return best_value_; }
  double gradient_norm() const { return gradient_norm_; }
  int iterations() const { return iterations_; }

 private:
  double best_value_;
  double gradient_norm_;
  int iterations_;
};

class UnsupportedSupport : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLarge : public Error {
 public:
  StateSpaceTooLarge(std::size_t states, std::size_t cap);
};

class InfeasibleMarginal : public Error {
 public:
  using Error::Error;
};

}  // namespace dvsg
