#include "dvsg/errors.hpp"

#include <sstream>

namespace dvsg {

namespace {

std::string components_message(const std::vector<std::vector<std::size_t>>& comps) {
  std::ostringstream os;
  os << "support graph is disconnected; components:";
  for (const auto& c : comps) {
    os << " {";
    for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k];
    os << "}";
  }
  return os.str();
}

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual,
                                     const std::string& what)
    : Error(what + ": expected length " + std::to_string(expected) + ", got " +
            std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

NegativeOffDiagonal::NegativeOffDiagonal(std::size_t row, std::size_t col, double value)
    : Error("negative off-diagonal rate Q[" + std::to_string(row) + "][" + std::to_string(col) +
            "] = " + std::to_string(value)),
      row_(row),
      col_(col) {}

RowSumNonzero::RowSumNonzero(std::size_t row, double sum)
    : Error("row " + std::to_string(row) + " does not sum to zero (sum = " + std::to_string(sum) +
            ")"),
      row_(row) {}

GraphDisconnected::GraphDisconnected(std::vector<std::vector<std::size_t>> components)
    : Error(components_message(components)), components_(std::move(components)) {}

ConvergenceFailure::ConvergenceFailure(int iterations, double residual)
    : Error("eigensolver failed to converge after " + std::to_string(iterations) +
            " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

NotConverged::NotConverged(const std::string& where, double best_value, double gradient_norm,
                           int iterations)
    : Error(where + " did not converge after " + std::to_string(iterations) +
            " iterations (best value " + std::to_string(best_value) + ", gradient norm " +
            std::to_string(gradient_norm) + ")"),
      best_value_(best_value),
      gradient_norm_(gradient_norm),
      iterations_(iterations) {}

StateSpaceTooLarge::StateSpaceTooLarge(std::size_t states, std::size_t cap)
    : Error("state space of " + std::to_string(states) + " states exceeds cap of " +
            std::to_string(cap)) {}

}  // namespace dvsg
