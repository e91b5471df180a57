#include "dvsg/types.hpp"

#include <algorithm>
#include <cmath>

#include "dvsg/errors.hpp"

namespace dvsg {

Potential::Potential(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw NonFinite("potential has non-finite entries");
}

Potential Potential::operator+(const Potential& other) const {
  if (other.dim() != dim())
    throw DimensionMismatch(static_cast<std::size_t>(dim()),
                            static_cast<std::size_t>(other.dim()), "potential sum");
  return Potential(values_ + other.values_);
}

Potential Potential::shifted(double c) const {
  return Potential((values_.array() + c).matrix());
}

ProbMeasure::ProbMeasure(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw InvalidArgument("probability measure on an empty space");
  if (!weights_.allFinite()) throw NonFinite("probability measure has non-finite entries");
  if (weights_.minCoeff() < 0.0) throw InvalidArgument("probability measure has negative weight");
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kSumTolerance)
    throw InvalidArgument("probability weights sum to " + std::to_string(total) + ", not 1");
  weights_ /= total;
}

ProbMeasure ProbMeasure::normalized(const Vector& weights) {
  if (weights.size() == 0) throw InvalidArgument("probability measure on an empty space");
  if (!weights.allFinite()) throw NonFinite("weights have non-finite entries");
  if (weights.minCoeff() < 0.0) throw InvalidArgument("cannot normalize negative weights");
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidArgument("cannot normalize a zero vector");
  return ProbMeasure(weights / total);
}

ProbMeasure ProbMeasure::uniform(Eigen::Index dim) {
  return ProbMeasure(Vector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

ProbMeasure ProbMeasure::dirac(Eigen::Index dim, Eigen::Index at) {
  Vector w = Vector::Zero(dim);
  w[at] = 1.0;
  return ProbMeasure(std::move(w));
}

double total_variation(const ProbMeasure& a, const ProbMeasure& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch(static_cast<std::size_t>(a.dim()), static_cast<std::size_t>(b.dim()),
                            "total variation");
  return 0.5 * (a.weights() - b.weights()).cwiseAbs().sum();
}

double scale_of(const Matrix& a) {
  return a.size() == 0 ? 1.0 : std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace dvsg
