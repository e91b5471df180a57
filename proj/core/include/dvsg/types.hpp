#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace dvsg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Real-valued function on the state space. Entries are finite.
class Potential {
 public:
  Potential() = default;
  explicit Potential(Vector values);

  static Potential zero(Eigen::Index dim) { return Potential(Vector::Zero(dim)); }
  static Potential constant(Eigen::Index dim, double c) { return Potential(Vector::Constant(dim, c)); }

  Eigen::Index dim() const { return values_.size(); }
  const Vector& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }

  Potential operator+(const Potential& other) const;
  Potential shifted(double c) const;

 private:
  Vector values_;
};

// Probability vector: entries >= 0, summing to one.
class ProbMeasure {
 public:
  static constexpr double kSumTolerance = 1e-12;

  ProbMeasure() = default;
  // Throws InvalidArgument unless weights are nonnegative and sum to 1 within
  // kSumTolerance. Sub-tolerance drift in the sum is normalized away.
  explicit ProbMeasure(Vector weights);

  // Normalizes a nonnegative, not identically zero vector.
  static ProbMeasure normalized(const Vector& weights);
  static ProbMeasure uniform(Eigen::Index dim);
  static ProbMeasure dirac(Eigen::Index dim, Eigen::Index at);

  Eigen::Index dim() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double operator[](Eigen::Index i) const { return weights_[i]; }

  double integrate(const Vector& f) const { return weights_.dot(f); }
  bool strictly_positive() const { return dim() > 0 && weights_.minCoeff() > 0.0; }

 private:
  Vector weights_;
};

double total_variation(const ProbMeasure& a, const ProbMeasure& b);

// max(1, max |A_ij|): the reference magnitude that tolerances are scaled by.
double scale_of(const Matrix& a);

}  // namespace dvsg
