#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace gvf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Smooth scalar function on the ambient space R^m.
using ScalarField = std::function<double(const Vec&)>;
/// Ambient (Euclidean) gradient of a ScalarField.
using GradientField = std::function<Vec(const Vec&)>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constraint gradients are numerically dependent at the evaluation point.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class RetractionDiverged : public Error {
 public:
  using Error::Error;
};

/// Non-finite values showed up during evaluation or integration.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class NewtonDiverged : public Error {
 public:
  using Error::Error;
};

class UnknownScenario : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (scenario file, grid spec, start vector).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace gvf
