#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nhhj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates q^i of a point of Q in the system's single global chart.
/// Circle coordinates are carried as unwrapped reals (radians).
using ChartPoint = Vector;
/// Components of a tangent vector v in T_qQ (generalized velocities).
using TangentVec = Vector;
/// Components of a covector in T*_qQ (generalized momenta).
using Covector = Vector;

using ScalarMap = std::function<double(const Vector&)>;
using VectorMap = std::function<Vector(const Vector&)>;
using MatrixMap = std::function<Matrix(const Vector&)>;
/// Partial derivatives of a matrix-valued map; entry j holds the derivative
/// with respect to q^j.
using MatrixPartialsMap = std::function<std::vector<Matrix>(const Vector&)>;

/// Named real constants (physical parameters, ansatz constants).
using ParamMap = std::map<std::string, double>;

/// A point (q, p) of T*Q at time t.
struct PhaseState {
  ChartPoint q;
  Covector p;
  double t = 0.0;
};

/// Closed interval [start, end] of integration time, in seconds.
struct TimeSpan {
  double start = 0.0;
  double end = 0.0;
};

/// Looks up `key`, falling back to `fallback` when absent.
inline double param_or(const ParamMap& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace nhhj
