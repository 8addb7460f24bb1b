#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "nhhj/geometry.hpp"
#include "nhhj/types.hpp"

namespace nhhj {

/// Kinetic-minus-potential system L(q, v) = 1/2 v^T g(q) v - V(q).
///
/// The Hamiltonian H(q, p) = 1/2 p^T g(q)^{-1} p + V(q) is always derived
/// from (g, V); there is no way to enter H directly.
struct MechanicalSystem {
  int dim = 0;
  /// Coordinate names in chart order; these also name CSV columns.
  std::vector<std::string> coordinates;
  MatrixMap metric;
  ScalarMap potential;
  /// Optional dg/dq^j, one n x n matrix per coordinate.
  std::optional<MatrixPartialsMap> metric_partials;
  /// Optional dV/dq.
  std::optional<VectorMap> potential_gradient;
  ParamMap params;
};

/// g(q) checked for shape, finiteness and symmetry (relative 1e-12).
Matrix metric_at(const MechanicalSystem& sys, const ChartPoint& q);

/// Cholesky factor of g(q). Throws MetricDegeneracyError when g is not
/// positive definite or its reciprocal condition estimate is below 1e-12.
Eigen::LLT<Matrix> metric_factor(const MechanicalSystem& sys, const ChartPoint& q);

/// p = g(q) v.
Covector legendre(const MechanicalSystem& sys, const ChartPoint& q, const TangentVec& v);

/// v = g(q)^{-1} p.
TangentVec legendre_inv(const MechanicalSystem& sys, const ChartPoint& q, const Covector& p);

double hamiltonian(const MechanicalSystem& sys, const ChartPoint& q, const Covector& p);

struct HamiltonianDerivatives {
  Vector H_q;
  Vector H_p;
  Matrix H_pp;
  /// H_pq(i, j) = d^2 H / dp_i dq^j.
  Matrix H_pq;
};

/// First derivatives and the mixed/momentum second derivatives of H.
/// H_p and H_pp are always exact; H_q and H_pq use the analytic partials of
/// g and V in analytic mode when present, central differences otherwise.
HamiltonianDerivatives hamiltonian_derivs(const MechanicalSystem& sys, const ChartPoint& q,
                                          const Covector& p,
                                          const DifferentiationStrategy& strat = {});

}  // namespace nhhj
