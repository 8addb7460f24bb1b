#pragma once

#include <functional>
#include <string>

#include "nhhj/geometry.hpp"
#include "nhhj/mechanics.hpp"
#include "nhhj/types.hpp"

namespace nhhj {

/// A mechanical system together with its linear nonholonomic constraints.
struct NonholonomicSystem {
  std::string name;
  MechanicalSystem mech;
  ConstraintDistribution constraints;

  [[nodiscard]] int dim() const { return mech.dim; }
  [[nodiscard]] int constraint_count() const { return constraints.count; }
  /// Throws std::invalid_argument when the mechanics and constraints disagree on n.
  void validate() const;
};

struct MembershipResult {
  bool inside = false;
  /// A(q) g(q)^{-1} p, one entry per constraint.
  Vector residual;
};

/// p lies in M_q iff (FL)^{-1}(p) = g^{-1} p lies in D_q, i.e. A g^{-1} p = 0.
MembershipResult in_constrained_momentum_space(const NonholonomicSystem& sys, const ChartPoint& q,
                                               const Covector& p, double tol);

/// C = A H_pp A^T = A g^{-1} A^T (k x k, symmetric).
Matrix regularity_matrix(const NonholonomicSystem& sys, const ChartPoint& q, const Covector& p);

/// Smallest eigenvalue of the regularity matrix; +inf when k = 0.
double regularity_min_eigenvalue(const NonholonomicSystem& sys, const ChartPoint& q,
                                 const Covector& p);

/// Orthogonal projection of p onto M_q in the g^{-1} inner product:
/// p - A^T C^{-1} A g^{-1} p.
Covector project_to_momentum_space(const NonholonomicSystem& sys, const ChartPoint& q,
                                   const Covector& p);

struct MultiplierOptions {
  enum class OffManifold { kThrow, kIgnore };
  /// How to treat a state whose membership residual exceeds membership_tol.
  OffManifold off_manifold = OffManifold::kThrow;
  double membership_tol = 1e-6;
};

/// Lagrange multipliers keeping A(q) H_p constant along the flow.
///
/// Solves C lambda = b with
///   b = A H_pp H_q - (sum_j H_p^j dA/dq^j) H_p - A H_pq H_p,
/// which is d/dt [A(q) H_p(q, p)] = 0 written out along
/// qdot = H_p, pdot = -H_q + A^T lambda.
Vector multipliers(const NonholonomicSystem& sys, const ChartPoint& q, const Covector& p,
                   const DifferentiationStrategy& strat = {}, const MultiplierOptions& opts = {});

struct PhaseVelocity {
  TangentVec q_dot;
  Covector p_dot;
};

/// The nonholonomic Hamiltonian vector field X_H^nh:
/// qdot = H_p, pdot = -H_q + A^T lambda.
PhaseVelocity xh_nh(const NonholonomicSystem& sys, const ChartPoint& q, const Covector& p,
                    const DifferentiationStrategy& strat = {}, const MultiplierOptions& opts = {});

}  // namespace nhhj
