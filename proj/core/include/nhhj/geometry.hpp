#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nhhj/types.hpp"

namespace nhhj {

/// cbrt(machine epsilon), the usual optimum for central first differences.
inline const double kDefaultFdStepScale = std::cbrt(std::numeric_limits<double>::epsilon());

/// Singular values below rank_tol * sigma_max count as zero.
inline constexpr double kDefaultRankTol = 1e-8;

/// How derivatives of chart maps are obtained.
struct DifferentiationStrategy {
  enum class Mode { kAnalytic, kCentralDifference };

  /// Analytic mode uses a supplied Jacobian when one exists and falls back to
  /// central differences otherwise.
  Mode mode = Mode::kAnalytic;
  /// Central-difference step for coordinate j is fd_step_scale * max(1, |q_j|).
  double fd_step_scale = kDefaultFdStepScale;

  static DifferentiationStrategy analytic() { return {}; }
  static DifferentiationStrategy finite_difference(double step_scale = kDefaultFdStepScale) {
    return {Mode::kCentralDifference, step_scale};
  }

  void validate() const;
};

/// A vector field on Q, optionally carrying its analytic Jacobian.
struct VectorField {
  VectorMap eval;
  std::optional<MatrixMap> jacobian;
};

/// A one-form q -> gamma(q) on Q, optionally carrying d(gamma_i)/dq^j.
struct OneForm {
  VectorMap eval;
  std::optional<MatrixMap> jacobian;
};

/// Linear velocity constraints omega^s = A^s_i dq^i, s = 1..k, on an n-dimensional chart.
/// The distribution D is ker A(q); the annihilator D° is the row space of A(q).
struct ConstraintDistribution {
  int dim = 0;
  int count = 0;
  MatrixMap matrix;
  /// Optional analytic dA/dq^j, one k x n matrix per coordinate.
  std::optional<MatrixPartialsMap> partials;

  /// A(q), validated for shape and finiteness.
  [[nodiscard]] Matrix at(const ChartPoint& q) const;

  /// dA/dq^j for every j, analytic when available and requested.
  [[nodiscard]] std::vector<Matrix> partials_at(const ChartPoint& q,
                                                const DifferentiationStrategy& strat) const;
};

/// k = 0: D is all of TQ.
ConstraintDistribution unconstrained_distribution(int dim);

/// q-independent constraint rows. Always integrable, so never bracket generating when k > 0.
ConstraintDistribution constant_distribution(Matrix rows);

/// Partial derivatives df_i/dq^j of f at q (an m x n matrix).
///
/// In analytic mode `analytic` is used when supplied. Otherwise central
/// differences with h_j = fd_step_scale * max(1, |q_j|). Throws
/// EvaluationDomainError if f returns non-finite values.
Matrix jacobian(const VectorMap& f, const ChartPoint& q, const DifferentiationStrategy& strat,
                const std::optional<MatrixMap>& analytic = std::nullopt);

/// Central-difference gradient of a scalar map.
Vector gradient(const ScalarMap& f, const ChartPoint& q, double step_scale = kDefaultFdStepScale);

/// Orthonormal basis of ker A as the columns of an n x (n - k) matrix.
///
/// Computed from a full singular value decomposition. Throws
/// DegenerateConstraintsError when A does not have full row rank k at
/// tolerance rank_tol (relative to the largest singular value) or when k > n.
Matrix nullspace_basis(const Matrix& A, double rank_tol = kDefaultRankTol);

/// d(gamma)(v, w) = sum_{i,j} d(gamma_i)/dq^j (v^j w^i - w^j v^i).
double d_oneform_pair(const OneForm& gamma, const ChartPoint& q, const TangentVec& v,
                      const TangentVec& w, const DifferentiationStrategy& strat = {});

/// [X, Y](q) = J_Y(q) X(q) - J_X(q) Y(q).
TangentVec lie_bracket(const VectorField& X, const VectorField& Y, const ChartPoint& q,
                       const DifferentiationStrategy& strat = {});

/// Smooth local frame of D near q0: v_i(q) = P(q) N e_i, where N is an
/// orthonormal basis of ker A(q0) and P(q) = I - A^T (A A^T)^{-1} A is the
/// orthogonal projector onto ker A(q). The fields are orthonormal at q0.
std::vector<VectorField> local_frame(const ConstraintDistribution& dist, const ChartPoint& q0,
                                     double rank_tol = kDefaultRankTol);

struct BracketRankResult {
  /// Dimension of the span of D and its iterated brackets at q.
  int rank = 0;
  /// Smallest bracket depth at which `rank` was reached.
  int depth_reached = 0;
  /// rank after depth 0, 1, ..., up to the last depth computed.
  std::vector<int> profile;
};

/// Pointwise bracket-generating test at q.
///
/// Depth 0 is D itself; depth d adds the right-nested brackets
/// [v_i1, [v_i2, ..., [v_id, v_j]]] of the local frame. Stops early once the
/// rank reaches n. Nested brackets are evaluated by nested central
/// differences; the step at nesting level L is fd_step_scale^((2/3)^(L-1))
/// and the rank threshold at that level is raised to the estimated
/// difference noise when that exceeds rank_tol. The reported rank is
/// nondecreasing in depth. A full rank certifies D is completely nonholonomic
/// at q only, not globally.
BracketRankResult bracket_generating_rank(const ConstraintDistribution& dist, const ChartPoint& q,
                                          int max_depth = 3, double rank_tol = kDefaultRankTol,
                                          const DifferentiationStrategy& strat = {});

}  // namespace nhhj
