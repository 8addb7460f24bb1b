#include "nhhj/nonholonomic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

constexpr double kMinRegularityRcond = 1e-12;

Eigen::LLT<Matrix> factor_regularity(const Matrix& C) {
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success || (C.rows() > 0 && llt.rcond() < kMinRegularityRcond)) {
    throw RegularityFailureError("regularity matrix A g^{-1} A^T is singular");
  }
  return llt;
}

}  // namespace

void NonholonomicSystem::validate() const {
  if (mech.dim != constraints.dim) {
    throw std::invalid_argument("system '" + name + "': mechanics has n = " +
                                std::to_string(mech.dim) + " but constraints have n = " +
                                std::to_string(constraints.dim));
  }
  if (constraints.count < 0 || constraints.count > mech.dim) {
    throw std::invalid_argument("system '" + name + "': invalid constraint count");
  }
  if (mech.coordinates.size() != static_cast<std::size_t>(mech.dim)) {
    throw std::invalid_argument("system '" + name + "': coordinate names do not match n");
  }
}

MembershipResult in_constrained_momentum_space(const NonholonomicSystem& sys, const ChartPoint& q,
                                               const Covector& p, double tol) {
  MembershipResult result;
  result.residual = sys.constraints.at(q) * legendre_inv(sys.mech, q, p);
  result.inside = result.residual.size() == 0 || result.residual.lpNorm<Eigen::Infinity>() <= tol;
  return result;
}

Matrix regularity_matrix(const NonholonomicSystem& sys, const ChartPoint& q, const Covector&) {
  // For kinetic-minus-potential systems H_pp = g^{-1} does not depend on p.
  const Matrix A = sys.constraints.at(q);
  const Matrix C = A * metric_factor(sys.mech, q).solve(A.transpose());
  return 0.5 * (C + C.transpose());
}

double regularity_min_eigenvalue(const NonholonomicSystem& sys, const ChartPoint& q,
                                 const Covector& p) {
  const Matrix C = regularity_matrix(sys, q, p);
  if (C.rows() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(C, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Covector project_to_momentum_space(const NonholonomicSystem& sys, const ChartPoint& q,
                                   const Covector& p) {
  if (sys.constraint_count() == 0) return p;
  const Matrix A = sys.constraints.at(q);
  const Eigen::LLT<Matrix> g = metric_factor(sys.mech, q);
  const Matrix C = A * g.solve(A.transpose());
  return p - A.transpose() * factor_regularity(C).solve(A * g.solve(p));
}

namespace {

Vector multipliers_from(const NonholonomicSystem& sys, const ChartPoint& q, const Matrix& A,
                        const HamiltonianDerivatives& d, const DifferentiationStrategy& strat,
                        const MultiplierOptions& opts) {
  const int k = sys.constraint_count();

  if (opts.off_manifold == MultiplierOptions::OffManifold::kThrow) {
    const Vector residual = A * d.H_p;
    if (residual.lpNorm<Eigen::Infinity>() > opts.membership_tol) {
      std::ostringstream msg;
      msg << "momentum is not in the constrained momentum space (residual "
          << residual.transpose() << ")";
      throw ConstraintViolationError(msg.str());
    }
  }

  const std::vector<Matrix> dA = sys.constraints.partials_at(q, strat);
  Matrix dA_along = Matrix::Zero(k, sys.dim());
  for (int j = 0; j < sys.dim(); ++j) dA_along += d.H_p[j] * dA[static_cast<std::size_t>(j)];

  const Matrix C = A * d.H_pp * A.transpose();
  const Vector b = A * (d.H_pp * d.H_q) - dA_along * d.H_p - A * (d.H_pq * d.H_p);
  return factor_regularity(0.5 * (C + C.transpose())).solve(b);
}

}  // namespace

Vector multipliers(const NonholonomicSystem& sys, const ChartPoint& q, const Covector& p,
                   const DifferentiationStrategy& strat, const MultiplierOptions& opts) {
  if (sys.constraint_count() == 0) return Vector(0);
  return multipliers_from(sys, q, sys.constraints.at(q), hamiltonian_derivs(sys.mech, q, p, strat),
                          strat, opts);
}

PhaseVelocity xh_nh(const NonholonomicSystem& sys, const ChartPoint& q, const Covector& p,
                    const DifferentiationStrategy& strat, const MultiplierOptions& opts) {
  const HamiltonianDerivatives d = hamiltonian_derivs(sys.mech, q, p, strat);
  PhaseVelocity out{d.H_p, -d.H_q};
  if (sys.constraint_count() > 0) {
    const Matrix A = sys.constraints.at(q);
    out.p_dot += A.transpose() * multipliers_from(sys, q, A, d, strat, opts);
  }
  return out;
}

}  // namespace nhhj
