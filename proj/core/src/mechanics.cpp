#include "nhhj/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kMinReciprocalCondition = 1e-12;

void check_dims(const MechanicalSystem& sys, const Vector& x, const char* what) {
  if (x.size() != sys.dim) {
    std::ostringstream msg;
    msg << what << " has length " << x.size() << ", expected " << sys.dim;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Matrix metric_at(const MechanicalSystem& sys, const ChartPoint& q) {
  check_dims(sys, q, "q");
  Matrix g = sys.metric(q);
  if (g.rows() != sys.dim || g.cols() != sys.dim) {
    throw std::invalid_argument("metric has wrong shape");
  }
  if (!g.allFinite()) throw EvaluationDomainError("non-finite metric");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw MetricDegeneracyError("metric is not symmetric");
  }
  return g;
}

Eigen::LLT<Matrix> metric_factor(const MechanicalSystem& sys, const ChartPoint& q) {
  Eigen::LLT<Matrix> llt(metric_at(sys, q));
  if (llt.info() != Eigen::Success) {
    throw MetricDegeneracyError("metric is not positive definite");
  }
  if (sys.dim > 0 && llt.rcond() < kMinReciprocalCondition) {
    throw MetricDegeneracyError("metric is too ill-conditioned to invert");
  }
  return llt;
}

Covector legendre(const MechanicalSystem& sys, const ChartPoint& q, const TangentVec& v) {
  check_dims(sys, v, "v");
  return metric_at(sys, q) * v;
}

TangentVec legendre_inv(const MechanicalSystem& sys, const ChartPoint& q, const Covector& p) {
  check_dims(sys, p, "p");
  return metric_factor(sys, q).solve(p);
}

double hamiltonian(const MechanicalSystem& sys, const ChartPoint& q, const Covector& p) {
  const TangentVec v = legendre_inv(sys, q, p);
  const double potential = sys.potential(q);
  if (!std::isfinite(potential)) throw EvaluationDomainError("non-finite potential");
  return 0.5 * p.dot(v) + potential;
}

HamiltonianDerivatives hamiltonian_derivs(const MechanicalSystem& sys, const ChartPoint& q,
                                          const Covector& p, const DifferentiationStrategy& strat) {
  check_dims(sys, p, "p");
  const Eigen::LLT<Matrix> llt = metric_factor(sys, q);
  const int n = sys.dim;

  HamiltonianDerivatives d;
  d.H_p = llt.solve(p);
  d.H_pp = llt.solve(Matrix::Identity(n, n));
  d.H_pp = 0.5 * (d.H_pp + d.H_pp.transpose());

  const bool analytic = strat.mode == DifferentiationStrategy::Mode::kAnalytic;
  if (analytic && sys.metric_partials && sys.potential_gradient) {
    const std::vector<Matrix> dg = (*sys.metric_partials)(q);
    const Vector dV = (*sys.potential_gradient)(q);
    d.H_q.resize(n);
    d.H_pq.resize(n, n);
    for (int j = 0; j < n; ++j) {
      // d(g^{-1})/dq^j = -g^{-1} (dg/dq^j) g^{-1}
      const Vector dg_v = dg[static_cast<std::size_t>(j)] * d.H_p;
      d.H_q[j] = -0.5 * d.H_p.dot(dg_v) + dV[j];
      d.H_pq.col(j) = -llt.solve(dg_v);
    }
  } else {
    strat.validate();
    const ScalarMap H = [&sys, &p](const Vector& x) { return hamiltonian(sys, x, p); };
    d.H_q = gradient(H, q, strat.fd_step_scale);
    const VectorMap Hp = [&sys, &p](const Vector& x) { return legendre_inv(sys, x, p); };
    d.H_pq = jacobian(Hp, q, DifferentiationStrategy::finite_difference(strat.fd_step_scale));
  }
  return d;
}

}  // namespace nhhj
