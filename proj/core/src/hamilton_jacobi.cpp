#include "nhhj/hamilton_jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

void require_points(std::span<const ChartPoint> points) {
  if (points.empty()) throw std::invalid_argument("at least one sample point is required");
}

ConditionCheck make_check(double residual, double tol) {
  return {residual, tol, residual <= tol};
}

}  // namespace

Covector OneFormCandidate::operator()(const ChartPoint& q) const {
  Covector value = gamma.eval(q);
  if (!value.allFinite()) throw EvaluationDomainError("one-form '" + label + "' is not finite");
  return value;
}

ConditionCheck verify_membership(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                                 std::span<const ChartPoint> points, double tol) {
  require_points(points);
  double worst = 0.0;
  for (const auto& q : points) {
    const MembershipResult m = in_constrained_momentum_space(sys, q, gamma(q), tol);
    if (m.residual.size() > 0) worst = std::max(worst, m.residual.lpNorm<Eigen::Infinity>());
  }
  return make_check(worst, tol);
}

ConditionCheck verify_dgamma(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                             std::span<const ChartPoint> points, double tol,
                             const DifferentiationStrategy& strat) {
  require_points(points);
  double worst = 0.0;
  for (const auto& q : points) {
    const Matrix basis = nullspace_basis(sys.constraints.at(q));
    const Matrix dg = jacobian(gamma.gamma.eval, q, strat, gamma.gamma.jacobian);
    // Pairing matrix P(a, b) = d(gamma)(v_a, v_b) = v_b^T (dg - dg^T) v_a.
    const Matrix pairing = basis.transpose() * (dg.transpose() - dg) * basis;
    for (Eigen::Index i = 0; i < pairing.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < pairing.cols(); ++j) {
        worst = std::max(worst, std::abs(pairing(i, j)));
      }
    }
  }
  return make_check(worst, tol);
}

HjResidual hj_residual(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                       std::span<const ChartPoint> points, std::optional<double> energy) {
  require_points(points);
  HjResidual out;
  out.energies.reserve(points.size());
  for (const auto& q : points) out.energies.push_back(hamiltonian(sys.mech, q, gamma(q)));
  out.energy_estimate = energy.value_or(out.energies.front());
  for (const double e : out.energies) {
    out.spread = std::max(out.spread, std::abs(e - out.energy_estimate));
  }
  return out;
}

VerificationReport verify_candidate(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                                    std::span<const ChartPoint> points,
                                    const VerificationTolerances& tol,
                                    const DifferentiationStrategy& strat, int bracket_depth) {
  require_points(points);
  VerificationReport report;
  report.system = sys.name;
  report.candidate = gamma.label;
  report.sample_points.assign(points.begin(), points.end());

  report.membership = verify_membership(sys, gamma, points, tol.membership);
  report.m_residual_max = report.membership.residual;

  // d(gamma) is evaluated with the pairing of an orthonormal basis of D, so
  // its size is comparable across points.
  report.dgamma = verify_dgamma(sys, gamma, points, tol.dgamma, strat);
  report.dgamma_residual_max = report.dgamma.residual;

  const HjResidual hj = hj_residual(sys, gamma, points);
  report.hj_energy_values = hj.energies;
  report.energy_estimate = hj.energy_estimate;
  report.energy_spread = hj.spread;
  report.hj = make_check(hj.spread, tol.hj);

  int min_rank = sys.dim();
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& q : points) {
    min_rank = std::min(min_rank,
                        bracket_generating_rank(sys.constraints, q, bracket_depth).rank);
    min_eig = std::min(min_eig, regularity_min_eigenvalue(sys, q, gamma(q)));
  }
  report.bracket_rank = min_rank;
  report.regularity_min_eig = min_eig;
  // Rank shortfall is the residual for the bracket condition.
  report.bracket = make_check(static_cast<double>(sys.dim() - min_rank), 0.0);
  report.regularity = {min_eig, tol.regularity_margin, min_eig > tol.regularity_margin};
  return report;
}

VectorField reduced_field(const NonholonomicSystem& sys, const OneFormCandidate& gamma) {
  return {[sys, gamma](const Vector& q) { return legendre_inv(sys.mech, q, gamma(q)); },
          std::nullopt};
}

EquivalenceResult theorem_equivalence_check(const NonholonomicSystem& sys,
                                            const OneFormCandidate& gamma, const ChartPoint& q0,
                                            TimeSpan span, const IntegratorConfig& cfg,
                                            int samples, const DifferentiationStrategy& strat) {
  if (samples < 2) throw std::invalid_argument("equivalence check needs at least two samples");
  const int n = sys.dim();

  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(samples - 1);
    grid[static_cast<std::size_t>(i)] = span.start + frac * (span.end - span.start);
  }
  grid.back() = span.end;

  EquivalenceResult result;
  const Trajectory reduced = integrate_config(reduced_field(sys, gamma), q0, span, cfg, grid);
  result.full = integrate_phase(sys, {q0, gamma(q0), span.start}, span, cfg, strat, grid);

  // Lift c(t) to gamma(c(t)); a lift that leaves the domain truncates the run.
  result.lifted.termination = reduced.termination;
  result.lifted.message = reduced.message;
  result.lifted.steps_accepted = reduced.steps_accepted;
  result.lifted.steps_rejected = reduced.steps_rejected;
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    Vector z(2 * n);
    try {
      z << reduced.states[i], gamma(reduced.states[i]);
    } catch (const EvaluationDomainError& e) {
      result.lifted.termination = Termination::kDomainExit;
      result.lifted.message = e.what();
      break;
    }
    result.lifted.times.push_back(reduced.times[i]);
    result.lifted.states.push_back(std::move(z));
  }

  const std::size_t common = std::min(result.lifted.size(), result.full.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (result.lifted.times[i] != result.full.times[i]) break;
    const double gap = (result.lifted.states[i] - result.full.states[i]).lpNorm<Eigen::Infinity>();
    result.times.push_back(result.lifted.times[i]);
    result.gap.push_back(gap);
    result.max_phase_gap = std::max(result.max_phase_gap, gap);
  }

  if (!result.lifted.completed()) {
    result.termination = result.lifted.termination;
    result.message = "reduced flow: " + result.lifted.message;
  } else if (!result.full.completed()) {
    result.termination = result.full.termination;
    result.message = "full flow: " + result.full.message;
  }
  result.completed = result.termination == Termination::kCompleted;
  return result;
}

}  // namespace nhhj
