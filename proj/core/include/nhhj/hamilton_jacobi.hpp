#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhhj/geometry.hpp"
#include "nhhj/integrate.hpp"
#include "nhhj/nonholonomic.hpp"
#include "nhhj/types.hpp"

namespace nhhj {

/// A candidate solution gamma: Q -> T*Q of the nonholonomic Hamilton-Jacobi
/// equation, with the constants of its parameterized family.
struct OneFormCandidate {
  std::string label;
  OneForm gamma;
  ParamMap params;

  [[nodiscard]] Covector operator()(const ChartPoint& q) const;
};

/// Outcome of one sampled condition: pass iff residual <= tolerance.
struct ConditionCheck {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct HjResidual {
  /// H(q, gamma(q)) at each sample point.
  std::vector<double> energies;
  /// The pinned energy, or the value at the first sample point.
  double energy_estimate = 0.0;
  /// max |H(q, gamma(q)) - energy_estimate|.
  double spread = 0.0;
};

struct VerificationTolerances {
  double membership = 1e-10;
  double dgamma = 1e-8;
  double hj = 1e-8;
  /// Regularity passes when the smallest eigenvalue exceeds this margin.
  double regularity_margin = 1e-10;
};

/// Sampled evidence for the hypotheses and the HJ equation of one candidate.
/// All verdicts hold at the sample points only.
struct VerificationReport {
  std::string system;
  std::string candidate;
  std::vector<ChartPoint> sample_points;
  double m_residual_max = 0.0;
  double dgamma_residual_max = 0.0;
  std::vector<double> hj_energy_values;
  double energy_estimate = 0.0;
  double energy_spread = 0.0;
  /// Smallest bracket-generating rank over the sample points.
  int bracket_rank = 0;
  /// Smallest eigenvalue of A g^{-1} A^T over the sample points (+inf when k = 0).
  double regularity_min_eig = 0.0;
  ConditionCheck membership;
  ConditionCheck dgamma;
  ConditionCheck hj;
  ConditionCheck bracket;
  ConditionCheck regularity;

  /// True iff gamma(q) in M, d(gamma) on D x D and H o gamma = E all pass.
  [[nodiscard]] bool hj_conditions_pass() const { return membership.pass && dgamma.pass && hj.pass; }
};

/// max over points of |A(q) g^{-1} gamma(q)|_inf.
ConditionCheck verify_membership(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                                 std::span<const ChartPoint> points, double tol);

/// max over points and over pairs i < j of an orthonormal basis {v_i} of D_q
/// of |d(gamma)(v_i, v_j)|.
ConditionCheck verify_dgamma(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                             std::span<const ChartPoint> points, double tol,
                             const DifferentiationStrategy& strat = {});

/// Evaluates H o gamma at every point. E is pinned when `energy` is given and
/// otherwise estimated from the first point.
HjResidual hj_residual(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                       std::span<const ChartPoint> points,
                       std::optional<double> energy = std::nullopt);

/// Runs all sampled checks and assembles the report.
VerificationReport verify_candidate(const NonholonomicSystem& sys, const OneFormCandidate& gamma,
                                    std::span<const ChartPoint> points,
                                    const VerificationTolerances& tol = {},
                                    const DifferentiationStrategy& strat = {},
                                    int bracket_depth = 3);

/// The configuration-space field q -> H_p(q, gamma(q)) = g(q)^{-1} gamma(q).
VectorField reduced_field(const NonholonomicSystem& sys, const OneFormCandidate& gamma);

struct EquivalenceResult {
  /// max over common sample times of |(c, gamma(c)) - (q, p)|_inf.
  double max_phase_gap = 0.0;
  std::vector<double> times;
  /// Gap at each common sample time.
  std::vector<double> gap;
  /// Reduced curve c(t) lifted to phase space as [c; gamma(c)].
  Trajectory lifted;
  /// Full X_H^nh trajectory from (q0, gamma(q0)).
  Trajectory full;
  /// False when either run stopped before the end of the span.
  bool completed = true;
  Termination termination = Termination::kCompleted;
  std::string message;
};

/// Integrates the reduced flow from q0 and the full nonholonomic flow from
/// (q0, gamma(q0)), both recorded at `samples` uniformly spaced times, and
/// compares gamma(c(t)) against the full trajectory. A domain exit in either
/// run truncates the comparison to the common recorded prefix.
EquivalenceResult theorem_equivalence_check(const NonholonomicSystem& sys,
                                            const OneFormCandidate& gamma, const ChartPoint& q0,
                                            TimeSpan span, const IntegratorConfig& cfg,
                                            int samples = 101,
                                            const DifferentiationStrategy& strat = {});

}  // namespace nhhj
