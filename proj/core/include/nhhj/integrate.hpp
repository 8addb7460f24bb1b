#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nhhj/geometry.hpp"
#include "nhhj/nonholonomic.hpp"
#include "nhhj/types.hpp"

namespace nhhj {

struct IntegratorConfig {
  enum class Method { kRk4, kAdaptive45 };

  Method method = Method::kRk4;
  /// Fixed step for rk4; initial trial step for adaptive45.
  double h = 1e-3;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Upper bound on attempted steps (accepted plus rejected).
  long max_steps = 50'000'000;
  /// Record every record_stride-th accepted step. Ignored when explicit
  /// output times are requested.
  int record_stride = 1;

  /// Throws std::invalid_argument on nonpositive h, tolerances, max_steps or stride.
  void validate() const;
};

enum class Termination { kCompleted, kDomainExit, kStepLimit };

std::string to_string(Termination termination);

/// Time-stamped states with aligned monitor channels.
struct Trajectory {
  std::vector<double> times;
  /// Full ODE state at each recorded time: [q; p] for phase flows, q for
  /// configuration flows.
  std::vector<Vector> states;
  /// Channel name -> one value per recorded time.
  std::map<std::string, std::vector<double>> monitors;
  Termination termination = Termination::kCompleted;
  /// Diagnostic attached to a domain exit or step-limit stop.
  std::string message;
  long steps_accepted = 0;
  long steps_rejected = 0;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] bool completed() const { return termination == Termination::kCompleted; }
};

/// Right-hand side z' = f(t, z).
using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Named diagnostic channels evaluated on every recorded state.
struct MonitorSet {
  std::vector<std::string> names;
  std::function<Vector(const Vector&)> eval;
};

/// Integrates z' = f(t, z) over `span`.
///
/// rk4 takes steps t_i = start + i h, the last one clipped to `span.end`.
/// adaptive45 is Dormand-Prince 5(4) with local extrapolation. When
/// `output_times` is nonempty, steps are additionally clipped to land on
/// every output time inside (start, end], and only those times plus
/// `span.start` are recorded. An EvaluationDomainError raised by `f` or the
/// monitors ends the run with Termination::kDomainExit; exhausting
/// max_steps ends it with kStepLimit. A non-finite state throws
/// IntegrationError.
Trajectory integrate_ode(const OdeRhs& f, const Vector& z0, TimeSpan span,
                         const IntegratorConfig& cfg, const MonitorSet* monitors = nullptr,
                         std::span<const double> output_times = {});

/// Integrates the nonholonomic field X_H^nh from z0 (assumed on M), with an
/// `energy` channel and `constraint_residual_s` channels (s = 1..k) holding
/// A(q) g^{-1} p.
Trajectory integrate_phase(const NonholonomicSystem& sys, const PhaseState& z0, TimeSpan span,
                           const IntegratorConfig& cfg,
                           const DifferentiationStrategy& strat = {},
                           std::span<const double> output_times = {});

/// Integrates a configuration-space field q' = X(q).
Trajectory integrate_config(const VectorField& field, const ChartPoint& q0, TimeSpan span,
                            const IntegratorConfig& cfg,
                            std::span<const double> output_times = {});

/// Step-size update h * clamp(0.9 (tol / err_est)^(1/5), 0.2, 5).
/// err_est = 0 gives the growth clamp 5h.
double adaptive_step_control(double err_est, double tol, double h);

/// Splits a recorded phase state [q; p] of a system with n coordinates.
PhaseState phase_state_at(const Trajectory& traj, std::size_t index, int n);

}  // namespace nhhj
