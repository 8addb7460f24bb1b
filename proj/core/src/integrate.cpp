#include "nhhj/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

// Dormand-Prince 5(4) tableau (Dormand & Prince 1980, "RK5(4)7M").
// Row i of kA holds a_{i+1, 1..i}; the seventh stage is evaluated at the
// 5th-order solution, so its derivative is reused as the next step's first
// stage (first same as last).
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5.0, 0, 0, 0, 0, 0},
    {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0, 0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
};
// 5th-order weights equal the last row of kA (b7 = 0).
// Error weights b - b*, with b* the embedded 4th-order weights
// {5179/57600, 0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40}.
constexpr std::array<double, 7> kE = {
    71.0 / 57600.0,  0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0,
    22.0 / 525.0,    -1.0 / 40.0};

void require_finite(const Vector& z, double t) {
  if (!z.allFinite()) {
    std::ostringstream msg;
    msg << "integrator produced a non-finite state at t = " << t;
    throw IntegrationError(msg.str());
  }
}

Vector rk4_step(const OdeRhs& f, double t, const Vector& z, double h) {
  const Vector k1 = f(t, z);
  const Vector k2 = f(t + 0.5 * h, z + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, z + 0.5 * h * k2);
  const Vector k4 = f(t + h, z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Dp45Step {
  Vector z_new;
  Vector k_last;
  double err = 0.0;
};

Dp45Step dp45_step(const OdeRhs& f, double t, const Vector& z, const Vector& k1, double h) {
  std::array<Vector, 7> k;
  k[0] = k1;
  for (int stage = 1; stage < 7; ++stage) {
    Vector arg = z;
    for (int j = 0; j < stage; ++j) {
      if (kA[stage][j] != 0.0) arg += h * kA[stage][j] * k[static_cast<std::size_t>(j)];
    }
    if (stage == 6) {
      // Stage 7 is evaluated at the propagated solution.
      k[6] = f(t + h, arg);
      Dp45Step out;
      out.z_new = std::move(arg);
      Vector err = Vector::Zero(z.size());
      for (std::size_t j = 0; j < 7; ++j) {
        if (kE[j] != 0.0) err += h * kE[j] * k[j];
      }
      out.err = err.lpNorm<Eigen::Infinity>();
      out.k_last = k[6];
      return out;
    }
    k[static_cast<std::size_t>(stage)] = f(t + kC[static_cast<std::size_t>(stage)] * h, arg);
  }
  return {};
}

class Recorder {
 public:
  Recorder(Trajectory& traj, const MonitorSet* monitors) : traj_(traj), monitors_(monitors) {
    if (monitors_) {
      for (const auto& name : monitors_->names) traj_.monitors[name];
    }
  }

  void record(double t, const Vector& z) {
    Vector values;
    if (monitors_) {
      values = monitors_->eval(z);
      if (values.size() != static_cast<Eigen::Index>(monitors_->names.size())) {
        throw std::logic_error("monitor returned the wrong number of channels");
      }
    }
    traj_.times.push_back(t);
    traj_.states.push_back(z);
    if (monitors_) {
      for (std::size_t c = 0; c < monitors_->names.size(); ++c) {
        traj_.monitors[monitors_->names[c]].push_back(values[static_cast<Eigen::Index>(c)]);
      }
    }
  }

 private:
  Trajectory& traj_;
  const MonitorSet* monitors_;
};

}  // namespace

void IntegratorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("rel_tol and abs_tol must be positive");
  }
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  if (record_stride <= 0) throw std::invalid_argument("record_stride must be positive");
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::kCompleted: return "completed";
    case Termination::kDomainExit: return "domain_exit";
    case Termination::kStepLimit: return "step_limit";
  }
  return "unknown";
}

double adaptive_step_control(double err_est, double tol, double h) {
  if (err_est < 0.0 || !(tol > 0.0)) {
    throw std::invalid_argument("adaptive_step_control needs err_est >= 0 and tol > 0");
  }
  if (err_est == 0.0) return 5.0 * h;
  const double factor = 0.9 * std::pow(tol / err_est, 0.2);
  return h * std::clamp(factor, 0.2, 5.0);
}

Trajectory integrate_ode(const OdeRhs& f, const Vector& z0, TimeSpan span,
                         const IntegratorConfig& cfg, const MonitorSet* monitors,
                         std::span<const double> output_times) {
  cfg.validate();
  if (!(span.end >= span.start) || !std::isfinite(span.start) || !std::isfinite(span.end)) {
    throw std::invalid_argument("time span must satisfy start <= end");
  }
  require_finite(z0, span.start);

  const bool explicit_output = !output_times.empty();
  std::vector<double> breakpoints;
  for (const double t : output_times) {
    if (t > span.start && t < span.end) breakpoints.push_back(t);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  breakpoints.push_back(span.end);

  Trajectory traj;
  Recorder recorder(traj, monitors);
  double t = span.start;
  Vector z = z0;
  std::size_t next_bp = 0;
  long attempts = 0;

  const auto maybe_record = [&](bool hit_breakpoint) {
    const bool at_end = t == span.end;
    const bool stride_hit = traj.steps_accepted % cfg.record_stride == 0;
    if (at_end || (explicit_output ? hit_breakpoint : stride_hit)) recorder.record(t, z);
  };

  try {
    recorder.record(t, z);
    if (cfg.method == IntegratorConfig::Method::kRk4) {
      long grid = 0;
      while (t < span.end) {
        if (attempts >= cfg.max_steps) {
          traj.termination = Termination::kStepLimit;
          break;
        }
        const double snap = 1e-9 * cfg.h;
        const double bp = breakpoints[next_bp];
        const double grid_time = span.start + static_cast<double>(grid + 1) * cfg.h;
        double target = bp;
        bool advance_grid = false;
        if (grid_time <= bp + snap) {
          advance_grid = true;
          if (grid_time < bp - snap) target = grid_time;
        }
        z = rk4_step(f, t, z, target - t);
        ++attempts;
        require_finite(z, target);
        t = target;
        if (advance_grid) ++grid;
        ++traj.steps_accepted;
        const bool hit = t == bp;
        if (hit) ++next_bp;
        maybe_record(hit);
      }
    } else {
      double h = std::min(cfg.h, std::max(span.end - span.start, std::numeric_limits<double>::min()));
      Vector k1 = f(t, z);
      while (t < span.end) {
        if (attempts >= cfg.max_steps) {
          traj.termination = Termination::kStepLimit;
          break;
        }
        const double bp = breakpoints[next_bp];
        double h_try = h;
        bool hit = false;
        if (t + h_try >= bp - 1e-12 * std::max(1.0, std::abs(bp))) {
          h_try = bp - t;
          hit = true;
        }
        if (!(h_try > 1e-14 * std::max(1.0, std::abs(t)))) {
          std::ostringstream msg;
          msg << "step size underflow at t = " << t;
          throw IntegrationError(msg.str());
        }
        Dp45Step step = dp45_step(f, t, z, k1, h_try);
        ++attempts;
        require_finite(step.z_new, t + h_try);
        const double scale = std::max(z.lpNorm<Eigen::Infinity>(),
                                      step.z_new.lpNorm<Eigen::Infinity>());
        const double tol = std::max(cfg.rel_tol * scale, cfg.abs_tol);
        const double h_next = adaptive_step_control(step.err, tol, h_try);
        if (step.err <= tol) {
          t = hit ? bp : t + h_try;
          z = std::move(step.z_new);
          k1 = std::move(step.k_last);
          ++traj.steps_accepted;
          // A step shortened to land on a breakpoint says little about the
          // next step size, so never let it shrink h.
          h = hit ? std::max(h, h_next) : h_next;
          if (hit) ++next_bp;
          maybe_record(hit);
        } else {
          ++traj.steps_rejected;
          h = h_next;
        }
      }
    }
  } catch (const EvaluationDomainError& e) {
    traj.termination = Termination::kDomainExit;
    std::ostringstream msg;
    msg << "left the evaluation domain after t = " << t << ": " << e.what();
    traj.message = msg.str();
    if (!traj.times.empty() && traj.times.back() != t) {
      try {
        recorder.record(t, z);
      } catch (const EvaluationDomainError&) {
        // The last accepted state is itself on the domain boundary.
      }
    }
  }
  if (traj.termination == Termination::kStepLimit) {
    traj.message = "step limit of " + std::to_string(cfg.max_steps) + " reached at t = " +
                   std::to_string(t);
    if (traj.times.back() != t) recorder.record(t, z);
  }
  return traj;
}

Trajectory integrate_phase(const NonholonomicSystem& sys, const PhaseState& z0, TimeSpan span,
                           const IntegratorConfig& cfg, const DifferentiationStrategy& strat,
                           std::span<const double> output_times) {
  sys.validate();
  const int n = sys.dim();
  if (z0.q.size() != n || z0.p.size() != n) {
    throw std::invalid_argument("initial phase state has the wrong dimension");
  }
  const MultiplierOptions opts{MultiplierOptions::OffManifold::kIgnore};
  const OdeRhs rhs = [&sys, &strat, &opts, n](double, const Vector& z) {
    const PhaseVelocity v = xh_nh(sys, z.head(n), z.tail(n), strat, opts);
    Vector dz(2 * n);
    dz << v.q_dot, v.p_dot;
    return dz;
  };

  MonitorSet monitors;
  monitors.names.emplace_back("energy");
  for (int s = 1; s <= sys.constraint_count(); ++s) {
    monitors.names.push_back("constraint_residual_" + std::to_string(s));
  }
  monitors.eval = [&sys, n](const Vector& z) {
    const ChartPoint q = z.head(n);
    const Covector p = z.tail(n);
    Vector out(1 + sys.constraint_count());
    out[0] = hamiltonian(sys.mech, q, p);
    if (sys.constraint_count() > 0) {
      out.tail(sys.constraint_count()) = sys.constraints.at(q) * legendre_inv(sys.mech, q, p);
    }
    return out;
  };

  Vector state(2 * n);
  state << z0.q, z0.p;
  return integrate_ode(rhs, state, span, cfg, &monitors, output_times);
}

Trajectory integrate_config(const VectorField& field, const ChartPoint& q0, TimeSpan span,
                            const IntegratorConfig& cfg, std::span<const double> output_times) {
  const OdeRhs rhs = [&field](double, const Vector& q) { return field.eval(q); };
  return integrate_ode(rhs, q0, span, cfg, nullptr, output_times);
}

PhaseState phase_state_at(const Trajectory& traj, std::size_t index, int n) {
  const Vector& z = traj.states.at(index);
  if (z.size() != 2 * n) throw std::invalid_argument("trajectory does not hold phase states");
  return {z.head(n), z.tail(n), traj.times.at(index)};
}

}  // namespace nhhj
