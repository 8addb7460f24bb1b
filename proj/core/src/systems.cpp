#include "nhhj/systems.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nhhj/errors.hpp"

namespace nhhj {
namespace {

using std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_positive(const ParamMap& params, std::initializer_list<const char*> keys,
                      std::string_view context) {
  for (const char* key : keys) {
    const double value = params.at(key);
    if (!(value > 0.0) || !std::isfinite(value)) {
      std::ostringstream msg;
      msg << context << ": parameter '" << key << "' must be positive (got " << value << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

std::vector<Matrix> zero_partials(int n, int rows) {
  return std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(rows, n));
}

MechanicalSystem constant_metric_system(std::vector<std::string> coords, Matrix metric) {
  MechanicalSystem mech;
  mech.dim = static_cast<int>(coords.size());
  mech.coordinates = std::move(coords);
  const int n = mech.dim;
  mech.metric = [metric](const Vector&) { return metric; };
  mech.metric_partials = [n](const Vector&) { return zero_partials(n, n); };
  mech.potential = [](const Vector&) { return 0.0; };
  mech.potential_gradient = [n](const Vector&) { return Vector(Vector::Zero(n)); };
  return mech;
}

ClosedFormState unknown_state(double t, int n) {
  return {t, Vector::Constant(n, kNaN), Vector::Constant(n, kNaN),
          std::vector<bool>(static_cast<std::size_t>(n), false),
          std::vector<bool>(static_cast<std::size_t>(n), false)};
}

}  // namespace

ParamMap merge_params(const ParamMap& defaults, const ParamMap& overrides,
                      std::string_view context) {
  ParamMap merged = defaults;
  for (const auto& [key, value] : overrides) {
    if (!defaults.contains(key)) {
      std::ostringstream msg;
      msg << context << ": unknown parameter '" << key << "' (expected one of:";
      for (const auto& [known, unused] : defaults) msg << ' ' << known;
      msg << ')';
      throw std::invalid_argument(msg.str());
    }
    merged[key] = value;
  }
  return merged;
}

OneFormCandidate ExampleSpec::gamma(const ParamMap& overrides) const {
  return gamma_family(merge_params(default_gamma_params, overrides, name + " ansatz"));
}

OneFormCandidate ExampleSpec::perturbed_gamma(const ParamMap& overrides) const {
  return perturbed_family(merge_params(default_gamma_params, overrides, name + " ansatz"));
}

ClosedFormState ExampleSpec::closed(double t, const ParamMap& overrides) const {
  if (!closed_form) throw std::logic_error(name + " has no closed-form solution");
  return (*closed_form)(t, merge_params(default_closed_form_constants, overrides,
                                        name + " closed form"));
}

// ---------------------------------------------------------------------------
// Vertical rolling disk

ExampleSpec vertical_rolling_disk(const ParamMap& overrides) {
  ExampleSpec spec;
  spec.name = "vertical_rolling_disk";
  spec.params = merge_params({{"m", 1.0}, {"I", 1.0}, {"J", 1.0}, {"R", 1.0}}, overrides, spec.name);
  require_positive(spec.params, {"m", "I", "J", "R"}, spec.name);
  const double m = spec.params.at("m");
  const double I = spec.params.at("I");
  const double J = spec.params.at("J");
  const double R = spec.params.at("R");

  NonholonomicSystem& sys = spec.system;
  sys.name = spec.name;
  sys.mech = constant_metric_system({"x", "y", "phi", "psi"},
                                    Vector((Vector(4) << m, m, J, I).finished()).asDiagonal());
  sys.mech.params = spec.params;

  // omega^1 = dx - R cos(phi) dpsi, omega^2 = dy - R sin(phi) dpsi
  sys.constraints.dim = 4;
  sys.constraints.count = 2;
  sys.constraints.matrix = [R](const Vector& q) {
    Matrix A(2, 4);
    A << 1, 0, 0, -R * std::cos(q[2]),
         0, 1, 0, -R * std::sin(q[2]);
    return A;
  };
  sys.constraints.partials = [R](const Vector& q) {
    std::vector<Matrix> dA = zero_partials(4, 2);
    dA[2](0, 3) = R * std::sin(q[2]);
    dA[2](1, 3) = -R * std::cos(q[2]);
    return dA;
  };

  // gamma = (mR/I) gamma_psi (cos phi dx + sin phi dy) + gamma_phi dphi + gamma_psi dpsi
  // with gamma_phi, gamma_psi constant after separation of variables.
  spec.default_gamma_params = {{"gamma_phi0", 1.0}, {"gamma_psi0", 1.0}};
  spec.gamma_family = [m, I, R](const ParamMap& c) {
    const double g_phi = c.at("gamma_phi0");
    const double g_psi = c.at("gamma_psi0");
    const double k = m * R * g_psi / I;
    OneFormCandidate cand;
    cand.label = "separated ansatz";
    cand.params = c;
    cand.gamma.eval = [k, g_phi, g_psi](const Vector& q) {
      return Vector((Vector(4) << k * std::cos(q[2]), k * std::sin(q[2]), g_phi, g_psi).finished());
    };
    cand.gamma.jacobian = [k](const Vector& q) {
      Matrix jac = Matrix::Zero(4, 4);
      jac(0, 2) = -k * std::sin(q[2]);
      jac(1, 2) = k * std::cos(q[2]);
      return jac;
    };
    return cand;
  };
  // gamma_psi = gamma_psi0 (1 + x): still in M, but H o gamma depends on x.
  spec.perturbed_family = [m, I, R](const ParamMap& c) {
    const double g_phi = c.at("gamma_phi0");
    const double g_psi = c.at("gamma_psi0");
    OneFormCandidate cand;
    cand.label = "x-dependent rolling momentum";
    cand.params = c;
    cand.gamma.eval = [m, I, R, g_phi, g_psi](const Vector& q) {
      const double psi_mom = g_psi * (1.0 + q[0]);
      const double k = m * R * psi_mom / I;
      return Vector((Vector(4) << k * std::cos(q[2]), k * std::sin(q[2]), g_phi, psi_mom).finished());
    };
    return cand;
  };

  spec.default_closed_form_constants = {{"gamma_phi0", 1.0}, {"gamma_psi0", 1.0}, {"c1", 0.0},
                                        {"c2", 0.0},         {"phi0", 0.0},       {"psi0", 0.0}};
  const GammaFamily family = spec.gamma_family;
  spec.closed_form = [I, J, R, family](double t, const ParamMap& c) {
    const double g_phi = c.at("gamma_phi0");
    const double g_psi = c.at("gamma_psi0");
    if (g_phi == 0.0) {
      throw std::invalid_argument("rolling-disk closed form needs gamma_phi0 != 0");
    }
    const double amp = J * R * g_psi / (I * g_phi);
    const double turn_rate = g_phi / J;
    const double phase = turn_rate * t + c.at("phi0");
    ClosedFormState s = unknown_state(t, 4);
    s.q << c.at("c1") + amp * std::sin(phase), c.at("c2") - amp * std::cos(phase), phase,
        c.at("psi0") + g_psi / I * t;
    s.p = family({{"gamma_phi0", g_phi}, {"gamma_psi0", g_psi}})(s.q);
    s.q_known.assign(4, true);
    s.p_known.assign(4, true);
    return s;
  };

  spec.domain_box = {{{-5.0, 5.0}, {-5.0, 5.0}, {-pi, pi}, {-pi, pi}}};
  const ClosedFormState start = spec.closed(0.0);
  spec.default_ic = {start.q, start.p, 0.0};
  return spec;
}

// ---------------------------------------------------------------------------
// Knife edge on an inclined plane

ExampleSpec knife_edge(const ParamMap& overrides, KnifeEdgeBranch branch) {
  ExampleSpec spec;
  spec.name = "knife_edge";
  spec.params = merge_params({{"m", 1.0}, {"J", 1.0}, {"g", 1.0}, {"alpha", pi / 6.0}},
                             overrides, spec.name);
  require_positive(spec.params, {"m", "J", "g"}, spec.name);
  const double m = spec.params.at("m");
  const double J = spec.params.at("J");
  const double grav = spec.params.at("g");
  const double alpha = spec.params.at("alpha");
  const double slope = grav * std::sin(alpha);

  NonholonomicSystem& sys = spec.system;
  sys.name = spec.name;
  sys.mech = constant_metric_system({"x", "y", "phi"},
                                    Vector((Vector(3) << m, m, J).finished()).asDiagonal());
  sys.mech.params = spec.params;
  sys.mech.potential = [m, slope](const Vector& q) { return -m * slope * q[0]; };
  sys.mech.potential_gradient = [m, slope](const Vector&) {
    return Vector((Vector(3) << -m * slope, 0.0, 0.0).finished());
  };

  // omega^1 = sin(phi) dx - cos(phi) dy
  sys.constraints.dim = 3;
  sys.constraints.count = 1;
  sys.constraints.matrix = [](const Vector& q) {
    Matrix A(1, 3);
    A << std::sin(q[2]), -std::cos(q[2]), 0.0;
    return A;
  };
  sys.constraints.partials = [](const Vector& q) {
    std::vector<Matrix> dA = zero_partials(3, 1);
    dA[2] << std::cos(q[2]), std::sin(q[2]), 0.0;
    return dA;
  };

  // gamma = f(x, y) (cos phi dx + sin phi dy) + gamma_phi0 dphi, where
  // f^2 = m (2E - gamma_phi0^2 / J) + 2 m^2 g sin(alpha) x and sign(f) = branch.
  spec.default_gamma_params = {{"gamma_phi0", 1.0},
                               {"E", 1.0},
                               {"branch", branch == KnifeEdgeBranch::kDownhill ? 1.0 : -1.0}};
  const auto radicand = [m, J, slope](const ParamMap& c, double x) {
    const double g_phi = c.at("gamma_phi0");
    return m * (2.0 * c.at("E") - g_phi * g_phi / J) + 2.0 * m * m * slope * x;
  };
  const auto branch_sign = [](const ParamMap& c) {
    const double b = c.at("branch");
    if (b != 1.0 && b != -1.0) throw std::invalid_argument("knife_edge: branch must be +1 or -1");
    return b;
  };
  spec.gamma_family = [m, slope, radicand, branch_sign](const ParamMap& c) {
    const double sign = branch_sign(c);
    const double g_phi = c.at("gamma_phi0");
    OneFormCandidate cand;
    cand.label = sign > 0 ? "separated ansatz (downhill branch)" : "separated ansatz (uphill branch)";
    cand.params = c;
    const auto f_of = [c, radicand, sign](double x) {
      const double rho = radicand(c, x);
      if (rho < 0.0) {
        std::ostringstream msg;
        msg << "knife-edge ansatz: negative radicand " << rho << " at x = " << x;
        throw EvaluationDomainError(msg.str());
      }
      return sign * std::sqrt(rho);
    };
    cand.gamma.eval = [f_of, g_phi](const Vector& q) {
      const double f = f_of(q[0]);
      return Vector((Vector(3) << f * std::cos(q[2]), f * std::sin(q[2]), g_phi).finished());
    };
    cand.gamma.jacobian = [f_of, m, slope](const Vector& q) {
      const double f = f_of(q[0]);
      if (f == 0.0) throw EvaluationDomainError("knife-edge ansatz is not differentiable where f = 0");
      const double df_dx = m * m * slope / f;
      Matrix jac = Matrix::Zero(3, 3);
      jac(0, 0) = df_dx * std::cos(q[2]);
      jac(0, 2) = -f * std::sin(q[2]);
      jac(1, 0) = df_dx * std::sin(q[2]);
      jac(1, 2) = f * std::cos(q[2]);
      return jac;
    };
    return cand;
  };
  // f frozen at its x = 0 value: in M and closed, but H o gamma varies with x.
  spec.perturbed_family = [radicand, branch_sign](const ParamMap& c) {
    const double rho0 = radicand(c, 0.0);
    if (rho0 < 0.0) throw EvaluationDomainError("knife-edge ansatz: negative radicand at x = 0");
    const double f0 = branch_sign(c) * std::sqrt(rho0);
    const double g_phi = c.at("gamma_phi0");
    OneFormCandidate cand;
    cand.label = "constant f";
    cand.params = c;
    cand.gamma.eval = [f0, g_phi](const Vector& q) {
      return Vector((Vector(3) << f0 * std::cos(q[2]), f0 * std::sin(q[2]), g_phi).finished());
    };
    return cand;
  };

  // Initial condition (x, y, phi, xdot, ydot, phidot) = (0, 0, 0, 0, 0, omega).
  spec.default_closed_form_constants = {{"omega", 1.0}};
  spec.closed_form = [m, J, slope](double t, const ParamMap& c) {
    const double w = c.at("omega");
    ClosedFormState s = unknown_state(t, 3);
    if (w == 0.0) {
      s.q << 0.5 * slope * t * t, 0.0, 0.0;
      s.p << m * slope * t, 0.0, 0.0;
    } else {
      const double amp = slope / (2.0 * w * w);
      const double sn = std::sin(w * t);
      s.q << amp * sn * sn, amp * (w * t - 0.5 * std::sin(2.0 * w * t)), w * t;
      s.p << m * slope / (2.0 * w) * std::sin(2.0 * w * t), m * slope / w * sn * sn, J * w;
    }
    s.q_known.assign(3, true);
    s.p_known.assign(3, true);
    return s;
  };

  spec.domain_box = {{{-0.5, 3.0}, {-3.0, 3.0}, {-pi, pi}}};
  const ClosedFormState start = spec.closed(0.0);
  spec.default_ic = {start.q, start.p, 0.0};
  return spec;
}

// ---------------------------------------------------------------------------
// Snakeboard

ExampleSpec snakeboard(const ParamMap& overrides) {
  ExampleSpec spec;
  spec.name = "snakeboard";
  spec.params = merge_params(
      {{"m", 1.0}, {"r", 1.0}, {"J0", 0.5}, {"J1", 0.125}, {"singularity_guard", 1e-3}},
      overrides, spec.name);
  require_positive(spec.params, {"m", "r", "J0", "J1", "singularity_guard"}, spec.name);
  const double m = spec.params.at("m");
  const double r = spec.params.at("r");
  const double J0 = spec.params.at("J0");
  const double J1 = spec.params.at("J1");
  const double guard = spec.params.at("singularity_guard");
  const double K = m * r * r - J0;
  if (!(K > 0.0)) throw std::invalid_argument("snakeboard: requires m r^2 - J0 > 0");

  const auto check_phi = [guard](double phi) {
    if (std::abs(std::sin(phi)) < guard) {
      std::ostringstream msg;
      msg << "snakeboard: phi = " << phi << " is within the cot(phi) singularity guard";
      throw EvaluationDomainError(msg.str());
    }
  };

  // Metric obtained by inverting the Hessian in p of
  //   H = (p_x^2 + p_y^2)/2m + p_psi^2/2J0 + (p_theta - p_psi)^2 / 2(m r^2 - J0) + p_phi^2/4J1;
  // the (theta, psi) block is [[m r^2, J0], [J0, J0]].
  Matrix g = Matrix::Zero(5, 5);
  g(0, 0) = m;
  g(1, 1) = m;
  g(2, 2) = m * r * r;
  g(2, 3) = J0;
  g(3, 2) = J0;
  g(3, 3) = J0;
  g(4, 4) = 2.0 * J1;

  NonholonomicSystem& sys = spec.system;
  sys.name = spec.name;
  sys.mech = constant_metric_system({"x", "y", "theta", "psi", "phi"}, g);
  sys.mech.params = spec.params;

  // omega^1 = dx + r cot(phi) cos(theta) dtheta, omega^2 = dy + r cot(phi) sin(theta) dtheta
  sys.constraints.dim = 5;
  sys.constraints.count = 2;
  sys.constraints.matrix = [r, check_phi](const Vector& q) {
    check_phi(q[4]);
    const double cot = std::cos(q[4]) / std::sin(q[4]);
    Matrix A(2, 5);
    A << 1, 0, r * cot * std::cos(q[2]), 0, 0,
         0, 1, r * cot * std::sin(q[2]), 0, 0;
    return A;
  };
  sys.constraints.partials = [r, check_phi](const Vector& q) {
    check_phi(q[4]);
    const double s = std::sin(q[4]);
    const double cot = std::cos(q[4]) / s;
    const double csc2 = 1.0 / (s * s);
    std::vector<Matrix> dA = zero_partials(5, 2);
    dA[2](0, 2) = -r * cot * std::sin(q[2]);
    dA[2](1, 2) = r * cot * std::cos(q[2]);
    dA[4](0, 2) = -r * csc2 * std::cos(q[2]);
    dA[4](1, 2) = -r * csc2 * std::sin(q[2]);
    return dA;
  };

  // gamma_theta = gamma_psi0 + (m r^2 - J0) C sin(phi) / g(phi),
  // C = sqrt(E - gamma_psi0^2/2J0 - gamma_phi0^2/4J1), g(phi) = sqrt((m r^2 - J0 sin^2 phi)/2),
  // and gamma_x, gamma_y from the momentum constraint
  //   gamma_x = -(m r / (m r^2 - J0)) cot(phi) cos(theta) (gamma_theta - gamma_psi0)
  //           = -m r C cos(theta) cos(phi) / g(phi).
  spec.default_gamma_params = {{"gamma_psi0", 0.5}, {"gamma_phi0", 0.025}, {"E", 1.0}};
  const auto c_of = [J0, J1](const ParamMap& c) {
    const double g_psi = c.at("gamma_psi0");
    const double g_phi = c.at("gamma_phi0");
    const double c2 = c.at("E") - g_psi * g_psi / (2.0 * J0) - g_phi * g_phi / (4.0 * J1);
    if (c2 < 0.0) {
      throw std::invalid_argument(
          "snakeboard ansatz: E - gamma_psi0^2/2J0 - gamma_phi0^2/4J1 must be nonnegative");
    }
    return std::sqrt(c2);
  };
  const auto make_gamma = [m, r, J0, K, check_phi](double C, double g_psi, double g_phi,
                                                  double x_scale) {
    return [=](const Vector& q) {
      check_phi(q[4]);
      const double s = std::sin(q[4]);
      const double gphi = std::sqrt((m * r * r - J0 * s * s) / 2.0);
      const double c_eff = C * (1.0 + x_scale * q[0]);
      const double planar = -m * r * c_eff * std::cos(q[4]) / gphi;
      return Vector((Vector(5) << planar * std::cos(q[2]), planar * std::sin(q[2]),
                     g_psi + K * c_eff * s / gphi, g_psi, g_phi)
                        .finished());
    };
  };
  spec.gamma_family = [m, r, J0, K, c_of, make_gamma, check_phi](const ParamMap& c) {
    const double C = c_of(c);
    OneFormCandidate cand;
    cand.label = "dgamma-reduced ansatz";
    cand.params = c;
    cand.params["C"] = C;
    cand.gamma.eval = make_gamma(C, c.at("gamma_psi0"), c.at("gamma_phi0"), 0.0);
    cand.gamma.jacobian = [m, r, J0, K, C, check_phi](const Vector& q) {
      check_phi(q[4]);
      const double s = std::sin(q[4]);
      const double co = std::cos(q[4]);
      const double gphi = std::sqrt((m * r * r - J0 * s * s) / 2.0);
      const double dgphi = -J0 * s * co / (2.0 * gphi);
      const double h1 = co / gphi;
      const double dh1 = (-s * gphi - co * dgphi) / (gphi * gphi);
      const double dh2 = (co * gphi - s * dgphi) / (gphi * gphi);
      const double ct = std::cos(q[2]);
      const double st = std::sin(q[2]);
      Matrix jac = Matrix::Zero(5, 5);
      jac(0, 2) = m * r * C * st * h1;
      jac(0, 4) = -m * r * C * ct * dh1;
      jac(1, 2) = -m * r * C * ct * h1;
      jac(1, 4) = -m * r * C * st * dh1;
      jac(2, 4) = K * C * dh2;
      return jac;
    };
    return cand;
  };
  // C replaced by C (1 + x/10).
  spec.perturbed_family = [c_of, make_gamma](const ParamMap& c) {
    OneFormCandidate cand;
    cand.label = "x-dependent C";
    cand.params = c;
    cand.gamma.eval = make_gamma(c_of(c), c.at("gamma_psi0"), c.at("gamma_phi0"), 0.1);
    return cand;
  };

  spec.domain_box = {{{-5.0, 5.0}, {-5.0, 5.0}, {-pi, pi}, {-pi, pi}, {0.3, pi - 0.3}}};
  const ChartPoint q0 = (Vector(5) << 0.0, 0.0, 0.0, 0.0, pi / 3.0).finished();
  spec.default_ic = {q0, spec.gamma()(q0), 0.0};
  return spec;
}

// ---------------------------------------------------------------------------
// Chaplygin sleigh

ExampleSpec chaplygin_sleigh(const ParamMap& overrides) {
  ExampleSpec spec;
  spec.name = "chaplygin_sleigh";
  spec.params = merge_params({{"M", 1.0}, {"J", 1.0}, {"a", 1.0}}, overrides, spec.name);
  require_positive(spec.params, {"M", "J", "a"}, spec.name);
  const double M = spec.params.at("M");
  const double J = spec.params.at("J");
  const double a = spec.params.at("a");
  const double inertia = J + a * a * M;
  const double b = std::sqrt(a * a * M / inertia);

  NonholonomicSystem& sys = spec.system;
  sys.name = spec.name;
  sys.mech.dim = 3;
  sys.mech.coordinates = {"x", "y", "theta"};
  sys.mech.params = spec.params;
  // Kinetic energy of a body whose center of mass sits a distance a ahead of
  // the contact point (x, y) along the heading theta; J is the moment of
  // inertia about the center of mass. Its inverse reproduces the sleigh
  // Hamiltonian term by term.
  sys.mech.metric = [M, a, inertia](const Vector& q) {
    const double s = std::sin(q[2]);
    const double c = std::cos(q[2]);
    Matrix g(3, 3);
    g << M, 0.0, -M * a * s,
         0.0, M, M * a * c,
         -M * a * s, M * a * c, inertia;
    return g;
  };
  sys.mech.metric_partials = [M, a](const Vector& q) {
    const double s = std::sin(q[2]);
    const double c = std::cos(q[2]);
    std::vector<Matrix> dg = zero_partials(3, 3);
    dg[2] << 0.0, 0.0, -M * a * c,
             0.0, 0.0, -M * a * s,
             -M * a * c, -M * a * s, 0.0;
    return dg;
  };
  sys.mech.potential = [](const Vector&) { return 0.0; };
  sys.mech.potential_gradient = [](const Vector&) { return Vector(Vector::Zero(3)); };

  // omega^1 = sin(theta) dx - cos(theta) dy
  sys.constraints.dim = 3;
  sys.constraints.count = 1;
  sys.constraints.matrix = [](const Vector& q) {
    Matrix A(1, 3);
    A << std::sin(q[2]), -std::cos(q[2]), 0.0;
    return A;
  };
  sys.constraints.partials = [](const Vector& q) {
    std::vector<Matrix> dA = zero_partials(3, 1);
    dA[2] << std::cos(q[2]), std::sin(q[2]), 0.0;
    return dA;
  };

  // gamma_theta(theta) = (J + a^2 M) omega cos(b theta). Solving H o gamma = E
  // with E = (J + a^2 M) omega^2 / 2 for gamma_x on M gives a forward speed
  // v = sqrt((J + a^2 M)/M) omega sin(b theta) of the contact point, and
  //   gamma = M v (cos, sin, 0) + a M thetadot (-sin, cos, 0) + (0, 0, (J + a^2 M) thetadot)
  // with thetadot = omega cos(b theta). This is the relation
  //   gamma_y = tan(theta) gamma_x + a M sec(theta) gamma_theta / (J + a^2 M)
  // multiplied through by cos(theta), so it stays finite at |theta| = pi/2.
  const double speed_scale = std::sqrt(inertia / M);
  spec.default_gamma_params = {{"omega", 1.0}};
  const auto make_gamma = [M, a, inertia, b, speed_scale](double omega, double x_scale) {
    return [=](const Vector& q) {
      const double th = q[2];
      const double rate = omega * std::cos(b * th);
      const double v = speed_scale * omega * std::sin(b * th) * (1.0 + x_scale * q[0]);
      const double s = std::sin(th);
      const double c = std::cos(th);
      return Vector((Vector(3) << M * v * c - M * a * s * rate, M * v * s + M * a * c * rate,
                     inertia * rate)
                        .finished());
    };
  };
  spec.gamma_family = [M, a, inertia, b, speed_scale, make_gamma](const ParamMap& c) {
    const double omega = c.at("omega");
    OneFormCandidate cand;
    cand.label = "gamma_theta = (J + a^2 M) omega cos(b theta)";
    cand.params = c;
    cand.params["E"] = 0.5 * inertia * omega * omega;
    cand.params["b"] = b;
    cand.gamma.eval = make_gamma(omega, 0.0);
    cand.gamma.jacobian = [=](const Vector& q) {
      const double th = q[2];
      const double rate = omega * std::cos(b * th);
      const double d_rate = -omega * b * std::sin(b * th);
      const double v = speed_scale * omega * std::sin(b * th);
      const double d_v = speed_scale * omega * b * std::cos(b * th);
      const double s = std::sin(th);
      const double co = std::cos(th);
      Matrix jac = Matrix::Zero(3, 3);
      jac(0, 2) = M * d_v * co - M * v * s - M * a * co * rate - M * a * s * d_rate;
      jac(1, 2) = M * d_v * s + M * v * co - M * a * s * rate + M * a * co * d_rate;
      jac(2, 2) = inertia * d_rate;
      return jac;
    };
    return cand;
  };
  // Forward speed scaled by (1 + x/10).
  spec.perturbed_family = [make_gamma](const ParamMap& c) {
    OneFormCandidate cand;
    cand.label = "x-dependent forward speed";
    cand.params = c;
    cand.gamma.eval = make_gamma(c.at("omega"), 0.1);
    return cand;
  };

  // Initial condition x = y = theta = 0, xdot = ydot = 0, thetadot = omega.
  spec.default_closed_form_constants = {{"omega", 1.0}};
  spec.closed_form = [inertia, b](double t, const ParamMap& c) {
    const double w = c.at("omega");
    ClosedFormState s = unknown_state(t, 3);
    s.q[2] = 2.0 / b * std::atan(std::tanh(0.5 * b * w * t));
    s.p[2] = inertia * w / std::cosh(b * w * t);
    s.q_known[2] = true;
    s.p_known[2] = true;
    return s;
  };

  spec.domain_box = {{{-5.0, 5.0}, {-5.0, 5.0}, {-1.5, 1.5}}};
  const ChartPoint q0 = ChartPoint::Zero(3);
  spec.default_ic = {q0, spec.gamma()(q0), 0.0};
  return spec;
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names = {"vertical_rolling_disk", "knife_edge",
                                                 "snakeboard", "chaplygin_sleigh"};
  return names;
}

ExampleSpec make_example(std::string_view name, const ParamMap& params) {
  if (name == "vertical_rolling_disk") return vertical_rolling_disk(params);
  if (name == "knife_edge") return knife_edge(params);
  if (name == "snakeboard") return snakeboard(params);
  if (name == "chaplygin_sleigh") return chaplygin_sleigh(params);
  throw std::invalid_argument("unknown system '" + std::string(name) + "'");
}

}  // namespace nhhj
