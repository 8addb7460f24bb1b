#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhhj/hamilton_jacobi.hpp"
#include "nhhj/nonholonomic.hpp"
#include "nhhj/sampling.hpp"
#include "nhhj/types.hpp"

namespace nhhj {

/// A closed-form solution sample. Only the components flagged as known are
/// meaningful; the rest are NaN.
struct ClosedFormState {
  double t = 0.0;
  ChartPoint q;
  Covector p;
  std::vector<bool> q_known;
  std::vector<bool> p_known;
};

/// (t, constants) -> solution sample. The constant keys are per example.
using ClosedForm = std::function<ClosedFormState(double, const ParamMap&)>;

/// Parameterized family of HJ candidates: constants -> gamma.
using GammaFamily = std::function<OneFormCandidate(const ParamMap&)>;

/// One of the worked examples: system, HJ ansatz family, closed form and fixtures.
struct ExampleSpec {
  std::string name;
  NonholonomicSystem system;
  ParamMap params;

  GammaFamily gamma_family;
  /// An HJ-violating variant of the ansatz that still lies in M, used as a
  /// negative control.
  GammaFamily perturbed_family;
  ParamMap default_gamma_params;

  std::optional<ClosedForm> closed_form;
  ParamMap default_closed_form_constants;

  /// Sampling box for the condition checks; excludes singular sets.
  DomainBox domain_box;
  PhaseState default_ic;

  /// gamma_family evaluated at the defaults merged with `overrides`.
  [[nodiscard]] OneFormCandidate gamma(const ParamMap& overrides = {}) const;
  [[nodiscard]] OneFormCandidate perturbed_gamma(const ParamMap& overrides = {}) const;
  /// Throws std::logic_error when the example has no closed form.
  [[nodiscard]] ClosedFormState closed(double t, const ParamMap& overrides = {}) const;
};

/// Merges `overrides` into `defaults`; unknown keys throw std::invalid_argument.
ParamMap merge_params(const ParamMap& defaults, const ParamMap& overrides,
                      std::string_view context);

/// Vertical rolling disk on Q = R^2 x S^1 x S^1, coordinates (x, y, phi, psi).
/// Parameters m, I, J, R (defaults 1). Ansatz constants gamma_phi0,
/// gamma_psi0. Closed-form constants gamma_phi0, gamma_psi0, c1, c2, phi0, psi0.
ExampleSpec vertical_rolling_disk(const ParamMap& params = {});

enum class KnifeEdgeBranch { kDownhill, kUphill };

/// Knife edge on a plane inclined at alpha, coordinates (x, y, phi).
/// Parameters m, J, g (default 1) and alpha (default pi/6). Ansatz constants
/// gamma_phi0, E and branch (+1 downhill, -1 uphill). Closed-form constant
/// omega for the initial condition (0, 0, 0, 0, 0, omega).
ExampleSpec knife_edge(const ParamMap& params = {},
                       KnifeEdgeBranch branch = KnifeEdgeBranch::kDownhill);

/// Snakeboard, coordinates (x, y, theta, psi, phi). Parameters m = 1, r = 1,
/// J0 = 1/2, J1 = 1/8 and singularity_guard = 1e-3 (evaluations with
/// |sin phi| below the guard raise EvaluationDomainError). Requires
/// m r^2 - J0 > 0. Ansatz constants gamma_psi0 = 0.5, gamma_phi0 = 0.025,
/// E = 1. phi advances at the constant rate gamma_phi0 / 2 J1, so the default
/// start phi = pi/3 stays clear of sin(phi) = 0 for t in [0, 10]. No closed form.
ExampleSpec snakeboard(const ParamMap& params = {});

/// Chaplygin sleigh, coordinates (x, y, theta) of the blade contact point.
/// Parameters M, J, a (defaults 1). Ansatz constant omega (theta'(0));
/// E = (J + a^2 M) omega^2 / 2. Closed-form constant omega.
ExampleSpec chaplygin_sleigh(const ParamMap& params = {});

/// Names accepted by make_example, in a fixed order.
const std::vector<std::string>& example_names();

/// Builds an example by name; throws std::invalid_argument for unknown names.
ExampleSpec make_example(std::string_view name, const ParamMap& params = {});

}  // namespace nhhj
