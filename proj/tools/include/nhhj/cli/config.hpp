#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "nhhj/hamilton_jacobi.hpp"
#include "nhhj/integrate.hpp"
#include "nhhj/systems.hpp"

namespace nhhj::cli {

/// Malformed or inconsistent run configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GammaVariant { kAnsatz, kPerturbed };

struct InitialCondition {
  ChartPoint q;
  /// Exactly one of p and v is set.
  std::optional<Covector> p;
  std::optional<TangentVec> v;
};

struct RunConfig {
  /// Example name, or the name given inside an inline custom definition.
  std::string system_name;
  /// The raw inline definition when the system is custom.
  std::optional<nlohmann::json> custom_system;
  ParamMap params;
  std::optional<InitialCondition> initial;
  ParamMap gamma_params;
  GammaVariant gamma_variant = GammaVariant::kAnsatz;
  IntegratorConfig integrator;
  TimeSpan t_span{0.0, 10.0};
  /// Verification sample points.
  int samples = 100;
  std::uint64_t seed = 0;
  std::string output;
  VerificationTolerances tolerances;
  /// compare: pass iff the maximum phase gap is at most this.
  double gap_tolerance = 1e-6;
  /// compare: number of uniformly spaced recorded times.
  int compare_points = 101;
  int bracket_depth = 3;
  /// Overrides the example's sampling box.
  std::optional<DomainBox> domain;
};

/// Parses and validates a JSON run configuration. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// The system, candidate family and fixtures a config refers to. Custom
/// systems get constant-coefficient data and, when given, a constant gamma.
ExampleSpec resolve_system(const RunConfig& cfg);

/// The candidate selected by gamma_variant and gamma_params.
OneFormCandidate resolve_gamma(const RunConfig& cfg, const ExampleSpec& spec);

/// Sampling box: the config override or the example's own.
DomainBox resolve_domain(const RunConfig& cfg, const ExampleSpec& spec);

}  // namespace nhhj::cli
