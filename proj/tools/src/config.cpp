#include "nhhj/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nhhj/errors.hpp"

namespace nhhj::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) fail(where + ": unknown key '" + item.key() + "'");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + ": value must be finite");
  return x;
}

double positive(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (!(x > 0.0)) fail(where + ": must be positive");
  return x;
}

long long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return v.get<long long>();
}

Vector vector_of(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix matrix_of(const json& v, int cols, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of rows");
  Matrix out(static_cast<Eigen::Index>(v.size()), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector row = vector_of(v[i], where + "[" + std::to_string(i) + "]");
    if (row.size() != cols) {
      fail(where + ": row " + std::to_string(i) + " must have " + std::to_string(cols) +
           " entries");
    }
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

ParamMap param_map(const json& v, const std::string& where) {
  if (!v.is_object()) fail(where + ": expected an object of name -> number");
  ParamMap out;
  for (const auto& item : v.items()) out[item.key()] = number(item.value(), where + "." + item.key());
  return out;
}

DomainBox domain_of(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of [lo, hi] pairs");
  DomainBox box;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vector pair = vector_of(v[i], where + "[" + std::to_string(i) + "]");
    if (pair.size() != 2 || !(pair[0] <= pair[1])) {
      fail(where + "[" + std::to_string(i) + "]: expected [lo, hi] with lo <= hi");
    }
    box.intervals.emplace_back(pair[0], pair[1]);
  }
  return box;
}

IntegratorConfig integrator_of(const json& v) {
  if (!v.is_object()) fail("integrator: expected an object");
  check_keys(v, {"method", "h", "rel_tol", "abs_tol", "max_steps", "record_stride"}, "integrator");
  IntegratorConfig cfg;
  if (v.contains("method")) {
    const json& m = v["method"];
    if (m == "rk4") {
      cfg.method = IntegratorConfig::Method::kRk4;
    } else if (m == "adaptive45") {
      cfg.method = IntegratorConfig::Method::kAdaptive45;
    } else {
      fail("integrator.method: expected \"rk4\" or \"adaptive45\"");
    }
  }
  if (v.contains("h")) cfg.h = positive(v["h"], "integrator.h");
  if (v.contains("rel_tol")) cfg.rel_tol = positive(v["rel_tol"], "integrator.rel_tol");
  if (v.contains("abs_tol")) cfg.abs_tol = positive(v["abs_tol"], "integrator.abs_tol");
  if (v.contains("max_steps")) {
    const long long s = integer(v["max_steps"], "integrator.max_steps");
    if (s <= 0) fail("integrator.max_steps: must be positive");
    cfg.max_steps = static_cast<long>(s);
  }
  if (v.contains("record_stride")) {
    const long long s = integer(v["record_stride"], "integrator.record_stride");
    if (s <= 0 || s > 1'000'000'000) fail("integrator.record_stride: must be a positive int");
    cfg.record_stride = static_cast<int>(s);
  }
  return cfg;
}

void validate_custom(const json& s) {
  check_keys(s, {"name", "coordinates", "metric", "potential_gradient", "constraints", "gamma"},
             "system");
  if (!s.contains("coordinates") || !s["coordinates"].is_array() || s["coordinates"].empty()) {
    fail("system.coordinates: expected a nonempty array of names");
  }
  for (const auto& c : s["coordinates"]) {
    if (!c.is_string()) fail("system.coordinates: names must be strings");
  }
  if (!s.contains("metric")) fail("system.metric: required for a custom system");
}

ExampleSpec custom_spec(const json& s, const std::string& name) {
  const auto coords = s["coordinates"].get<std::vector<std::string>>();
  const int n = static_cast<int>(coords.size());

  const Matrix g = matrix_of(s["metric"], n, "system.metric");
  if (g.rows() != n) fail("system.metric: must be " + std::to_string(n) + " x " + std::to_string(n));
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff())) {
    fail("system.metric: must be symmetric");
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) fail("system.metric: must be positive definite");

  Vector dv = Vector::Zero(n);
  if (s.contains("potential_gradient")) {
    dv = vector_of(s["potential_gradient"], "system.potential_gradient");
    if (dv.size() != n) fail("system.potential_gradient: must have " + std::to_string(n) + " entries");
  }
  Matrix A(0, n);
  if (s.contains("constraints")) A = matrix_of(s["constraints"], n, "system.constraints");
  if (A.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    if (A.rows() >= n || sv[sv.size() - 1] <= kDefaultRankTol * sv[0]) {
      fail("system.constraints: rows must be linearly independent and fewer than n");
    }
  }

  ExampleSpec spec;
  spec.name = name;
  NonholonomicSystem& sys = spec.system;
  sys.name = name;
  sys.mech.dim = n;
  sys.mech.coordinates = coords;
  sys.mech.metric = [g](const Vector&) { return g; };
  sys.mech.metric_partials = [n](const Vector&) {
    return std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  };
  sys.mech.potential = [dv](const Vector& q) { return dv.dot(q); };
  sys.mech.potential_gradient = [dv](const Vector&) { return dv; };
  sys.constraints = A.rows() > 0 ? constant_distribution(A) : unconstrained_distribution(n);

  std::optional<Vector> gamma;
  if (s.contains("gamma")) {
    gamma = vector_of(s["gamma"], "system.gamma");
    if (gamma->size() != n) fail("system.gamma: must have " + std::to_string(n) + " entries");
  }
  spec.gamma_family = [gamma, n](const ParamMap& c) {
    if (!gamma) fail("custom system defines no gamma");
    OneFormCandidate cand;
    cand.label = "constant one-form";
    cand.params = c;
    cand.gamma.eval = [g0 = *gamma](const Vector&) { return g0; };
    cand.gamma.jacobian = [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); };
    return cand;
  };
  spec.perturbed_family = [](const ParamMap&) -> OneFormCandidate {
    fail("custom systems have no perturbed gamma variant");
  };
  spec.domain_box.intervals.assign(static_cast<std::size_t>(n), {-1.0, 1.0});
  spec.default_ic = {ChartPoint::Zero(n), Covector::Zero(n), 0.0};
  return spec;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config: expected a JSON object");
  check_keys(doc,
             {"system", "params", "initial", "gamma_params", "gamma_variant", "integrator",
              "t_span", "samples", "seed", "output", "tolerances", "compare_points",
              "bracket_depth", "domain"},
             "config");
  RunConfig cfg;

  if (!doc.contains("system")) fail("config: 'system' is required");
  const json& s = doc["system"];
  if (s.is_string()) {
    cfg.system_name = s.get<std::string>();
  } else if (s.is_object()) {
    validate_custom(s);
    cfg.system_name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>()
                                                                   : "custom";
    cfg.custom_system = s;
  } else {
    fail("system: expected a name or an inline definition");
  }

  if (doc.contains("params")) cfg.params = param_map(doc["params"], "params");
  if (doc.contains("gamma_params")) cfg.gamma_params = param_map(doc["gamma_params"], "gamma_params");
  if (doc.contains("gamma_variant")) {
    const json& v = doc["gamma_variant"];
    if (v == "ansatz") {
      cfg.gamma_variant = GammaVariant::kAnsatz;
    } else if (v == "perturbed") {
      cfg.gamma_variant = GammaVariant::kPerturbed;
    } else {
      fail("gamma_variant: expected \"ansatz\" or \"perturbed\"");
    }
  }

  if (doc.contains("initial")) {
    const json& ic = doc["initial"];
    if (!ic.is_object()) fail("initial: expected an object");
    check_keys(ic, {"q", "p", "v"}, "initial");
    if (!ic.contains("q")) fail("initial.q: required");
    if (ic.contains("p") == ic.contains("v")) fail("initial: give exactly one of p and v");
    InitialCondition init;
    init.q = vector_of(ic["q"], "initial.q");
    if (ic.contains("p")) init.p = vector_of(ic["p"], "initial.p");
    if (ic.contains("v")) init.v = vector_of(ic["v"], "initial.v");
    cfg.initial = std::move(init);
  }

  if (doc.contains("integrator")) cfg.integrator = integrator_of(doc["integrator"]);

  if (doc.contains("t_span")) {
    const Vector span = vector_of(doc["t_span"], "t_span");
    if (span.size() != 2) fail("t_span: expected [t0, t1]");
    if (span[1] < span[0]) fail("t_span: t1 must not precede t0");
    cfg.t_span = {span[0], span[1]};
  }

  if (doc.contains("samples")) {
    const long long n = integer(doc["samples"], "samples");
    if (n <= 0 || n > 10'000'000) fail("samples: must be a positive integer");
    cfg.samples = static_cast<int>(n);
  }
  if (doc.contains("seed")) {
    const json& seed = doc["seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      fail("seed: expected a nonnegative integer");
    }
    cfg.seed = seed.get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail("output: expected a path string");
    cfg.output = doc["output"].get<std::string>();
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) fail("tolerances: expected an object");
    check_keys(t, {"membership", "dgamma", "hj", "regularity_margin", "gap"}, "tolerances");
    if (t.contains("membership")) cfg.tolerances.membership = positive(t["membership"], "tolerances.membership");
    if (t.contains("dgamma")) cfg.tolerances.dgamma = positive(t["dgamma"], "tolerances.dgamma");
    if (t.contains("hj")) cfg.tolerances.hj = positive(t["hj"], "tolerances.hj");
    if (t.contains("regularity_margin")) {
      cfg.tolerances.regularity_margin = number(t["regularity_margin"], "tolerances.regularity_margin");
    }
    if (t.contains("gap")) cfg.gap_tolerance = positive(t["gap"], "tolerances.gap");
  }
  if (doc.contains("compare_points")) {
    const long long n = integer(doc["compare_points"], "compare_points");
    if (n < 2 || n > 10'000'000) fail("compare_points: must be at least 2");
    cfg.compare_points = static_cast<int>(n);
  }
  if (doc.contains("bracket_depth")) {
    const long long d = integer(doc["bracket_depth"], "bracket_depth");
    if (d < 0 || d > 8) fail("bracket_depth: must be in [0, 8]");
    cfg.bracket_depth = static_cast<int>(d);
  }
  if (doc.contains("domain")) cfg.domain = domain_of(doc["domain"], "domain");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

ExampleSpec resolve_system(const RunConfig& cfg) {
  try {
    if (cfg.custom_system) {
      if (!cfg.params.empty()) fail("params: custom systems take no parameters");
      return custom_spec(*cfg.custom_system, cfg.system_name);
    }
    return make_example(cfg.system_name, cfg.params);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

OneFormCandidate resolve_gamma(const RunConfig& cfg, const ExampleSpec& spec) {
  try {
    return cfg.gamma_variant == GammaVariant::kAnsatz ? spec.gamma(cfg.gamma_params)
                                                      : spec.perturbed_gamma(cfg.gamma_params);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(std::string("gamma_params: ") + e.what());
  }
}

DomainBox resolve_domain(const RunConfig& cfg, const ExampleSpec& spec) {
  const DomainBox box = cfg.domain.value_or(spec.domain_box);
  if (box.dim() != spec.system.dim()) {
    fail("domain: expected " + std::to_string(spec.system.dim()) + " intervals");
  }
  return box;
}

}  // namespace nhhj::cli
