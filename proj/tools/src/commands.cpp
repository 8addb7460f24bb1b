#include "nhhj/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "nhhj/errors.hpp"

namespace nhhj::cli {
namespace {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(finite_or_null(v[i]));
  return arr;
}

json check_json(const ConditionCheck& c) {
  return {{"residual", finite_or_null(c.residual)},
          {"tolerance", finite_or_null(c.tolerance)},
          {"pass", c.pass}};
}

// Data sink: the configured output file, or `out`.
class Sink {
 public:
  Sink(const RunConfig& cfg, std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    if (!cfg.output.empty()) {
      file_ = std::make_unique<std::ofstream>(cfg.output, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + cfg.output + "'");
    }
  }
  std::ostream& data() { return file_ ? *file_ : out_; }
  std::ostream& summary() { return file_ ? out_ : err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;
};

std::string joined(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt17(v[i]);
  return s;
}

std::string csv_row(double t, std::initializer_list<const Vector*> blocks,
                    std::initializer_list<double> tail = {}) {
  std::string row = fmt17(t);
  for (const Vector* b : blocks) {
    for (Eigen::Index i = 0; i < b->size(); ++i) row += "," + fmt17((*b)[i]);
  }
  for (const double x : tail) row += "," + fmt17(x);
  return row;
}

PhaseState initial_state(const RunConfig& cfg, const ExampleSpec& spec) {
  const int n = spec.system.dim();
  if (!cfg.initial) {
    PhaseState z = spec.default_ic;
    z.t = cfg.t_span.start;
    return z;
  }
  const InitialCondition& ic = *cfg.initial;
  if (ic.q.size() != n) throw ConfigError("initial.q: expected " + std::to_string(n) + " entries");
  Covector p;
  if (ic.p) {
    if (ic.p->size() != n) throw ConfigError("initial.p: expected " + std::to_string(n) + " entries");
    p = *ic.p;
  } else {
    if (ic.v->size() != n) throw ConfigError("initial.v: expected " + std::to_string(n) + " entries");
    p = legendre(spec.system.mech, ic.q, *ic.v);
  }
  return {ic.q, p, cfg.t_span.start};
}

ChartPoint initial_point(const RunConfig& cfg, const ExampleSpec& spec) {
  return initial_state(cfg, spec).q;
}

std::vector<ChartPoint> sample_for(const RunConfig& cfg, const ExampleSpec& spec) {
  return sample_points(resolve_domain(cfg, spec), cfg.samples, cfg.seed);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ExampleSpec spec = resolve_system(cfg);
  const NonholonomicSystem& sys = spec.system;
  const int n = sys.dim();
  const int k = sys.constraint_count();

  PhaseState z0 = initial_state(cfg, spec);
  const Covector projected = project_to_momentum_space(sys, z0.q, z0.p);
  const double shift = (projected - z0.p).lpNorm<Eigen::Infinity>();
  z0.p = projected;

  Sink sink(cfg, out, err);
  Trajectory traj;
  std::string failure;
  try {
    traj = integrate_phase(sys, z0, cfg.t_span, cfg.integrator);
  } catch (const IntegrationError& e) {
    failure = e.what();
  }
  if (!failure.empty()) {
    err << "simulate: integration failed: " << failure << '\n';
    return kExitFailure;
  }

  std::ostream& csv = sink.data();
  csv << 't';
  for (const auto& c : sys.mech.coordinates) csv << ',' << c;
  for (const auto& c : sys.mech.coordinates) csv << ",p_" << c;
  csv << ",energy";
  for (int s = 1; s <= k; ++s) csv << ",c_res_" << s;
  csv << '\n';

  const auto& energy = traj.monitors.at("energy");
  double drift = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PhaseState z = phase_state_at(traj, i, n);
    csv << csv_row(traj.times[i], {&z.q, &z.p}, {energy[i]});
    for (int s = 1; s <= k; ++s) {
      const double r = traj.monitors.at("constraint_residual_" + std::to_string(s))[i];
      residual = std::max(residual, std::abs(r));
      csv << ',' << fmt17(r);
    }
    csv << '\n';
    drift = std::max(drift, std::abs(energy[i] - energy.front()));
  }
  csv.flush();

  std::ostream& sum = sink.summary();
  const PhaseState last = phase_state_at(traj, traj.size() - 1, n);
  sum << "system: " << sys.name << '\n'
      << "initial momentum projection shift: " << fmt17(shift) << '\n'
      << "termination: " << to_string(traj.termination)
      << (traj.message.empty() ? "" : " (" + traj.message + ")") << '\n'
      << "steps: " << traj.steps_accepted << " accepted, " << traj.steps_rejected << " rejected\n"
      << "final t: " << fmt17(last.t) << '\n'
      << "final q: " << joined(last.q) << '\n'
      << "final p: " << joined(last.p) << '\n'
      << "max energy drift: " << fmt17(drift) << '\n'
      << "max constraint residual: " << fmt17(residual) << '\n';
  return traj.completed() ? kExitOk : kExitFailure;
}

int cmd_verify_hj(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ExampleSpec spec = resolve_system(cfg);
  const OneFormCandidate gamma = resolve_gamma(cfg, spec);
  const std::vector<ChartPoint> points = sample_for(cfg, spec);

  VerificationReport report;
  try {
    report = verify_candidate(spec.system, gamma, points, cfg.tolerances, {}, cfg.bracket_depth);
  } catch (const EvaluationDomainError& e) {
    err << "verify-hj: candidate left its domain at a sample point: " << e.what() << '\n';
    return kExitFailure;
  }

  const bool pass = report.hj_conditions_pass();
  const std::string scope = std::to_string(points.size()) + " sample points";
  json points_json = json::array();
  for (const auto& q : report.sample_points) points_json.push_back(vec_json(q));
  json energies = json::array();
  for (const double e : report.hj_energy_values) energies.push_back(finite_or_null(e));

  json doc = {
      {"system", report.system},
      {"candidate", report.candidate},
      {"gamma_params", gamma.params},
      {"seed", cfg.seed},
      {"samples", points.size()},
      {"sample_points", points_json},
      {"m_residual_max", finite_or_null(report.m_residual_max)},
      {"dgamma_residual_max", finite_or_null(report.dgamma_residual_max)},
      {"hj_energy_values", energies},
      {"energy_estimate", finite_or_null(report.energy_estimate)},
      {"energy_spread", finite_or_null(report.energy_spread)},
      {"bracket_rank", report.bracket_rank},
      {"regularity_min_eig", finite_or_null(report.regularity_min_eig)},
      {"membership", check_json(report.membership)},
      {"dgamma", check_json(report.dgamma)},
      {"hj", check_json(report.hj)},
      {"bracket", check_json(report.bracket)},
      {"regularity", check_json(report.regularity)},
      {"pass", pass},
      {"verdict", (pass ? "verified at " : "failed at ") + scope},
  };

  Sink sink(cfg, out, err);
  sink.data() << doc.dump(2) << '\n';
  sink.data().flush();
  sink.summary() << "verify-hj " << report.system << " [" << report.candidate << "]: "
                 << (pass ? "PASS" : "FAIL") << " (" << (pass ? "verified at " : "failed at ")
                 << scope << ")\n"
                 << "  membership max " << fmt17(report.m_residual_max) << '\n'
                 << "  dgamma max     " << fmt17(report.dgamma_residual_max) << '\n'
                 << "  energy spread  " << fmt17(report.energy_spread) << '\n';
  return pass ? kExitOk : kExitFailure;
}

int cmd_check_structure(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ExampleSpec spec = resolve_system(cfg);
  const NonholonomicSystem& sys = spec.system;
  const int n = sys.dim();
  const std::vector<ChartPoint> points = sample_for(cfg, spec);

  json per_point = json::array();
  int min_rank = n;
  double min_eig = std::numeric_limits<double>::infinity();
  std::string domain_error;
  for (const auto& q : points) {
    try {
      const BracketRankResult r = bracket_generating_rank(sys.constraints, q, cfg.bracket_depth);
      const double eig = regularity_min_eigenvalue(sys, q, Covector::Zero(n));
      min_rank = std::min(min_rank, r.rank);
      min_eig = std::min(min_eig, eig);
      per_point.push_back({{"q", vec_json(q)},
                           {"rank", r.rank},
                           {"depth_reached", r.depth_reached},
                           {"profile", r.profile},
                           {"regularity_min_eig", finite_or_null(eig)}});
    } catch (const EvaluationDomainError& e) {
      domain_error = e.what();
      min_rank = 0;
      break;
    }
  }

  const bool rank_ok = domain_error.empty() && min_rank == n;
  const bool regular = domain_error.empty() && min_eig > cfg.tolerances.regularity_margin;
  const bool pass = rank_ok && regular;
  json doc = {{"system", sys.name},
              {"dim", n},
              {"constraint_count", sys.constraint_count()},
              {"seed", cfg.seed},
              {"samples", points.size()},
              {"bracket_depth", cfg.bracket_depth},
              {"min_rank", min_rank},
              {"regularity_min_eig", finite_or_null(min_eig)},
              {"regularity_margin", cfg.tolerances.regularity_margin},
              {"bracket_generating", rank_ok},
              {"regular", regular},
              {"points", per_point},
              {"pass", pass}};
  if (!domain_error.empty()) doc["domain_error"] = domain_error;

  Sink sink(cfg, out, err);
  sink.data() << doc.dump(2) << '\n';
  sink.data().flush();
  sink.summary() << "check-structure " << sys.name << ": " << (pass ? "PASS" : "FAIL") << " at "
                 << points.size() << " sample points (min rank " << min_rank << " of " << n
                 << ", min regularity eigenvalue " << fmt17(min_eig) << ")\n";
  if (!domain_error.empty()) sink.summary() << "  domain error: " << domain_error << '\n';
  return pass ? kExitOk : kExitFailure;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.t_span.end > cfg.t_span.start)) throw ConfigError("t_span: compare needs t1 > t0");
  const ExampleSpec spec = resolve_system(cfg);
  const NonholonomicSystem& sys = spec.system;
  const OneFormCandidate gamma = resolve_gamma(cfg, spec);
  const ChartPoint q0 = initial_point(cfg, spec);

  EquivalenceResult result;
  try {
    result = theorem_equivalence_check(sys, gamma, q0, cfg.t_span, cfg.integrator,
                                       cfg.compare_points);
  } catch (const EvaluationDomainError& e) {
    err << "compare: initial point outside the domain: " << e.what() << '\n';
    return kExitFailure;
  } catch (const IntegrationError& e) {
    err << "compare: integration failed: " << e.what() << '\n';
    return kExitFailure;
  }

  Sink sink(cfg, out, err);
  std::ostream& csv = sink.data();
  csv << 't';
  for (const char* prefix : {"red_", "full_"}) {
    for (const auto& c : sys.mech.coordinates) csv << ',' << prefix << c;
    for (const auto& c : sys.mech.coordinates) csv << ',' << prefix << "p_" << c;
  }
  csv << ",gap\n";
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    csv << csv_row(result.times[i], {&result.lifted.states[i], &result.full.states[i]},
                   {result.gap[i]})
        << '\n';
  }
  csv.flush();

  const bool pass = result.completed && result.max_phase_gap <= cfg.gap_tolerance;
  std::ostream& sum = sink.summary();
  sum << "compare " << sys.name << " [" << gamma.label << "]: " << (pass ? "PASS" : "FAIL") << '\n'
      << "max phase gap: " << fmt17(result.max_phase_gap) << " (tolerance "
      << fmt17(cfg.gap_tolerance) << ")\n"
      << "termination: " << to_string(result.termination) << '\n';
  if (!result.message.empty()) sum << "  " << result.message << '\n';
  return pass ? kExitOk : kExitFailure;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonholonomic Hamiltonian mechanics and Hamilton-Jacobi verification"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string output;
    std::uint64_t seed = 0;
  };
  Options opts;
  const auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON run configuration")->required();
    sub->add_option("--output", opts.output, "output path (overrides the config)");
    sub->add_option("--seed", opts.seed, "sampling seed (overrides the config)");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the nonholonomic flow");
  CLI::App* verify = app.add_subcommand("verify-hj", "check a candidate gamma at sample points");
  CLI::App* structure =
      app.add_subcommand("check-structure", "bracket-generating rank and regularity");
  CLI::App* compare = app.add_subcommand("compare", "reduced-flow lift versus full flow");
  for (CLI::App* sub : {simulate, verify, structure, compare}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nhhj: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    RunConfig cfg = load_config(opts.config);
    if (!chosen->get_option("--output")->empty()) cfg.output = opts.output;
    if (!chosen->get_option("--seed")->empty()) cfg.seed = opts.seed;
    if (chosen == simulate) return cmd_simulate(cfg, out, err);
    if (chosen == verify) return cmd_verify_hj(cfg, out, err);
    if (chosen == structure) return cmd_check_structure(cfg, out, err);
    return cmd_compare(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "nhhj: invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "nhhj: invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "nhhj: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nhhj::cli
