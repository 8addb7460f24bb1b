#include <gtest/gtest.h>

#include <cmath>

#include "nhhj/errors.hpp"
#include "nhhj/hamilton_jacobi.hpp"
#include "nhhj/mechanics.hpp"
#include "nhhj/nonholonomic.hpp"
#include "nhhj/systems.hpp"
#include "oracles.hpp"

namespace nhhj {
namespace {

// Library H (from metric and potential) against the written-out Hamiltonians
// at random states.
TEST(Hamiltonians, MatchReferenceFormulas) {
  oracle::Draw draw(100);
  const oracle::DiskParams dp{1.3, 0.7, 2.1, 0.4};
  const oracle::KnifeParams kp{0.8, 1.7, 9.81, 0.3};
  const oracle::SnakeParams sp{1.5, 0.9, 0.6, 0.2};
  const oracle::SleighParams lp{1.2, 0.4, 0.9};
  const ExampleSpec disk = vertical_rolling_disk({{"m", 1.3}, {"I", 0.7}, {"J", 2.1}, {"R", 0.4}});
  const ExampleSpec knife = knife_edge({{"m", 0.8}, {"J", 1.7}, {"g", 9.81}, {"alpha", 0.3}});
  const ExampleSpec snake = snakeboard({{"m", 1.5}, {"r", 0.9}, {"J0", 0.6}, {"J1", 0.2}});
  const ExampleSpec sleigh = chaplygin_sleigh({{"M", 1.2}, {"J", 0.4}, {"a", 0.9}});
  for (int i = 0; i < 100; ++i) {
    const Vector q4 = draw.vec(4, -3, 3), p4 = draw.vec(4, -3, 3);
    const Vector q3 = draw.vec(3, -3, 3), p3 = draw.vec(3, -3, 3);
    const Vector q5 = draw.vec(5, -3, 3), p5 = draw.vec(5, -3, 3);
    EXPECT_LT(oracle::rel_err(hamiltonian(disk.system.mech, q4, p4), oracle::disk_H(dp, q4, p4)), 1e-12);
    EXPECT_LT(oracle::rel_err(hamiltonian(knife.system.mech, q3, p3), oracle::knife_H(kp, q3, p3)), 1e-12);
    EXPECT_LT(oracle::rel_err(hamiltonian(snake.system.mech, q5, p5), oracle::snake_H(sp, q5, p5)), 1e-12);
    EXPECT_LT(oracle::rel_err(hamiltonian(sleigh.system.mech, q3, p3), oracle::sleigh_H(lp, q3, p3)), 1e-12);
  }
}

TEST(Constraints, MatchReferenceRows) {
  oracle::Draw draw(101);
  const ExampleSpec disk = vertical_rolling_disk({{"R", 0.4}});
  const ExampleSpec knife = knife_edge();
  const ExampleSpec snake = snakeboard({{"r", 0.9}});
  const ExampleSpec sleigh = chaplygin_sleigh();
  for (int i = 0; i < 50; ++i) {
    const Vector q4 = draw.vec(4, -3, 3), q3 = draw.vec(3, -3, 3);
    Vector q5 = draw.vec(5, -3, 3);
    q5[4] = draw.uniform(0.2, 3.0);
    EXPECT_LT((disk.system.constraints.at(q4) - oracle::disk_A({1, 1, 1, 0.4}, q4)).norm(), 1e-15);
    EXPECT_LT((knife.system.constraints.at(q3) - oracle::knife_A(q3)).norm(), 1e-15);
    oracle::SnakeParams sp;
    sp.r = 0.9;
    EXPECT_LT((snake.system.constraints.at(q5) - oracle::snake_A(sp, q5)).norm(), 1e-13);
    EXPECT_LT((sleigh.system.constraints.at(q3) - oracle::sleigh_A(q3)).norm(), 1e-15);
  }
}

TEST(Constraints, AnalyticPartialsMatchDifferences) {
  for (const auto& name : example_names()) {
    const ExampleSpec ex = make_example(name);
    for (const auto& q : sample_points(ex.domain_box, 20, 5)) {
      const auto a = ex.system.constraints.partials_at(q, DifferentiationStrategy::analytic());
      const auto f =
          ex.system.constraints.partials_at(q, DifferentiationStrategy::finite_difference());
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double scale = std::max(1.0, a[j].cwiseAbs().maxCoeff());
        EXPECT_LT((a[j] - f[j]).cwiseAbs().maxCoeff(), 1e-6 * scale) << name << " coord " << j;
      }
    }
  }
}

TEST(Metric, AnalyticPartialsMatchDifferences) {
  const ExampleSpec sleigh = chaplygin_sleigh({{"M", 1.7}, {"a", 0.6}});
  for (const auto& q : sample_points(sleigh.domain_box, 20, 6)) {
    const auto dg = (*sleigh.system.mech.metric_partials)(q);
    const Matrix fd = oracle::jacobian5(
        [&](const Vector& qq) {
          const Matrix g = sleigh.system.mech.metric(qq);
          return Vector(Eigen::Map<const Vector>(g.data(), g.size()));
        },
        q, 1e-4);
    for (int j = 0; j < 3; ++j) {
      const Vector col = Eigen::Map<const Vector>(dg[j].data(), dg[j].size());
      EXPECT_LT((col - fd.col(j)).norm(), 1e-9);
    }
  }
}

TEST(ClosedForms, InitialConditionsLieOnConstraintManifold) {
  for (const auto& name : example_names()) {
    const ExampleSpec ex = make_example(name);
    const auto m = in_constrained_momentum_space(ex.system, ex.default_ic.q, ex.default_ic.p, 1e-14);
    EXPECT_TRUE(m.inside) << name;
  }
}

TEST(ClosedForms, DiskCurveSolvesReducedEquations) {
  const ExampleSpec disk = vertical_rolling_disk({{"J", 2.0}, {"R", 0.5}});
  const ParamMap c{{"gamma_phi0", 0.8}, {"gamma_psi0", 1.4}, {"c1", 0.3}, {"phi0", 0.2}};
  const VectorField f = reduced_field(disk.system, disk.gamma({{"gamma_phi0", 0.8}, {"gamma_psi0", 1.4}}));
  for (double t = 0.0; t < 5.0; t += 0.37) {
    const Vector qdot = oracle::jacobian5(
        [&](const Vector& s) { return disk.closed(s[0], c).q; }, Vector::Constant(1, t)).col(0);
    EXPECT_LT((qdot - f.eval(disk.closed(t, c).q)).norm(), 1e-10);
  }
  EXPECT_THROW((void)disk.closed(1.0, {{"gamma_phi0", 0.0}}), std::invalid_argument);
}

TEST(ClosedForms, KnifeAndSleighAtTimeZero) {
  const ClosedFormState k = knife_edge().closed(0.0);
  EXPECT_EQ(k.q, Vector::Zero(3));
  EXPECT_EQ(k.p, (Vector(3) << 0, 0, 1).finished());
  const ClosedFormState k0 = knife_edge().closed(2.0, {{"omega", 0.0}});
  EXPECT_NEAR(k0.q[0], 0.5 * 0.5 * 4.0, 1e-15);
  const ClosedFormState s = chaplygin_sleigh().closed(0.0);
  EXPECT_TRUE(s.q_known[2]);
  EXPECT_FALSE(s.q_known[0]);
  EXPECT_EQ(s.q[2], 0.0);
  EXPECT_EQ(s.p[2], 2.0);
  EXPECT_THROW((void)snakeboard().closed(0.0), std::logic_error);
}

// Closed forms differentiated in t against X_H^nh at 50 times. The sleigh
// state is completed from its ansatz, which only fixes theta and p_theta.
TEST(ClosedForms, SatisfyNonholonomicFlow) {
  const ExampleSpec knife = knife_edge();
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 + 0.19 * i;
    const Vector d = oracle::jacobian5(
        [&](const Vector& s) {
          const ClosedFormState c = knife.closed(s[0]);
          Vector x(6);
          x << c.q, c.p;
          return x;
        },
        Vector::Constant(1, t)).col(0);
    const ClosedFormState c = knife.closed(t);
    const PhaseVelocity v = xh_nh(knife.system, c.q, c.p);
    EXPECT_LT((d.head(3) - v.q_dot).norm(), 1e-6) << t;
    EXPECT_LT((d.tail(3) - v.p_dot).norm(), 1e-6) << t;
  }

  const ExampleSpec sleigh = chaplygin_sleigh();
  const OneFormCandidate g = sleigh.gamma();
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 + 0.19 * i;
    const Vector d = oracle::jacobian5(
        [&](const Vector& s) {
          const ClosedFormState c = sleigh.closed(s[0]);
          return Vector((Vector(2) << c.q[2], c.p[2]).finished());
        },
        Vector::Constant(1, t)).col(0);
    const ClosedFormState c = sleigh.closed(t);
    const Vector q = (Vector(3) << 0, 0, c.q[2]).finished();
    const Covector p = g(q);
    EXPECT_NEAR(p[2], c.p[2], 1e-12) << t;
    const PhaseVelocity v = xh_nh(sleigh.system, q, p);
    EXPECT_NEAR(d[0], v.q_dot[2], 1e-6) << t;
    EXPECT_NEAR(d[1], v.p_dot[2], 1e-6) << t;
  }
}

TEST(Sleigh, EnergyMatchesResidualEstimate) {
  const ParamMap params{{"M", 1.5}, {"J", 0.7}, {"a", 0.4}};
  const ExampleSpec sleigh = chaplygin_sleigh(params);
  for (const double omega : {0.3, 1.0, 2.5}) {
    const auto points = sample_points(sleigh.domain_box, 40, 11);
    const HjResidual r = hj_residual(sleigh.system, sleigh.gamma({{"omega", omega}}), points);
    const double expected = 0.5 * (0.7 + 0.16 * 1.5) * omega * omega;
    EXPECT_NEAR(r.energy_estimate, expected, 1e-12 * expected);
    EXPECT_LT(r.spread, 1e-12 * expected);
  }
}

TEST(Params, UnknownOrInvalidKeysAreRejected) {
  EXPECT_THROW(vertical_rolling_disk({{"mass", 1.0}}), std::invalid_argument);
  EXPECT_THROW(vertical_rolling_disk({{"m", -1.0}}), std::invalid_argument);
  EXPECT_THROW(snakeboard({{"J0", 2.0}}), std::invalid_argument);
  EXPECT_THROW((void)knife_edge().gamma({{"branch", 0.5}}), std::invalid_argument);
  EXPECT_THROW((void)knife_edge().gamma({{"omega", 1.0}}), std::invalid_argument);
  EXPECT_THROW((void)snakeboard().gamma({{"E", 0.01}}), std::invalid_argument);
  EXPECT_THROW(make_example("rolling_ball"), std::invalid_argument);
  EXPECT_EQ(example_names().size(), 4u);
}

TEST(Domain, KnifeRadicandAndSnakeboardGuard) {
  const OneFormCandidate g = knife_edge().gamma();
  EXPECT_THROW((void)g((Vector(3) << -2.0, 0, 0).finished()), EvaluationDomainError);
  const OneFormCandidate up = knife_edge({}, KnifeEdgeBranch::kUphill).gamma();
  EXPECT_LT(up(Vector::Zero(3))[0], 0.0);

  const ExampleSpec snake = snakeboard();
  const Vector near_zero = (Vector(5) << 0, 0, 0, 0, 1e-4).finished();
  EXPECT_THROW((void)snake.system.constraints.at(near_zero), EvaluationDomainError);
  EXPECT_THROW((void)snake.gamma()(near_zero), EvaluationDomainError);
}

// The snakeboard gamma_theta display with C expanded, at random points.
TEST(Snakeboard, GammaThetaDisplay) {
  const ExampleSpec snake = snakeboard();
  const OneFormCandidate g = snake.gamma();
  const double C = std::sqrt(1.0 - 0.25 / 1.0 - 0.000625 / 0.5);
  EXPECT_NEAR(g.params.at("C"), C, 1e-15);
  for (const auto& q : sample_points(snake.domain_box, 20, 8)) {
    const double s = std::sin(q[4]);
    const double expected = 0.5 + 0.5 * s / std::sqrt((1.0 - 0.5 * s * s) / 2.0) * C;
    EXPECT_NEAR(g(q)[2], expected, 1e-14);
  }
}

}  // namespace
}  // namespace nhhj
