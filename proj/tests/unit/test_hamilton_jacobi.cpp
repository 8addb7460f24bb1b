#include <gtest/gtest.h>

#include <cmath>

#include "nhhj/errors.hpp"
#include "nhhj/hamilton_jacobi.hpp"
#include "nhhj/sampling.hpp"
#include "nhhj/systems.hpp"
#include "oracles.hpp"

namespace nhhj {
namespace {

IntegratorConfig rk4(double h) {
  IntegratorConfig c;
  c.h = h;
  return c;
}

TEST(Verify, ShippedAnsatzesPass) {
  for (const auto& name : example_names()) {
    const ExampleSpec ex = make_example(name);
    const auto pts = sample_points(ex.domain_box, 30, 17);
    const VerificationReport r = verify_candidate(ex.system, ex.gamma(), pts);
    EXPECT_TRUE(r.hj_conditions_pass()) << name;
    EXPECT_TRUE(r.bracket.pass) << name;
    EXPECT_TRUE(r.regularity.pass) << name;
    EXPECT_EQ(r.sample_points.size(), 30u);
    EXPECT_EQ(r.hj_energy_values.size(), 30u);
  }
}

TEST(Verify, PerturbedAnsatzesFailOnlyTheHjEquation) {
  for (const auto& name : example_names()) {
    const ExampleSpec ex = make_example(name);
    const auto pts = sample_points(ex.domain_box, 30, 17);
    const VerificationReport r = verify_candidate(ex.system, ex.perturbed_gamma(), pts);
    EXPECT_TRUE(r.membership.pass) << name;
    EXPECT_FALSE(r.hj.pass) << name;
    EXPECT_GT(r.energy_spread, 1e-3) << name;
  }
}

TEST(Verify, MembershipViolationIsCaught) {
  const ExampleSpec disk = vertical_rolling_disk();
  OneFormCandidate bad = disk.gamma();
  bad.gamma.eval = [inner = bad.gamma.eval](const Vector& q) {
    Vector p = inner(q);
    p[0] += 0.1;
    return p;
  };
  bad.gamma.jacobian.reset();
  const auto pts = sample_points(disk.domain_box, 10, 1);
  EXPECT_FALSE(verify_membership(disk.system, bad, pts, 1e-10).pass);
}

// gamma = y dx - x dy + p_phi dphi + ... on the disk's D: not closed on D x D.
TEST(Verify, NonClosedFormFailsDgamma) {
  const ExampleSpec disk = vertical_rolling_disk();
  OneFormCandidate twisted = disk.gamma();
  twisted.gamma.eval = [](const Vector& q) {
    const double k = 1.0 + q[2];  // gamma_psi depends on phi
    return Vector((Vector(4) << k * std::cos(q[2]), k * std::sin(q[2]), 1.0, k).finished());
  };
  twisted.gamma.jacobian.reset();
  const auto pts = sample_points(disk.domain_box, 10, 2);
  EXPECT_TRUE(verify_membership(disk.system, twisted, pts, 1e-10).pass);
  EXPECT_FALSE(verify_dgamma(disk.system, twisted, pts, 1e-8).pass);
}

TEST(Verify, EmptySampleSetIsRejected) {
  const ExampleSpec disk = vertical_rolling_disk();
  EXPECT_THROW(verify_candidate(disk.system, disk.gamma(), std::vector<ChartPoint>{}),
               std::invalid_argument);
}

TEST(HjResidual, PinnedEnergy) {
  const ExampleSpec disk = vertical_rolling_disk();
  const auto pts = sample_points(disk.domain_box, 5, 3);
  // 1/2 (gphi^2/J + (I + m R^2)/I^2 gpsi^2) = 1/2 (1 + 2) = 1.5
  const HjResidual at = hj_residual(disk.system, disk.gamma(), pts, 1.5);
  EXPECT_LT(at.spread, 1e-14);
  const HjResidual off = hj_residual(disk.system, disk.gamma(), pts, 1.0);
  EXPECT_NEAR(off.spread, 0.5, 1e-14);
}

TEST(Verify, DgammaAnalyticAgreesWithDifferences) {
  for (const auto& name : example_names()) {
    const ExampleSpec ex = make_example(name);
    const OneFormCandidate g = ex.gamma();
    ASSERT_TRUE(g.gamma.jacobian.has_value()) << name;
    for (const auto& q : sample_points(ex.domain_box, 20, 4)) {
      const Matrix a = (*g.gamma.jacobian)(q);
      const Matrix f = oracle::jacobian5(g.gamma.eval, q, 1e-4);
      EXPECT_LT((a - f).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, a.cwiseAbs().maxCoeff()))
          << name;
    }
  }
}

// The reduced field g^{-1} gamma(q) against the velocity formulas displayed
// for each separated example.
TEST(ReducedField, MatchesDisplayedVelocities) {
  oracle::Draw draw(12);
  const ExampleSpec disk = vertical_rolling_disk();
  const ExampleSpec knife = knife_edge();
  const ExampleSpec snake = snakeboard();
  const VectorField fd = reduced_field(disk.system, disk.gamma({{"gamma_phi0", 0.7}, {"gamma_psi0", -1.3}}));
  const VectorField fk = reduced_field(knife.system, knife.gamma({{"gamma_phi0", 0.4}, {"E", 2.0}}));
  const VectorField fs = reduced_field(
      snake.system, snake.gamma({{"gamma_psi0", 0.3}, {"gamma_phi0", -0.2}, {"E", 1.5}}));
  for (int i = 0; i < 50; ++i) {
    const Vector qd = draw.vec(4, -3, 3);
    EXPECT_LT((fd.eval(qd) - oracle::disk_reduced({}, 0.7, -1.3, qd)).norm(), 1e-13);
    const Vector qk = draw.vec(3, -0.5, 3);
    EXPECT_LT((fk.eval(qk) - oracle::knife_reduced({}, 0.4, 2.0, qk)).norm(), 1e-12);
    Vector qs = draw.vec(5, -3, 3);
    qs[4] = draw.uniform(0.3, M_PI - 0.3);
    EXPECT_LT((fs.eval(qs) - oracle::snake_reduced({}, 0.3, -0.2, 1.5, qs)).norm(), 1e-12);
  }
}

// The sleigh candidate satisfies the HJ equation and the d(gamma) condition
// in the form obtained by eliminating gamma_y.
TEST(Sleigh, SatisfiesEliminatedEquations) {
  const oracle::SleighParams sp{2.0, 0.5, 0.8};
  const ExampleSpec sleigh = chaplygin_sleigh({{"M", 2.0}, {"J", 0.5}, {"a", 0.8}});
  const double omega = 1.3;
  const OneFormCandidate g = sleigh.gamma({{"omega", omega}});
  const double E = 0.5 * (sp.J + sp.a * sp.a * sp.M) * omega * omega;
  for (double th = -1.4; th <= 1.4; th += 0.05) {
    const Vector q = (Vector(3) << 0.3, -0.1, th).finished();
    const Vector p = g(q);
    EXPECT_NEAR(oracle::sleigh_hj_lhs(sp, th, p[0], p[2]), E, 1e-12);
    const auto gx = [&](double t) { return g((Vector(3) << 0.3, -0.1, t).finished())[0]; };
    const auto gt = [&](double t) { return g((Vector(3) << 0.3, -0.1, t).finished())[2]; };
    EXPECT_NEAR(oracle::sleigh_dgamma_lhs(sp, th, p[0], oracle::diff5(gx, th, 1e-4), p[2],
                                          oracle::diff5(gt, th, 1e-4)),
                0.0, 1e-9);
    // gamma_y = tan(theta) gamma_x + a M sec(theta) gamma_theta / (J + a^2 M)
    const double K = sp.J + sp.a * sp.a * sp.M;
    EXPECT_NEAR(p[1], std::tan(th) * p[0] + sp.a * sp.M / std::cos(th) * p[2] / K, 1e-12);
  }
}

TEST(Equivalence, LiftTracksFullFlow) {
  const ExampleSpec disk = vertical_rolling_disk();
  const auto r = theorem_equivalence_check(disk.system, disk.gamma(), disk.default_ic.q,
                                           {0.0, 5.0}, rk4(1e-3), 51);
  EXPECT_TRUE(r.completed);
  EXPECT_EQ(r.times.size(), 51u);
  EXPECT_EQ(r.times.back(), 5.0);
  EXPECT_LT(r.max_phase_gap, 1e-10);
}

TEST(Equivalence, DomainExitIsFlagged) {
  const ExampleSpec snake = snakeboard();
  const Vector q0 = (Vector(5) << 0, 0, 0, 0, 0.05).finished();
  const auto r = theorem_equivalence_check(snake.system, snake.gamma({{"gamma_phi0", -0.125}}),
                                           q0, {0.0, 2.0}, rk4(1e-3));
  EXPECT_FALSE(r.completed);
  EXPECT_EQ(r.termination, Termination::kDomainExit);
  EXPECT_LT(r.times.back(), 0.2);
}

TEST(Equivalence, NeedsTwoSamples) {
  const ExampleSpec disk = vertical_rolling_disk();
  EXPECT_THROW(theorem_equivalence_check(disk.system, disk.gamma(), disk.default_ic.q,
                                         {0.0, 1.0}, rk4(1e-2), 1),
               std::invalid_argument);
}

}  // namespace
}  // namespace nhhj
