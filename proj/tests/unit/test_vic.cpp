#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../support/qp_oracle.hpp"
#include "vic/errors.hpp"
#include "vic/stiffness_controller.hpp"

using namespace vic;

namespace {

TaskVec vec(std::initializer_list<double> v) {
  TaskVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

StiffnessQp scalar_qp(double x_tilde, double F_d) {
  StiffnessQp qp;
  qp.envelope = {vec({200.0}), vec({1000.0}), vec({60.0})};
  qp.weights = {vec({3200.0}), vec({1.0})};
  qp.F_d = vec({F_d});
  InteractionInputs in;
  in.x_tilde = vec({x_tilde});
  in.xdot_tilde = vec({0.0});
  in.d = damping_from_stiffness(qp.envelope.k_min);
  qp.wrench = interaction_coefficients(in);
  return qp;
}

}  // namespace

TEST(Damping, GridValues) {
  const double grid[] = {0.0, 200.0, 500.0, 1000.0};
  for (double k : grid) EXPECT_EQ(damping_from_stiffness(k), 2.0 * 0.707 * std::sqrt(k));
  const TaskVec d = damping_from_stiffness(vec({200.0, 500.0, 1000.0}));
  EXPECT_EQ(damping_from_stiffness(0.0), 0.0);
  EXPECT_NEAR(d(0), 19.997, 1e-3);
  EXPECT_NEAR(d(1), 31.618, 1e-3);
  EXPECT_NEAR(d(2), 44.715, 1e-3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(d(i), damping_from_stiffness(grid[i + 1]));
  EXPECT_THROW(damping_from_stiffness(-1.0), DataError);
}

TEST(Interaction, SimplifiedModel) {
  InteractionInputs in;
  in.x_tilde = vec({0.0, 0.0});
  in.xdot_tilde = vec({0.0, 0.0});
  in.d = vec({20.0, 30.0});
  const TaskVec k = vec({200.0, 500.0});
  EXPECT_EQ(interaction_wrench(in, k).cwiseAbs().maxCoeff(), 0.0);
  in.x_tilde = vec({0.0, 0.01});
  const TaskVec F = interaction_wrench(in, k);
  EXPECT_NEAR(F(0), 0.0, 1e-15);
  EXPECT_NEAR(F(1), 5.0, 1e-12);
  in.xddot_tilde = vec({0.0, 0.0});
  in.lambda = TaskMat::Identity(2, 2) * 3.0;
  EXPECT_LT((interaction_wrench(in, k, InteractionModel::NoInertiaShaping) - F).cwiseAbs().maxCoeff(), 1e-15);
  in.xdot_tilde = vec({0.1, -0.2});
  in.mu = TaskMat::Identity(2, 2);
  const TaskVec Fm = interaction_wrench(in, k);
  EXPECT_NEAR(Fm(0), (1.0 + 20.0) * 0.1, 1e-12);
  EXPECT_NEAR(Fm(1), (1.0 + 30.0) * -0.2 + 5.0, 1e-12);
}

TEST(StiffnessQp, ScalarStationarity) {
  const auto sol = solve_stiffness_qp(scalar_qp(0.01, 10.0));
  EXPECT_NEAR(sol.k(0), 520.0 / 1.32, 1e-9);
  EXPECT_NEAR(sol.k(0), 393.94, 0.01);
  EXPECT_FALSE(sol.infeasible);
  const auto best = oracle::qp_oracle(scalar_qp(0.01, 10.0));
  EXPECT_NEAR(sol.objective, best.objective, 1e-6 * best.objective);
}

TEST(StiffnessQp, ZeroErrorGivesMinimumStiffness) {
  const auto sol = solve_stiffness_qp(scalar_qp(0.0, 10.0));
  EXPECT_EQ(sol.k(0), 200.0);
}

TEST(StiffnessQp, ClampsAtUpperBound) {
  const auto qp = scalar_qp(0.01, 50.0);
  const auto sol = solve_stiffness_qp(qp);
  EXPECT_EQ(sol.k(0), 1000.0);
  EXPECT_GT(sol.upper_multiplier(0), 0.0);
  EXPECT_LE(kkt_residual(qp, sol), 1e-8);
}

TEST(StiffnessQp, PayloadConflictFallsBack) {
  const auto qp = scalar_qp(0.5, 10.0);  // k_min alone already exceeds f_max
  const auto sol = solve_stiffness_qp(qp);
  EXPECT_TRUE(sol.infeasible);
  EXPECT_EQ(sol.k(0), 200.0);
}

TEST(StiffnessQp, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(99);
  int tank_active = 0;
  for (int i = 0; i < 90; ++i) {
    const int m = 1 + i % 3;
    const auto qp = oracle::random_qp(rng, m, i % 2 == 1);
    const auto sol = solve_stiffness_qp(qp);
    const auto best = oracle::qp_oracle(qp);
    ASSERT_TRUE(best.feasible);
    ASSERT_FALSE(sol.infeasible);
    tank_active += sol.tank_active;
    EXPECT_LE(qp.violation(sol.k), 1e-10);
    EXPECT_LE(sol.objective, best.objective + 1e-6 * std::abs(best.objective)) << "instance " << i;
    EXPECT_LE(kkt_residual(qp, sol), 1e-8) << "instance " << i;
  }
  EXPECT_GT(tank_active, 0);
}

TEST(Tank, StationaryErrorLeavesEnergyUnchanged) {
  TankState t;
  const auto next = tank_step(t, vec({0.01, 0.02}), vec({0.0, 0.0}), vec({20.0, 20.0}), vec({300.0, 0.0}), 1e-3);
  EXPECT_EQ(next.energy, t.energy);
}

TEST(Tank, DissipationCharges) {
  TankState t;
  const double before = t.energy;
  // d xdt^2 = 50 * 0.01 = 0.5 W
  const auto next = tank_step(t, vec({0.0}), vec({0.1}), vec({50.0}), vec({0.0}), 1e-3);
  EXPECT_NEAR(next.energy - before, 5e-4, 1e-15);
  TankState full;
  full.energy = full.T_max;
  EXPECT_EQ(full.sigma(), 0);
  EXPECT_EQ(tank_step(full, vec({0.0}), vec({0.1}), vec({50.0}), vec({0.0}), 1e-3).energy, full.T_max);
}

TEST(Tank, StiffnessPowerOnlyAboveThreshold) {
  TankState t;
  const auto p = tank_power(t, vec({0.02}), vec({-0.5}), vec({0.0}), vec({100.0}));
  EXPECT_NEAR(p.stiffness, -1.0, 1e-15);
  t.energy = t.epsilon;
  EXPECT_EQ(tank_power(t, vec({0.02}), vec({-0.5}), vec({0.0}), vec({100.0})).stiffness, 0.0);
}

TEST(TankConstraint, OrthogonalMotionIsStiffnessIndependent) {
  TankState t;
  const auto c = tank_constraint(t, vec({0.01, 0.0}), vec({0.0, 0.1}), vec({20.0, 20.0}), vec({200.0, 200.0}), 1e-3);
  EXPECT_EQ(c.c.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(c.b, 0.0);
}

TEST(TankConstraint, ReleasingSpringBindsNearThreshold) {
  StiffnessQp qp;
  qp.envelope = {vec({200.0}), vec({1000.0}), vec({100.0})};
  qp.weights = {vec({3200.0}), vec({1.0})};
  qp.F_d = vec({40.0});
  InteractionInputs in;
  in.x_tilde = vec({0.05});
  in.xdot_tilde = vec({-0.5});
  in.d = damping_from_stiffness(qp.envelope.k_min);
  qp.wrench = interaction_coefficients(in);
  const double dt = 1e-3;
  const auto free = solve_stiffness_qp(qp);

  TankState low;
  low.energy = 0.41;
  qp.tank = tank_constraint(low, in.x_tilde, in.xdot_tilde, in.d, qp.envelope.k_min, dt, 1e-9);
  const auto bound = solve_stiffness_qp(qp);
  EXPECT_TRUE(bound.tank_active);
  EXPECT_LT(bound.k(0), free.k(0));
  EXPECT_GE(bound.k(0), 200.0);
  const auto next = tank_step(low, in.x_tilde, in.xdot_tilde, in.d, bound.k - qp.envelope.k_min, dt);
  EXPECT_GE(next.energy, low.epsilon);
  EXPECT_NEAR(next.energy, low.epsilon + 1e-9, 1e-12);

  TankState high;
  high.energy = 3.0;
  qp.tank = tank_constraint(high, in.x_tilde, in.xdot_tilde, in.d, qp.envelope.k_min, dt, 1e-9);
  const auto loose = solve_stiffness_qp(qp);
  EXPECT_FALSE(loose.tank_active);
  EXPECT_EQ(loose.k(0), free.k(0));

  TankState empty;
  empty.energy = empty.epsilon;
  EXPECT_THROW(tank_constraint(empty, in.x_tilde, in.xdot_tilde, in.d, qp.envelope.k_min, dt), Error);
}

TEST(VicController, ConstantModes) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VicController ls(VicConfig::defaults(3), StiffnessMode::Low);
  VicController hs(VicConfig::defaults(3), StiffnessMode::High);
  for (int i = 0; i < 200; ++i) {
    const TaskVec x_d = 0.05 * TaskVec::Random(3), F_d = 20.0 * TaskVec::Random(3);
    const TaskVec x = 0.05 * TaskVec::Random(3), xd = 0.2 * TaskVec::Random(3);
    EXPECT_EQ(ls.step(x_d, F_d, x, xd, 1e-3).k, TaskVec::Constant(3, 200.0));
    EXPECT_EQ(hs.step(x_d, F_d, x, xd, 1e-3).k, TaskVec::Constant(3, 1000.0));
  }
}

TEST(VicController, FreeMotionSettlesAtMinimum) {
  VicController os(VicConfig::defaults(2), StiffnessMode::Optimized);
  const TaskVec x = vec({0.3, 0.1}), zero = TaskVec::Zero(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(os.step(x, zero, x, zero, 1e-3).k, TaskVec::Constant(2, 200.0));
}

TEST(VicController, TankNeverDropsBelowThreshold) {
  auto cfg = VicConfig::defaults(3);
  cfg.tank.x0 = 0.95;  // starts just above epsilon
  VicController os(cfg, StiffnessMode::Optimized);
  double expected = os.tank().energy;
  int binding = 0;
  for (int i = 0; i < 20000; ++i) {
    TaskVec x_d, x, xd, F_d;
    if (i < 5000) {
      // spring releasing toward the target while a large force is demanded: drains the tank
      x_d = TaskVec::Constant(3, 0.05);
      x = TaskVec::Zero(3);
      xd = TaskVec::Constant(3, 0.5);
      F_d = TaskVec::Constant(3, 40.0);
    } else {
      x_d = 0.05 * TaskVec::Random(3);
      x = 0.05 * TaskVec::Random(3);
      xd = 0.5 * TaskVec::Random(3);
      F_d = 30.0 * TaskVec::Random(3);
    }
    const auto out = os.step(x_d, F_d, x, xd, 1e-3);
    expected += out.power.rate() * 1e-3;
    binding += out.tank_active;
    ASSERT_GE(os.tank().energy, cfg.tank.epsilon) << "step " << i;
    ASSERT_FALSE(out.bypass);
    EXPECT_LE(out.kkt, 1e-8);
  }
  EXPECT_NEAR(os.tank().energy, expected, 1e-9);
  EXPECT_GT(binding, 0);
}
