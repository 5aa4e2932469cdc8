#include <cmath>

#include <gtest/gtest.h>

#include "vic/admittance.hpp"
#include "vic/contact.hpp"
#include "vic/errors.hpp"
#include "vic/teacher.hpp"

using namespace vic;

namespace {

AdmittanceState rest(int m) { return {TaskVec::Zero(m), TaskVec::Zero(m)}; }

AdmittanceState run(AdmittanceState s, const TaskVec& f, const AdmittanceParams& p, double T, double dt = 1e-3) {
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < n; ++i) s = step_admittance(s, f, p, dt);
  return s;
}

}  // namespace

TEST(Admittance, ZeroInputAtRestIsUnchanged) {
  const auto p = AdmittanceParams::preset(AdmittanceLevel::Medium, 3);
  auto s = rest(3);
  s.x_d << 0.1, -0.2, 0.3;
  const auto out = step_admittance(s, TaskVec::Zero(3), p, 1e-3);
  EXPECT_EQ(out.x_d, s.x_d);
  EXPECT_EQ(out.xdot_d, s.xdot_d);
}

TEST(Admittance, SteadyStateVelocity) {
  const auto p = AdmittanceParams::preset(AdmittanceLevel::High, 1);
  EXPECT_EQ(p.M(0), 2.0);
  EXPECT_EQ(p.D(0), 20.0);
  const TaskVec f = TaskVec::Constant(1, 20.0);
  const auto s = run(rest(1), f, p, 5 * p.M(0) / p.D(0));
  EXPECT_NEAR(s.xdot_d(0), 1.0, 0.01);
  EXPECT_NEAR(run(rest(1), f, p, 3.0).xdot_d(0), 1.0, 1e-9);
}

TEST(Admittance, HalvedMassHalvesTimeConstant) {
  auto p = AdmittanceParams::preset(AdmittanceLevel::High, 1);
  const TaskVec f = TaskVec::Constant(1, 20.0);
  const double v_full = run(rest(1), f, p, 0.1, 1e-4).xdot_d(0);
  p.M /= 2.0;
  const double v_half = run(rest(1), f, p, 0.05, 1e-4).xdot_d(0);
  EXPECT_NEAR(v_full, 1.0 - std::exp(-1.0), 2e-3);
  EXPECT_NEAR(v_half, v_full, 2e-3);
  EXPECT_NEAR(run(rest(1), f, p, 3.0).xdot_d(0), 1.0, 1e-9);
}

TEST(Admittance, MaskFreezesAxes) {
  const auto p = AdmittanceParams::preset(AdmittanceLevel::Low, 2);
  AxisMask mask(2);
  mask << true, false;
  auto s = rest(2);
  s.xdot_d << 0.1, 0.1;
  const auto out = step_admittance(s, TaskVec::Constant(2, 5.0), p, 1e-3, mask);
  EXPECT_EQ(out.x_d(1), 0.0);
  EXPECT_EQ(out.xdot_d(1), 0.0);
  EXPECT_GT(out.xdot_d(0), 0.1);
}

TEST(Admittance, UnforcedKineticEnergyNeverGrows) {
  for (auto level : {AdmittanceLevel::Low, AdmittanceLevel::Medium, AdmittanceLevel::High}) {
    const auto p = AdmittanceParams::preset(level, 3);
    auto s = rest(3);
    s.xdot_d << 0.5, -1.0, 0.25;
    double E = 0.5 * s.xdot_d.dot(p.M.cwiseProduct(s.xdot_d));
    for (int i = 0; i < 1000; ++i) {
      s = step_admittance(s, TaskVec::Zero(3), p, 1e-3);
      const double En = 0.5 * s.xdot_d.dot(p.M.cwiseProduct(s.xdot_d));
      EXPECT_LE(En, E);
      E = En;
    }
  }
}

TEST(Admittance, RejectsBadStep) {
  const auto p = AdmittanceParams::preset(AdmittanceLevel::High, 1);
  EXPECT_THROW(step_admittance(rest(1), TaskVec::Zero(1), p, 0.02), DataError);
  EXPECT_THROW(step_admittance(rest(1), TaskVec::Zero(1), p, 0.0), DataError);
}

TEST(Contact, SpringDamperSurface) {
  TableModel table;
  TaskVec x(2), v = TaskVec::Zero(2);
  x << 0.3, 0.01;
  EXPECT_EQ(contact_force(table, x, v).on_robot.cwiseAbs().maxCoeff(), 0.0);
  x(1) = -0.001;
  const auto c = contact_force(table, x, v);
  EXPECT_TRUE(c.in_contact);
  EXPECT_NEAR(c.normal, 20.0, 1e-9);
  EXPECT_NEAR(c.on_robot(1), 20.0, 1e-9);
  EXPECT_NEAR(c.on_robot(0), 0.0, 1e-12);
  v(1) = 5.0;
  const auto sep = contact_force(table, x, v);
  EXPECT_GE(sep.normal, 0.0);
  EXPECT_GE(sep.on_robot(1), 0.0);
}

TEST(Contact, FrictionOpposesSlidingAndSaturates) {
  TableModel table;
  TaskVec x(3), v(3);
  x << 0.3, 0.0, -0.001;
  v << 0.001, 0.0, 0.0;
  const auto slow = contact_force(table, x, v);
  EXPECT_NEAR(slow.on_robot(0), -table.viscous * 0.001, 1e-12);
  v << 2.0, 2.0, 0.0;
  const auto fast = contact_force(table, x, v);
  EXPECT_NEAR(fast.on_robot.head(2).norm(), table.friction * fast.normal, 1e-9);
  EXPECT_LT(fast.on_robot(0), 0.0);
  EXPECT_LT(fast.on_robot(1), 0.0);
}

TEST(Contact, MovingTableOffset) {
  TableModel table;
  TaskVec x(2), v = TaskVec::Zero(2);
  x << 0.3, 0.0;
  EXPECT_NEAR(contact_force(table, x, v, 0.001, 0.0).normal, 20.0, 1e-9);
  EXPECT_NEAR(contact_force(table, x, v, 0.001, 0.01).normal, 22.0, 1e-9);
}

class TeacherDemos : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const RobotModel model = RobotModel::planar_xz();
    const auto gains = WholeBodyGains::defaults(model);
    const auto script = TeacherScript::cleaning(CleaningPattern{});
    for (int i = 0; i < 3; ++i) demos_.push_back(synthetic_teacher(script, model, gains, TeacherConfig{}, 8 + i, i));
  }
  static inline std::vector<DemoDataset> demos_;
};

TEST_F(TeacherDemos, FreeMotionRecordsNoForce) {
  for (const auto& d : demos_) {
    int free_rows = 0;
    for (const auto& r : d.rows)
      if (r.x(1) > 0.02) {
        ++free_rows;
        EXPECT_LE(r.f.norm(), 1.0) << "t=" << r.t;
      }
    EXPECT_GT(free_rows, 100);
  }
}

TEST_F(TeacherDemos, StrokesHoldScriptedForce) {
  for (const auto& d : demos_) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : d.rows)
      if (-r.f(1) >= 5.0) {
        sum += -r.f(1);
        ++n;
      }
    ASSERT_GT(n, 100);
    EXPECT_GE(sum / n, 12.0);
    EXPECT_LE(sum / n, 18.0);
  }
}

TEST_F(TeacherDemos, SeedsGiveDistinctDemos) {
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const std::size_t n = std::min(demos_[a].rows.size(), demos_[b].rows.size());
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += (demos_[a].rows[i].x - demos_[b].rows[i].x).squaredNorm();
      EXPECT_GT(std::sqrt(ss / n), 0.0);
    }
  EXPECT_EQ(demos_[1].rows.front().demo_id, 1);
}

TEST_F(TeacherDemos, SameSeedSameDemo) {
  const RobotModel model = RobotModel::planar_xz();
  const auto again = synthetic_teacher(TeacherScript::cleaning(CleaningPattern{}), model,
                                       WholeBodyGains::defaults(model), TeacherConfig{}, 8, 0);
  ASSERT_EQ(again.rows.size(), demos_[0].rows.size());
  for (std::size_t i = 0; i < again.rows.size(); ++i) ASSERT_EQ(again.rows[i].f, demos_[0].rows[i].f);
}

TEST(Teacher, UnreachableWaypointTimesOut) {
  const RobotModel model = RobotModel::planar_xz();
  TeacherScript script;
  script.start = {0.3, 0.0, 0.05};
  TeacherPhase far;
  far.name = "far";
  far.target = {3.0, 0.0, 0.05};
  far.speed = 0.05;
  far.max_duration = 1.0;
  script.phases.push_back(far);
  try {
    synthetic_teacher(script, model, WholeBodyGains::defaults(model), TeacherConfig{}, 1, 0);
    FAIL() << "expected PhaseTimeout";
  } catch (const PhaseTimeout& e) {
    EXPECT_EQ(e.phase(), 0);
  }
}
