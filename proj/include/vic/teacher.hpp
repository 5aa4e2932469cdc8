#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vic/admittance.hpp"
#include "vic/contact.hpp"
#include "vic/gmm.hpp"
#include "vic/whole_body.hpp"

namespace vic {

using Point3 = std::array<double, 3>;  // x, y, z

/// Picks the entries of a 3-axis vector named by `axes` ("x", "y", "z").
TaskVec project_axes(const Point3& v, const std::vector<std::string>& axes);

struct TeacherPhase {
  std::string name;
  MotionMode mode = MotionMode::Manipulation;
  AdmittanceLevel level = AdmittanceLevel::High;
  std::array<bool, 3> active{true, true, true};  // axes the teacher moves; others stay frozen
  Point3 target{0.0, 0.0, 0.0};
  double force = 0.0;  // normal force to press on the table, N; > 0 puts the vertical axis under force control
  double speed = 0.05;  // m/s
  double max_duration = 30.0;
  double settle = 0.0;  // time the force must stay within tolerance before the phase ends, s
};

struct CleaningPattern {
  int strokes = 6;
  Point3 start{0.30, 0.0, 0.0};  // first contact point on the table
  double stroke_length = 0.30;   // along +x
  double tool_width = 0.06;      // y shift between strokes
  double hover = 0.05;           // free-motion height above the table
  double clearance = 0.005;      // approach stop above the table
  double force = 15.0;
  double stroke_speed = 0.04;
  double return_speed = 0.05;
  double approach_speed = 0.03;
};

struct TeacherScript {
  Point3 start{0.30, 0.0, 0.05};
  std::vector<TeacherPhase> phases;

  void validate() const;
  /// Six strokes alternating with free returns: approach, press, stroke, lift, return.
  static TeacherScript cleaning(const CleaningPattern& pattern, double table_height = 0.0);
};

struct TeacherConfig {
  double dt = 1e-3;
  double base_dt = 0.02;  // zero-order hold of base torques
  double record_dt = 0.05;
  double stiffness = 500.0;          // impedance held during teaching, every axis
  double position_gain = 2.0;        // 1/s
  double force_gain = 0.01;          // m/s per N
  double force_speed = 0.03;         // m/s cap on force-driven motion
  double noise_force = 0.3;          // std of the human wrench noise, N
  double noise_bandwidth = 1.0;      // Hz
  double measurement_sigma = 0.2;    // std of the recorded force noise, N
  double position_tol = 0.005;
  double force_tol = 1.5;
  TableModel table;

  void validate() const;
};

/// Runs one closed-loop demonstration: the scripted teacher drives the
/// admittance reference, the impedance controller tracks it, and every
/// record_dt the row (t, x_d, xdot_d, F_ext + noise) is stored.
/// Throws PhaseTimeout when a phase exceeds its budget.
DemoDataset synthetic_teacher(const TeacherScript& script, const RobotModel& model, const WholeBodyGains& gains,
                              const TeacherConfig& config, std::uint64_t seed, int demo_id = 0);

/// Writes a demo stream; an empty stream is rejected.
void record_demo(const std::filesystem::path& path, const DemoDataset& data);

}  // namespace vic
