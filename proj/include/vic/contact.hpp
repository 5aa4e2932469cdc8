#pragma once

#include "vic/linalg.hpp"

namespace vic {

/// Compliant horizontal table. The last task axis is vertical.
struct TableModel {
  double height = 0.0;       // nominal surface height, m
  double stiffness = 2e4;    // N/m
  double damping = 200.0;    // N s/m
  double friction = 0.4;     // Coulomb coefficient
  double viscous = 10.0;     // N s/m, tangential slope before saturation

  void validate() const;
};

struct ContactForce {
  TaskVec on_robot;  // force the surface applies to the end effector
  double normal = 0.0;
  double penetration = 0.0;
  bool in_contact = false;
};

/// Spring-damper normal force, clamped non-negative, with saturated viscous
/// friction capped at friction * normal. The surface sits at height + offset
/// and moves vertically at offset_rate.
ContactForce contact_force(const TableModel& table, const TaskVec& x, const TaskVec& xdot, double offset = 0.0,
                           double offset_rate = 0.0);

}  // namespace vic
