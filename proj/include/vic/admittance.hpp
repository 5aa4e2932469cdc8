#pragma once

#include <string>

#include "vic/linalg.hpp"

namespace vic {

enum class AdmittanceLevel { Low, Medium, High };

std::string to_string(AdmittanceLevel level);
AdmittanceLevel admittance_level_from_string(const std::string& name);

using AxisMask = Eigen::Array<bool, Eigen::Dynamic, 1, 0, kMaxTaskDim, 1>;

struct AdmittanceParams {
  TaskVec M;  // diag, kg
  TaskVec D;  // diag, N s/m
  AdmittanceLevel level = AdmittanceLevel::High;

  void validate() const;
  /// low (6, 40), medium (4, 30), high (2, 20) on every axis.
  static AdmittanceParams preset(AdmittanceLevel level, int task_dim);
};

struct AdmittanceState {
  TaskVec x_d;
  TaskVec xdot_d;
};

/// Semi-implicit Euler step of M xdd_d + D xd_d = lambda_h. Axes with
/// active(j) == false keep x_d bit-for-bit and have zero velocity.
AdmittanceState step_admittance(const AdmittanceState& state, const TaskVec& lambda_h, const AdmittanceParams& params,
                                double dt, const AxisMask& active);
AdmittanceState step_admittance(const AdmittanceState& state, const TaskVec& lambda_h, const AdmittanceParams& params,
                                double dt);

}  // namespace vic
