#pragma once

#include <string>

#include "vic/energy_tank.hpp"
#include "vic/stiffness_qp.hpp"

namespace vic {

enum class StiffnessMode { Low, High, Optimized };

std::string to_string(StiffnessMode mode);  // "ls", "hs", "os"
StiffnessMode stiffness_mode_from_string(const std::string& name);

struct VicConfig {
  StiffnessEnvelope envelope;
  QpWeights weights;
  TankParams tank;
  bool use_coriolis = false;  // add mu(x, xdot) to the damping term of the interaction model
  double tank_margin = 1e-9;  // J kept above epsilon by the QP constraint

  void validate() const;
  /// k_min 200, k_max 1000, F_max 60, Q 3200, R 1 on every axis; eps 0.4, x_t(0) 1.
  static VicConfig defaults(int task_dim);
};

struct VicOutput {
  TaskVec k;
  TaskVec d;
  TaskVec F;          // impedance command
  TaskVec F_model;    // interaction model prediction at the chosen k
  TankPower power;
  bool bypass = false;         // T <= eps at entry, k forced to k_min
  bool qp_infeasible = false;
  bool tank_active = false;    // passivity constraint binding
  double kkt = 0.0;
};

/// Per-step stiffness selection, damping by double diagonalization of the
/// previous stiffness, impedance command and tank update.
class VicController {
 public:
  VicController(VicConfig config, StiffnessMode mode);

  /// mu: optional Cartesian Coriolis matrix for the interaction model.
  VicOutput step(const TaskVec& x_d, const TaskVec& F_d, const TaskVec& x, const TaskVec& xdot, double dt,
                 const TaskMat* mu = nullptr);

  const TankState& tank() const { return tank_; }
  const TaskVec& previous_stiffness() const { return k_prev_; }
  StiffnessMode mode() const { return mode_; }
  const VicConfig& config() const { return config_; }

 private:
  VicConfig config_;
  StiffnessMode mode_;
  TankState tank_;
  TaskVec k_prev_;
};

}  // namespace vic
