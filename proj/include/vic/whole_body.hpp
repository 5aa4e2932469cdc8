#pragma once

#include <string>
#include <vector>

#include "vic/linalg.hpp"

namespace vic {

enum class PlantKind { PlanarXZ, Point3D };

std::string to_string(PlantKind kind);
PlantKind plant_kind_from_string(const std::string& name);

struct Link {
  double length = 0.0;   // m
  double mass = 0.0;     // kg
  double inertia = 0.0;  // kg m^2 about the link COM
  double com_fraction = 0.5;
};

/// Reduced whole-body model. The planar plant is a prismatic virtual-inertia
/// base along x carrying a revolute chain in the x-z plane; its joint-space
/// inertia is block diagonal (base | arm) and the base block carries the
/// virtual damping. The point plant is a Cartesian double integrator with a
/// constant diagonal inertia and no base.
struct RobotModel {
  PlantKind kind = PlantKind::PlanarXZ;
  int n_b = 1;
  Vec base_inertia;  // diag M_v
  Vec base_damping;  // diag D_v
  std::vector<Link> links;
  double mount_height = 0.35;  // shoulder height above the nominal table surface
  double gravity = 9.81;
  TaskVec point_inertia;  // point plant only

  int n_a() const;
  int dof() const { return n_b + n_a(); }
  int task_dim() const;
  std::vector<std::string> axes() const;
  int vertical_axis() const { return task_dim() - 1; }
  void validate() const;

  static RobotModel planar_xz();
  static RobotModel point_3d();
};

struct RobotState {
  Vec q;
  Vec qdot;
  TaskVec x;
  TaskVec xdot;
};

/// Builds a state whose task coordinates are consistent with q, qdot.
RobotState make_state(const RobotModel& model, const Vec& q, const Vec& qdot);

struct DynamicsTerms {
  Mat M;
  Vec c;  // C(q, qdot) qdot, including D_v qdot_m in the base rows
  Vec g;
};

Mat mass_matrix(const RobotModel& model, const Vec& q);
/// Partial derivative dM/dq_k.
Mat mass_matrix_partial(const RobotModel& model, const Vec& q, int k);
/// Christoffel-based Coriolis matrix (arm block) plus D_v (base block).
Mat coriolis_matrix(const RobotModel& model, const Vec& q, const Vec& qdot);
Vec gravity_torque(const RobotModel& model, const Vec& q);
DynamicsTerms dynamics_terms(const RobotModel& model, const RobotState& state);

TaskVec forward_kinematics(const RobotModel& model, const Vec& q);
Mat task_jacobian(const RobotModel& model, const Vec& q);
Mat task_jacobian_derivative(const RobotModel& model, const Vec& q, const Vec& qdot);

/// Lambda = (J M^-1 J^T)^-1. Throws NearSingularJacobian when the condition
/// number of J M^-1 J^T exceeds cond_max.
TaskMat cartesian_inertia(const Mat& M, const Mat& J, double cond_max = 1e8);

/// Restoring impedance law F = K (x_d - x) - D xdot with diagonal gains.
TaskVec impedance_wrench(const TaskVec& x, const TaskVec& xdot, const TaskVec& x_d, const TaskVec& K,
                         const TaskVec& D);

/// W = H^T M^-1 H.
Mat weighting_matrix(const Mat& H, const Mat& M);

/// Torque closest to tau0 in the W-norm that realizes the operational force F
/// through the dynamically consistent inverse, i.e. Lambda J M^-1 tau = F.
/// Throws NearSingularWeightedInertia when J M^-1 W^-1 M^-1 J^T is
/// ill-conditioned.
Vec weighted_inverse_dynamics(const Mat& M, const Mat& J, const TaskMat& Lambda, const Mat& W, const TaskVec& F,
                              const Vec& tau0, double cond_max = 1e8);

/// Cartesian Coriolis/centrifugal matrix mu = Lambda (J M^-1 C - Jdot) Jbar.
TaskMat cartesian_coriolis(const RobotModel& model, const RobotState& state);

struct PostureGains {
  Vec K0;
  Vec D0;
  Vec q0;
};

/// tau_0 = -D_0 qdot - K_0 (q - q_0)
Vec secondary_task(const Vec& q, const Vec& qdot, const PostureGains& gains);

/// Joint configuration reaching x_target (damped least squares, with a weak
/// pull toward q_seed in the null space).
Vec inverse_kinematics(const RobotModel& model, const TaskVec& x_target, const Vec& q_seed);

/// Nominal configuration used to seed inverse kinematics.
Vec nominal_configuration(const RobotModel& model);

/// One semi-implicit Euler step of M qdd + c + g = tau + tau_ext.
RobotState integrate(const RobotModel& model, const RobotState& state, const Vec& tau, const Vec& tau_ext, double dt);

enum class MotionMode { Locomotion, Manipulation };

std::string to_string(MotionMode mode);

struct ModeGains {
  Vec H;   // diag
  Vec K0;  // diag
  Vec D0;  // diag
};

struct WholeBodyGains {
  ModeGains locomotion;
  ModeGains manipulation;

  const ModeGains& operator[](MotionMode mode) const {
    return mode == MotionMode::Locomotion ? locomotion : manipulation;
  }
  /// H = diag{2 base, 10 arm}, K_0 = 50 for locomotion; H = diag{10 base, 2 arm}, K_0 = 2 for manipulation.
  static WholeBodyGains defaults(const RobotModel& model);
};

/// Prioritized weighted Cartesian impedance controller with gravity
/// compensation. Base torques are refreshed only when asked (zero-order hold
/// between base updates).
class WholeBodyController {
 public:
  WholeBodyController(RobotModel model, WholeBodyGains gains, double cond_max = 1e8);

  /// Switches the motion mode; q_0 is reset to q_now on every switch.
  void set_mode(MotionMode mode, const Vec& q_now);
  void reset(MotionMode mode, const Vec& q_now);
  MotionMode mode() const { return mode_; }
  const Vec& posture_target() const { return q0_; }

  struct Output {
    Vec tau;
    bool near_singular = false;
  };
  Output compute(const RobotState& state, const TaskVec& F, bool refresh_base);

  const RobotModel& model() const { return model_; }

 private:
  RobotModel model_;
  WholeBodyGains gains_;
  double cond_max_;
  MotionMode mode_ = MotionMode::Manipulation;
  Vec q0_;
  Vec held_base_tau_;
  TaskMat last_lambda_;
  Vec last_tau_;
  bool has_history_ = false;
};

}  // namespace vic
