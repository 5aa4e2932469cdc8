#pragma once

#include <array>
#include <optional>
#include <string>

#include "vic/energy_tank.hpp"
#include "vic/linalg.hpp"

namespace vic {

enum class InteractionModel {
  Simplified,        // (mu + D) xdt + K xt
  NoInertiaShaping,  // Lambda(x) xddt + (mu + D) xdt + K xt
  InertiaShaping,    // Lambda_d xddt + D xdt + K xt
};

std::string to_string(InteractionModel model);
InteractionModel interaction_model_from_string(const std::string& name);

struct InteractionInputs {
  TaskVec x_tilde;     // x_d - x
  TaskVec xdot_tilde;  // -xdot, since xdot_d = 0
  TaskVec xddot_tilde;  // only read by the inertial variants
  TaskMat mu;           // Cartesian Coriolis matrix; empty means zero
  TaskVec d;            // damping diagonal
  TaskMat lambda;       // actual or desired Cartesian inertia, inertial variants only
};

/// F_ext(k) = offset + slope .* k
struct AffineWrench {
  TaskVec offset;
  TaskVec slope;

  TaskVec operator()(const TaskVec& k) const { return offset + slope.cwiseProduct(k); }
};

AffineWrench interaction_coefficients(const InteractionInputs& in, InteractionModel model = InteractionModel::Simplified);
TaskVec interaction_wrench(const InteractionInputs& in, const TaskVec& k,
                           InteractionModel model = InteractionModel::Simplified);

struct StiffnessEnvelope {
  TaskVec k_min;
  TaskVec k_max;
  TaskVec f_max;

  int dim() const { return static_cast<int>(k_min.size()); }
  void validate() const;
};

struct QpWeights {
  TaskVec Q;
  TaskVec R;

  void validate(int dim) const;
};

/// min 1/2 (|F(k) - F_d|_Q^2 + |k - k_min|_R^2)
/// s.t. k_min <= k <= k_max, -f_max <= F(k) <= f_max, tank: c' k <= b
struct StiffnessQp {
  AffineWrench wrench;
  TaskVec F_d;
  QpWeights weights;
  StiffnessEnvelope envelope;
  std::optional<LinearConstraint> tank;

  int dim() const { return envelope.dim(); }
  double objective(const TaskVec& k) const;
  /// Largest constraint violation at k (0 when feasible).
  double violation(const TaskVec& k) const;
  /// Intersection of the stiffness box with the payload bounds, per axis.
  /// Returns false when some axis interval is empty.
  bool bounds(TaskVec& lo, TaskVec& hi) const;
};

struct QpSolution {
  TaskVec k;
  double objective = 0.0;
  bool infeasible = false;  // k = k_min fallback
  bool tank_active = false;
  TaskVec lower_multiplier;
  TaskVec upper_multiplier;
  double tank_multiplier = 0.0;
};

/// Exact solve by enumerating bound states per axis with the tank constraint
/// inactive or active; the feasible candidate with the lowest objective wins,
/// ties going to the smallest k.
QpSolution solve_stiffness_qp(const StiffnessQp& qp);

/// Max of stationarity, primal and dual infeasibility and complementarity at
/// the returned point, using the folded per-axis bounds.
double kkt_residual(const StiffnessQp& qp, const QpSolution& sol);

}  // namespace vic
