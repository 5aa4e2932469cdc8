#pragma once

#include "vic/linalg.hpp"

namespace vic {

/// d = 2 * 0.707 * sqrt(k), elementwise.
double damping_from_stiffness(double k);
TaskVec damping_from_stiffness(const TaskVec& k);

struct TankParams {
  double epsilon = 0.4;  // J
  double x0 = 1.0;       // initial tank state, sqrt(J)
  double T_max = 5.0;    // J; dissipation is no longer stored at or above this level

  void validate() const;
};

/// The tank keeps its energy T = x_t^2 / 2 as the state so the discrete energy
/// balance is exact.
struct TankState {
  double energy = 0.5;
  double epsilon = 0.4;
  double T_max = 5.0;

  double x_t() const;
  int sigma() const { return energy >= T_max ? 0 : 1; }
  bool above_threshold() const { return energy > epsilon; }

  static TankState from_params(const TankParams& params);
};

struct TankPower {
  double dissipation = 0.0;  // sigma * xdt' D xdt, W
  double stiffness = 0.0;    // xt' K_v xdt when T > eps, else 0
  double rate() const { return dissipation + stiffness; }
};

/// Power entering the tank for error x_tilde = x_d - x, its rate xdot_tilde,
/// damping diagonal d and variable stiffness k_v = k - k_min.
TankPower tank_power(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde, const TaskVec& d,
                     const TaskVec& k_v);

/// Explicit Euler: T(t) = T(t-1) + Tdot dt.
TankState tank_step(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde, const TaskVec& d,
                    const TaskVec& k_v, double dt);

/// c' k <= b
struct LinearConstraint {
  TaskVec c;
  double b = 0.0;
};

/// Linear form of T(t-1) + Tdot(k) dt >= eps + margin. Requires T > eps.
LinearConstraint tank_constraint(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde,
                                 const TaskVec& d, const TaskVec& k_min, double dt, double margin = 0.0);

}  // namespace vic
