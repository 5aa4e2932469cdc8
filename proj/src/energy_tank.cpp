#include "vic/energy_tank.hpp"

#include <cmath>

#include "vic/errors.hpp"

namespace vic {

double damping_from_stiffness(double k) {
  if (k < 0.0) throw DataError("stiffness must be non-negative");
  return 2.0 * 0.707 * std::sqrt(k);
}

TaskVec damping_from_stiffness(const TaskVec& k) {
  TaskVec d(k.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) d(j) = damping_from_stiffness(k(j));
  return d;
}

void TankParams::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("tank epsilon must be positive");
  if (!(0.5 * x0 * x0 > epsilon)) throw ConfigError("initial tank energy must exceed epsilon");
  if (!(T_max > 0.5 * x0 * x0)) throw ConfigError("tank T_max must exceed the initial energy");
}

double TankState::x_t() const { return std::sqrt(2.0 * std::max(energy, 0.0)); }

TankState TankState::from_params(const TankParams& p) {
  p.validate();
  return {0.5 * p.x0 * p.x0, p.epsilon, p.T_max};
}

TankPower tank_power(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde, const TaskVec& d,
                     const TaskVec& k_v) {
  if (xdot_tilde.size() != x_tilde.size() || d.size() != x_tilde.size() || k_v.size() != x_tilde.size())
    throw DataError("tank_power: dimension mismatch");
  TankPower p;
  p.dissipation = tank.sigma() * (xdot_tilde.array().square() * d.array()).sum();
  if (tank.above_threshold()) p.stiffness = (x_tilde.array() * k_v.array() * xdot_tilde.array()).sum();
  return p;
}

TankState tank_step(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde, const TaskVec& d,
                    const TaskVec& k_v, double dt) {
  if (!(dt > 0.0)) throw DataError("tank_step: dt must be positive");
  TankState next = tank;
  next.energy = tank.energy + tank_power(tank, x_tilde, xdot_tilde, d, k_v).rate() * dt;
  return next;
}

LinearConstraint tank_constraint(const TankState& tank, const TaskVec& x_tilde, const TaskVec& xdot_tilde,
                                 const TaskVec& d, const TaskVec& k_min, double dt, double margin) {
  if (!tank.above_threshold()) throw DataError("tank_constraint requires T > epsilon");
  const TaskVec zero = TaskVec::Zero(x_tilde.size());
  const double dissipated = tank_power(tank, x_tilde, xdot_tilde, d, zero).dissipation;
  LinearConstraint con;
  con.c = -(x_tilde.array() * xdot_tilde.array()).matrix() * dt;
  con.b = tank.energy + dissipated * dt - tank.epsilon - margin + con.c.dot(k_min);
  return con;
}

}  // namespace vic
