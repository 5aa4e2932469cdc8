#include "vic/stiffness_controller.hpp"

#include "vic/errors.hpp"
#include "vic/whole_body.hpp"

namespace vic {

std::string to_string(StiffnessMode mode) {
  switch (mode) {
    case StiffnessMode::Low: return "ls";
    case StiffnessMode::High: return "hs";
    case StiffnessMode::Optimized: return "os";
  }
  return "os";
}

StiffnessMode stiffness_mode_from_string(const std::string& name) {
  if (name == "ls") return StiffnessMode::Low;
  if (name == "hs") return StiffnessMode::High;
  if (name == "os") return StiffnessMode::Optimized;
  throw ConfigError("unknown stiffness mode '" + name + "' (expected ls, hs or os)");
}

void VicConfig::validate() const {
  envelope.validate();
  weights.validate(envelope.dim());
  tank.validate();
  if (tank_margin < 0.0) throw ConfigError("tank margin must be non-negative");
}

VicConfig VicConfig::defaults(int m) {
  VicConfig c;
  c.envelope = {TaskVec::Constant(m, 200.0), TaskVec::Constant(m, 1000.0), TaskVec::Constant(m, 60.0)};
  c.weights = {TaskVec::Constant(m, 3200.0), TaskVec::Constant(m, 1.0)};
  return c;
}

VicController::VicController(VicConfig config, StiffnessMode mode) : config_(std::move(config)), mode_(mode) {
  config_.validate();
  tank_ = TankState::from_params(config_.tank);
  k_prev_ = mode_ == StiffnessMode::High ? config_.envelope.k_max : config_.envelope.k_min;
}

VicOutput VicController::step(const TaskVec& x_d, const TaskVec& F_d, const TaskVec& x, const TaskVec& xdot,
                              double dt, const TaskMat* mu) {
  const auto& env = config_.envelope;
  const int m = env.dim();
  if (x_d.size() != m || F_d.size() != m || x.size() != m || xdot.size() != m)
    throw DataError("vic step: dimension mismatch");
  VicOutput out;
  out.d = damping_from_stiffness(k_prev_);

  InteractionInputs in;
  in.x_tilde = x_d - x;
  in.xdot_tilde = -xdot;
  in.d = out.d;
  if (mu && config_.use_coriolis) in.mu = *mu;
  const AffineWrench wrench = interaction_coefficients(in, InteractionModel::Simplified);

  switch (mode_) {
    case StiffnessMode::Low: out.k = env.k_min; break;
    case StiffnessMode::High: out.k = env.k_max; break;
    case StiffnessMode::Optimized: {
      if (!tank_.above_threshold()) {
        out.k = env.k_min;
        out.bypass = true;
        break;
      }
      StiffnessQp qp{wrench, F_d, config_.weights, env,
                     tank_constraint(tank_, in.x_tilde, in.xdot_tilde, out.d, env.k_min, dt, config_.tank_margin)};
      const QpSolution sol = solve_stiffness_qp(qp);
      out.k = sol.k;
      out.qp_infeasible = sol.infeasible;
      out.tank_active = sol.tank_active;
      out.kkt = sol.infeasible ? 0.0 : kkt_residual(qp, sol);
      break;
    }
  }
  out.F_model = wrench(out.k);
  out.F = impedance_wrench(x, xdot, x_d, out.k, out.d);

  const TaskVec k_v = out.k - env.k_min;
  out.power = tank_power(tank_, in.x_tilde, in.xdot_tilde, out.d, k_v);
  tank_.energy += out.power.rate() * dt;
  k_prev_ = out.k;
  return out;
}

}  // namespace vic
