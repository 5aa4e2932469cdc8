#include "vic/admittance.hpp"

#include "vic/errors.hpp"

namespace vic {

std::string to_string(AdmittanceLevel level) {
  switch (level) {
    case AdmittanceLevel::Low: return "low";
    case AdmittanceLevel::Medium: return "medium";
    case AdmittanceLevel::High: return "high";
  }
  return "high";
}

AdmittanceLevel admittance_level_from_string(const std::string& name) {
  if (name == "low") return AdmittanceLevel::Low;
  if (name == "medium") return AdmittanceLevel::Medium;
  if (name == "high") return AdmittanceLevel::High;
  throw ConfigError("unknown admittance level '" + name + "'");
}

void AdmittanceParams::validate() const {
  if (M.size() != D.size() || M.size() < 1) throw ConfigError("admittance M and D must have the task dimension");
  if (!(M.array() > 0.0).all() || !(D.array() > 0.0).all())
    throw ConfigError("admittance M and D must be strictly positive");
}

AdmittanceParams AdmittanceParams::preset(AdmittanceLevel level, int task_dim) {
  double m = 2.0, d = 20.0;
  if (level == AdmittanceLevel::Low) {
    m = 6.0;
    d = 40.0;
  } else if (level == AdmittanceLevel::Medium) {
    m = 4.0;
    d = 30.0;
  }
  return {TaskVec::Constant(task_dim, m), TaskVec::Constant(task_dim, d), level};
}

AdmittanceState step_admittance(const AdmittanceState& state, const TaskVec& lambda_h, const AdmittanceParams& params,
                                double dt, const AxisMask& active) {
  const auto m = state.x_d.size();
  if (state.xdot_d.size() != m || lambda_h.size() != m || params.M.size() != m || active.size() != m)
    throw DataError("step_admittance: dimension mismatch");
  if (!(dt > 0.0) || dt > 0.01) throw DataError("step_admittance: dt must lie in (0, 0.01]");
  AdmittanceState next = state;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!active(j)) {
      next.xdot_d(j) = 0.0;
      continue;
    }
    const double acc = (lambda_h(j) - params.D(j) * state.xdot_d(j)) / params.M(j);
    next.xdot_d(j) = state.xdot_d(j) + dt * acc;
    next.x_d(j) = state.x_d(j) + dt * next.xdot_d(j);
  }
  return next;
}

AdmittanceState step_admittance(const AdmittanceState& state, const TaskVec& lambda_h, const AdmittanceParams& params,
                                double dt) {
  return step_admittance(state, lambda_h, params, dt, AxisMask::Constant(state.x_d.size(), true));
}

}  // namespace vic
