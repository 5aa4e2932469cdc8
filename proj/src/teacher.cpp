#include "vic/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vic/demo_io.hpp"
#include "vic/energy_tank.hpp"
#include "vic/errors.hpp"

namespace vic {

namespace {

int axis_index(const std::string& name) {
  if (name == "x") return 0;
  if (name == "y") return 1;
  if (name == "z") return 2;
  throw ConfigError("unknown axis '" + name + "'");
}

int steps_for(double period, double dt) { return std::max(1, static_cast<int>(std::lround(period / dt))); }

}  // namespace

TaskVec project_axes(const Point3& v, const std::vector<std::string>& axes) {
  TaskVec out(static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) out(j) = v[axis_index(axes[j])];
  return out;
}

void TeacherScript::validate() const {
  if (phases.empty()) throw ConfigError("teacher script has no phases");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    const std::string where = "teacher phase " + std::to_string(i) + " (" + p.name + ")";
    if (!(p.max_duration > 0.0)) throw ConfigError(where + ": max_duration must be positive");
    if (!(p.speed > 0.0)) throw ConfigError(where + ": speed must be positive");
    if (p.force < 0.0) throw ConfigError(where + ": force must be non-negative");
    if (p.force > 0.0 && p.mode != MotionMode::Manipulation)
      throw ConfigError(where + ": contact force is only allowed in manipulation phases");
    if (p.settle < 0.0 || p.settle >= p.max_duration) throw ConfigError(where + ": settle must be in [0, max_duration)");
  }
}

TeacherScript TeacherScript::cleaning(const CleaningPattern& pat, double table_height) {
  if (pat.strokes < 1) throw ConfigError("cleaning pattern needs at least one stroke");
  const double sx = pat.start[0], sy = pat.start[1];
  const double z_hover = table_height + pat.hover;
  TeacherScript s;
  s.start = {sx, sy, z_hover};
  for (int i = 0; i < pat.strokes; ++i) {
    const double y = sy + i * pat.tool_width;
    const std::string tag = std::to_string(i + 1);
    TeacherPhase approach{"approach-" + tag, MotionMode::Manipulation, AdmittanceLevel::High, {true, true, true},
                          {sx, y, table_height + pat.clearance}, 0.0, pat.approach_speed, 20.0, 0.0};
    TeacherPhase press{"press-" + tag, MotionMode::Manipulation, AdmittanceLevel::High, {false, false, true},
                       {sx, y, table_height}, pat.force, pat.approach_speed, 15.0, 0.5};
    TeacherPhase stroke{"stroke-" + tag, MotionMode::Manipulation, AdmittanceLevel::High, {true, false, true},
                        {sx + pat.stroke_length, y, table_height}, pat.force, pat.stroke_speed,
                        3.0 * pat.stroke_length / pat.stroke_speed + 10.0, 0.0};
    TeacherPhase lift{"lift-" + tag, MotionMode::Manipulation, AdmittanceLevel::High, {false, false, true},
                      {sx + pat.stroke_length, y, z_hover}, 0.0, pat.approach_speed, 20.0, 0.0};
    s.phases.insert(s.phases.end(), {approach, press, stroke, lift});
    if (i + 1 < pat.strokes) {
      const double y_next = sy + (i + 1) * pat.tool_width;
      s.phases.push_back({"return-" + tag, MotionMode::Locomotion, AdmittanceLevel::High, {true, true, true},
                          {sx, y_next, z_hover}, 0.0, pat.return_speed,
                          3.0 * pat.stroke_length / pat.return_speed + 10.0, 0.0});
    }
  }
  return s;
}

void TeacherConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.01) throw ConfigError("teacher dt must lie in (0, 0.01]");
  if (!(record_dt >= dt) || !(base_dt >= dt)) throw ConfigError("teacher record_dt and base_dt must be >= dt");
  if (!(stiffness > 0.0)) throw ConfigError("teacher stiffness must be positive");
  if (!(position_gain > 0.0) || !(force_gain > 0.0) || !(force_speed > 0.0))
    throw ConfigError("teacher gains must be positive");
  if (noise_force < 0.0 || measurement_sigma < 0.0 || !(noise_bandwidth > 0.0))
    throw ConfigError("teacher noise parameters must be non-negative");
  if (!(position_tol > 0.0) || !(force_tol > 0.0)) throw ConfigError("teacher tolerances must be positive");
  table.validate();
}

DemoDataset synthetic_teacher(const TeacherScript& script, const RobotModel& model, const WholeBodyGains& gains,
                              const TeacherConfig& cfg, std::uint64_t seed, int demo_id) {
  script.validate();
  cfg.validate();
  model.validate();
  const auto axes = model.axes();
  const int m = model.task_dim();
  const int v = model.vertical_axis();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const TaskVec x_start = project_axes(script.start, axes);
  const Vec q_init = inverse_kinematics(model, x_start, nominal_configuration(model));
  RobotState state = make_state(model, q_init, Vec::Zero(model.dof()));
  WholeBodyController controller(model, gains);
  controller.reset(script.phases.front().mode, state.q);

  const TaskVec K = TaskVec::Constant(m, cfg.stiffness);
  const TaskVec D = damping_from_stiffness(K);
  AdmittanceState adm{state.x, TaskVec::Zero(m)};

  const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * cfg.noise_bandwidth * cfg.dt);
  const double drive = cfg.noise_force * std::sqrt((2.0 - alpha) / alpha);
  TaskVec noise = TaskVec::Zero(m);

  const int record_every = steps_for(cfg.record_dt, cfg.dt);
  const int base_every = steps_for(cfg.base_dt, cfg.dt);

  DemoDataset out;
  out.axes = axes;
  long step = 0;
  for (std::size_t pi = 0; pi < script.phases.size(); ++pi) {
    const auto& phase = script.phases[pi];
    controller.set_mode(phase.mode, state.q);
    const auto params = AdmittanceParams::preset(phase.level, m);
    const TaskVec target = project_axes(phase.target, axes);
    AxisMask active(m);
    for (int j = 0; j < m; ++j) active(j) = phase.active[axis_index(axes[j])];
    const bool force_axis = phase.force > 0.0 && active(v);
    const double f_des = -phase.force;  // force exerted on the table along the vertical axis

    const long phase_steps = static_cast<long>(std::ceil(phase.max_duration / cfg.dt));
    double settled = 0.0;
    bool done = false;
    for (long s = 0; s < phase_steps && !done; ++s, ++step) {
      const ContactForce contact = contact_force(cfg.table, state.x, state.xdot);
      const TaskVec f_ext = -contact.on_robot;

      if (step % record_every == 0) {
        DemoRow row;
        row.demo_id = demo_id;
        row.t = static_cast<double>(step) * cfg.dt;
        row.x = adm.x_d;
        row.xd = adm.xdot_d;
        row.f = f_ext;
        for (int j = 0; j < m; ++j) row.f(j) += cfg.measurement_sigma * gauss(rng);
        out.rows.push_back(std::move(row));
      }

      TaskVec lambda = TaskVec::Zero(m);
      for (int j = 0; j < m; ++j) {
        if (!active(j)) {
          noise(j) = 0.0;
          continue;
        }
        noise(j) += alpha * (drive * gauss(rng) - noise(j));
        double vel;
        if (j == v && force_axis)
          vel = std::clamp(cfg.force_gain * (f_des - f_ext(j)), -cfg.force_speed, cfg.force_speed);
        else
          vel = std::clamp(cfg.position_gain * (target(j) - adm.x_d(j)), -phase.speed, phase.speed);
        lambda(j) = params.D(j) * vel + noise(j);
      }
      adm = step_admittance(adm, lambda, params, cfg.dt, active);

      const TaskVec F = impedance_wrench(state.x, state.xdot, adm.x_d, K, D);
      const auto ctrl = controller.compute(state, F, step % base_every == 0);
      const Mat J = task_jacobian(model, state.q);
      state = integrate(model, state, ctrl.tau, J.transpose() * contact.on_robot, cfg.dt);
      if (!state.q.allFinite()) throw IntegratorDiverged("teacher simulation diverged", step);

      bool reached = true;
      for (int j = 0; j < m; ++j) {
        if (!active(j) || (j == v && force_axis)) continue;
        if (std::abs(target(j) - adm.x_d(j)) > cfg.position_tol || std::abs(target(j) - state.x(j)) > 0.02)
          reached = false;
      }
      if (force_axis && phase.settle > 0.0) {
        settled = std::abs(f_ext(v) - f_des) < cfg.force_tol ? settled + cfg.dt : 0.0;
        if (settled < phase.settle) reached = false;
      }
      done = reached;
    }
    if (!done)
      throw PhaseTimeout("teacher phase " + std::to_string(pi) + " (" + phase.name + ") did not finish within " +
                             format_double(phase.max_duration) + " s",
                         static_cast<int>(pi));
  }
  return out;
}

void record_demo(const std::filesystem::path& path, const DemoDataset& data) { write_demo_csv(path, data); }

}  // namespace vic
