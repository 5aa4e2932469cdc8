#include "vic/episode.hpp"

#include <cmath>
#include <random>

#include "vic/demo_io.hpp"
#include "vic/errors.hpp"

namespace vic {

std::string to_string(MotionPolicy policy) {
  switch (policy) {
    case MotionPolicy::Auto: return "auto";
    case MotionPolicy::Locomotion: return "locomotion";
    case MotionPolicy::Manipulation: return "manipulation";
  }
  return "auto";
}

MotionPolicy motion_policy_from_string(const std::string& name) {
  if (name == "auto") return MotionPolicy::Auto;
  if (name == "locomotion") return MotionPolicy::Locomotion;
  if (name == "manipulation") return MotionPolicy::Manipulation;
  throw ConfigError("unknown motion policy '" + name + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.01) throw ConfigError("sim dt must lie in (0, 0.01]");
  if (!(base_dt >= dt)) throw ConfigError("sim base_dt must be >= dt");
  if (!(safety_window >= 0.0)) throw ConfigError("safety window must be non-negative");
  if (!(state_bound > 0.0)) throw ConfigError("state bound must be positive");
  if (measurement_sigma < 0.0) throw ConfigError("measurement sigma must be non-negative");
  if (!(manipulation_on >= manipulation_off)) throw ConfigError("manipulation_on must be >= manipulation_off");
  table.validate();
}

EpisodeLog run_episode(const EpisodeSetup& setup, StiffnessMode mode, const GaussianMixture& reference,
                       const DisturbanceScript& disturbances, std::uint64_t seed) {
  const auto& model = setup.robot;
  const auto& sim = setup.sim;
  model.validate();
  sim.validate();
  disturbances.validate();
  const auto axes = model.axes();
  const int m = model.task_dim();
  if (reference.axes != axes) throw ConfigError("reference axes do not match the plant");

  const GmrConditioner gmr(reference);
  VicController vic(setup.vic, mode);
  WholeBodyController controller(model, setup.gains, setup.cond_max);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double t0 = reference.input_min;
  const long n_steps = static_cast<long>(std::floor((reference.input_max - t0) / sim.dt + 1e-9)) + 1;
  const long base_every = std::max(1L, std::lround(sim.base_dt / sim.dt));

  ReferenceSample ref = gmr.sample(t0, false);
  RobotState state = make_state(model, inverse_kinematics(model, ref.x_d, nominal_configuration(model)),
                                Vec::Zero(model.dof()));
  bool manipulation = sim.motion != MotionPolicy::Locomotion &&
                      (sim.motion == MotionPolicy::Manipulation || ref.F_d.norm() >= sim.manipulation_on);
  controller.reset(manipulation ? MotionMode::Manipulation : MotionMode::Locomotion, state.q);

  EpisodeLog log;
  log.axes = axes;
  log.mode = mode;
  log.seed = seed;
  log.dt = sim.dt;
  log.T_initial = vic.tank().energy;
  log.epsilon = vic.tank().epsilon;
  log.f_max = setup.vic.envelope.f_max;
  log.rows.reserve(static_cast<std::size_t>(n_steps));

  double over_limit = 0.0;
  for (long i = 0; i < n_steps; ++i) {
    const double t = t0 + static_cast<double>(i) * sim.dt;
    ref = gmr.sample(t, false);
    const DisturbanceSample dist = apply_disturbance(disturbances, t, axes);
    const ContactForce contact = contact_force(sim.table, state.x, state.xdot, dist.offset, dist.rate);
    const TaskVec on_robot = contact.on_robot + dist.force;

    EpisodeRow row;
    row.t = t;
    row.q = state.q;
    row.x = state.x;
    row.xdot = state.xdot;
    row.x_d = ref.x_d;
    row.F_d = ref.F_d;
    row.F_ext = -on_robot;
    row.F_meas = row.F_ext;
    for (int j = 0; j < m; ++j) row.F_meas(j) += sim.measurement_sigma * gauss(rng);
    row.T = vic.tank().energy;
    if (contact.in_contact) row.flags |= flags::kContact;
    if (ref.extrapolated) row.flags |= flags::kExtrapolated;
    if (ref.underflow) row.flags |= flags::kUnderflow;
    if (vic.tank().sigma()) row.flags |= flags::kSigma;

    bool over = false;
    for (int j = 0; j < m; ++j) over = over || std::abs(row.F_ext(j)) > log.f_max(j);
    over_limit = over ? over_limit + sim.dt : 0.0;
    if (over_limit > sim.safety_window) {
      log.safety_stop = true;
      log.safety_time = t;
      row.flags |= flags::kSafetyStop;
      row.k = vic.previous_stiffness();
      row.d = damping_from_stiffness(row.k);
      log.rows.push_back(std::move(row));
      break;
    }

    if (sim.motion == MotionPolicy::Auto) {
      const double demand = ref.F_d.norm();
      if (demand >= sim.manipulation_on) manipulation = true;
      if (demand <= sim.manipulation_off) manipulation = false;
    }
    controller.set_mode(manipulation ? MotionMode::Manipulation : MotionMode::Locomotion, state.q);
    if (manipulation) row.flags |= flags::kManipulation;

    TaskMat mu;
    if (setup.vic.use_coriolis) mu = cartesian_coriolis(model, state);
    const VicOutput out = vic.step(ref.x_d, ref.F_d, state.x, state.xdot, sim.dt, setup.vic.use_coriolis ? &mu : nullptr);
    row.k = out.k;
    row.d = out.d;
    row.p_diss = out.power.dissipation;
    row.p_stiff = out.power.stiffness;
    row.kkt = out.kkt;
    if (out.bypass) row.flags |= flags::kTankBypass;
    if (out.qp_infeasible) row.flags |= flags::kQpInfeasible;
    if (out.tank_active) row.flags |= flags::kTankActive;

    const auto ctrl = controller.compute(state, out.F, i % base_every == 0);
    if (ctrl.near_singular) row.flags |= flags::kNearSingular;
    log.rows.push_back(std::move(row));

    const Mat J = task_jacobian(model, state.q);
    state = integrate(model, state, ctrl.tau, J.transpose() * on_robot, sim.dt);
    if (!state.q.allFinite() || !state.qdot.allFinite() || state.q.cwiseAbs().maxCoeff() > sim.state_bound ||
        state.qdot.cwiseAbs().maxCoeff() > sim.state_bound)
      throw IntegratorDiverged("episode state diverged at step " + std::to_string(i), i);
  }
  log.T_final = vic.tank().energy;
  return log;
}

std::vector<Segment> model_segments(const GaussianMixture& model, double threshold) {
  const GmrConditioner gmr(model);
  const auto grid = uniform_grid(model.input_min, model.input_max, 0.01);
  std::vector<double> demand;
  demand.reserve(grid.size());
  const int v = model.task_dim() - 1;
  for (const double t : grid) demand.push_back(-gmr.sample(t, false).F_d(v));
  return reference_segments(grid, demand, threshold);
}

std::string format_episode_csv(const EpisodeLog& log, int every) {
  if (every < 1) throw DataError("log decimation must be >= 1");
  std::string out = "t";
  const std::size_t n_q = log.rows.empty() ? 0 : static_cast<std::size_t>(log.rows.front().q.size());
  for (std::size_t j = 0; j < n_q; ++j) out += ",q" + std::to_string(j);
  for (const char* prefix : {"x_", "xd_", "x_d_", "F_d_", "F_ext_", "F_meas_", "k_", "d_"})
    for (const auto& a : log.axes) out += std::string(",") + prefix + a;
  out += ",T,p_diss,p_stiff,flags\n";
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    if (i % static_cast<std::size_t>(every) != 0 && i + 1 != log.rows.size()) continue;
    const auto& r = log.rows[i];
    out += format_double(r.t);
    for (Eigen::Index j = 0; j < r.q.size(); ++j) out += "," + format_double(r.q(j));
    for (const auto* vec : {&r.x, &r.xdot, &r.x_d, &r.F_d, &r.F_ext, &r.F_meas, &r.k, &r.d})
      for (Eigen::Index j = 0; j < vec->size(); ++j) out += "," + format_double((*vec)(j));
    out += "," + format_double(r.T) + "," + format_double(r.p_diss) + "," + format_double(r.p_stiff) + "," +
           std::to_string(r.flags) + "\n";
  }
  return out;
}

void write_episode_csv(const std::filesystem::path& path, const EpisodeLog& log, int every) {
  write_text_file(path, format_episode_csv(log, every));
}

}  // namespace vic
