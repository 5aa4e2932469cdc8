#include "vic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "vic/demo_io.hpp"

namespace vic {

EpisodeMetrics episode_metrics(const EpisodeLog& log, const MetricsConfig& config) {
  const int m = static_cast<int>(log.axes.size());
  const int v = log.vertical_axis();
  EpisodeMetrics out;
  out.force_rmse_axis = TaskVec::Zero(m);
  out.position_rmse_axis = TaskVec::Zero(m);
  out.safety_stop = log.safety_stop;
  out.safety_time = log.safety_time;
  out.steps = static_cast<long>(log.rows.size());
  out.min_tank = log.rows.empty() ? log.T_initial : std::numeric_limits<double>::infinity();
  if (!log.rows.empty()) out.duration = log.rows.back().t - log.rows.front().t;

  double energy_in = 0.0;
  double stiffness_sum = 0.0;
  for (const auto& r : log.rows) {
    out.min_tank = std::min(out.min_tank, r.T);
    out.max_abs_force = std::max(out.max_abs_force, r.F_ext.cwiseAbs().maxCoeff());
    energy_in += (r.p_diss + r.p_stiff) * log.dt;
    const double demand = -r.F_d(v);
    if (demand >= config.contact_threshold) {
      ++out.contact_steps;
      out.force_rmse_axis += (r.F_ext - r.F_d).array().square().matrix();
      out.contact_mean_normal += -r.F_ext(v);
      out.contact_mean_desired += demand;
    } else if (r.F_d.norm() < config.free_threshold && !(r.flags & flags::kContact)) {
      ++out.free_steps;
      out.position_rmse_axis += (r.x - r.x_d).array().square().matrix();
      stiffness_sum += r.k.mean();
    }
  }
  out.min_tank = std::min(out.min_tank, log.T_final);
  out.tank_balance_error = std::abs(log.T_final - log.T_initial - energy_in);
  if (out.contact_steps > 0) {
    const double n = static_cast<double>(out.contact_steps);
    out.force_rmse = std::sqrt(out.force_rmse_axis.sum() / n);
    out.force_rmse_axis = (out.force_rmse_axis / n).cwiseSqrt();
    out.contact_mean_normal /= n;
    out.contact_mean_desired /= n;
    out.force_undershoot = out.contact_mean_normal < 0.7 * out.contact_mean_desired;
  }
  if (out.free_steps > 0) {
    const double n = static_cast<double>(out.free_steps);
    out.position_rmse = std::sqrt(out.position_rmse_axis.sum() / n);
    out.position_rmse_axis = (out.position_rmse_axis / n).cwiseSqrt();
    out.free_mean_stiffness = stiffness_sum / n;
  }
  return out;
}

std::string metrics_to_json(const EpisodeMetrics& mt, const EpisodeLog& log) {
  using nlohmann::ordered_json;
  auto vec = [](const TaskVec& x) { return std::vector<double>(x.data(), x.data() + x.size()); };
  ordered_json j;
  j["mode"] = to_string(log.mode);
  j["scenario"] = log.scenario;
  j["seed"] = log.seed;
  j["config_hash"] = log.config_hash;
  j["axes"] = log.axes;
  j["steps"] = mt.steps;
  j["duration"] = mt.duration;
  j["safety_stop"] = mt.safety_stop;
  j["safety_time"] = mt.safety_time;
  j["force_rmse"] = mt.force_rmse;
  j["force_rmse_axis"] = vec(mt.force_rmse_axis);
  j["position_rmse"] = mt.position_rmse;
  j["position_rmse_axis"] = vec(mt.position_rmse_axis);
  j["min_tank"] = mt.min_tank;
  j["tank_epsilon"] = log.epsilon;
  j["tank_balance_error"] = mt.tank_balance_error;
  j["max_abs_force"] = mt.max_abs_force;
  j["free_mean_stiffness"] = mt.free_mean_stiffness;
  j["contact_mean_normal"] = mt.contact_mean_normal;
  j["contact_mean_desired"] = mt.contact_mean_desired;
  j["force_undershoot"] = mt.force_undershoot;
  j["contact_steps"] = mt.contact_steps;
  j["free_steps"] = mt.free_steps;
  return j.dump(2) + "\n";
}

void write_metrics_json(const std::filesystem::path& path, const EpisodeMetrics& metrics, const EpisodeLog& log) {
  write_text_file(path, metrics_to_json(metrics, log));
}

}  // namespace vic
