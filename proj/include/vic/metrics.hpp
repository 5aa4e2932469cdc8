#pragma once

#include <filesystem>
#include <string>

#include "vic/episode.hpp"

namespace vic {

struct MetricsConfig {
  double contact_threshold = 5.0;  // demanded normal push (N) marking a contact-phase step
  double free_threshold = 1.0;     // |F_d| (N) below which a step without contact is free motion
};

struct EpisodeMetrics {
  TaskVec force_rmse_axis;     // contact phase, N
  double force_rmse = 0.0;     // sqrt(mean |F_ext - F_d|^2), contact phase
  TaskVec position_rmse_axis;  // free motion, m
  double position_rmse = 0.0;  // sqrt(mean |x - x_d|^2), free motion
  double min_tank = 0.0;
  double max_abs_force = 0.0;  // max_j |F_ext_j| over the episode
  bool safety_stop = false;
  double safety_time = 0.0;
  double free_mean_stiffness = 0.0;  // mean over free steps and axes, N/m
  double contact_mean_normal = 0.0;  // mean normal push on the table in the contact phase, N
  double contact_mean_desired = 0.0;
  bool force_undershoot = false;  // mean normal below 0.7 of the demanded mean
  double tank_balance_error = 0.0;  // |T_end - T_0 - sum Tdot dt|, J
  long contact_steps = 0;
  long free_steps = 0;
  long steps = 0;
  double duration = 0.0;
};

EpisodeMetrics episode_metrics(const EpisodeLog& log, const MetricsConfig& config = {});

/// Metrics plus run metadata (mode, scenario, seed, config hash).
std::string metrics_to_json(const EpisodeMetrics& metrics, const EpisodeLog& log);
void write_metrics_json(const std::filesystem::path& path, const EpisodeMetrics& metrics, const EpisodeLog& log);

}  // namespace vic
