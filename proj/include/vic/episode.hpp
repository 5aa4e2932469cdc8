#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vic/contact.hpp"
#include "vic/disturbance.hpp"
#include "vic/gmm.hpp"
#include "vic/stiffness_controller.hpp"
#include "vic/whole_body.hpp"

namespace vic {

enum class MotionPolicy { Auto, Locomotion, Manipulation };

std::string to_string(MotionPolicy policy);
MotionPolicy motion_policy_from_string(const std::string& name);

struct SimConfig {
  double dt = 1e-3;
  double base_dt = 0.02;        // zero-order hold of base torques
  double safety_window = 0.05;  // s of sustained |F_ext| > F_max before stopping
  double state_bound = 1e3;     // |q|, |qdot| beyond this count as divergence
  double measurement_sigma = 0.2;
  MotionPolicy motion = MotionPolicy::Auto;
  double manipulation_on = 3.0;   // |F_d| (N) switching to manipulation under Auto
  double manipulation_off = 1.0;  // |F_d| (N) switching back to locomotion
  TableModel table;

  void validate() const;
};

struct EpisodeSetup {
  RobotModel robot;
  WholeBodyGains gains;
  double cond_max = 1e8;
  VicConfig vic;
  SimConfig sim;
};

namespace flags {
inline constexpr std::uint32_t kContact = 1u << 0;
inline constexpr std::uint32_t kManipulation = 1u << 1;
inline constexpr std::uint32_t kNearSingular = 1u << 2;
inline constexpr std::uint32_t kQpInfeasible = 1u << 3;
inline constexpr std::uint32_t kTankBypass = 1u << 4;
inline constexpr std::uint32_t kTankActive = 1u << 5;
inline constexpr std::uint32_t kExtrapolated = 1u << 6;
inline constexpr std::uint32_t kSafetyStop = 1u << 7;
inline constexpr std::uint32_t kUnderflow = 1u << 8;
inline constexpr std::uint32_t kSigma = 1u << 9;
}  // namespace flags

struct EpisodeRow {
  double t = 0.0;
  Vec q;
  TaskVec x, xdot, x_d, F_d, F_ext, F_meas, k, d;
  double T = 0.0;       // tank energy at step entry
  double p_diss = 0.0;  // tank power terms applied during this step
  double p_stiff = 0.0;
  double kkt = 0.0;
  std::uint32_t flags = 0;
};

struct EpisodeLog {
  std::vector<std::string> axes;
  std::vector<EpisodeRow> rows;
  StiffnessMode mode = StiffnessMode::Optimized;
  std::string scenario = "none";
  std::uint64_t seed = 0;
  std::string config_hash;
  double dt = 1e-3;
  double T_initial = 0.0;
  double T_final = 0.0;  // after the last logged step
  double epsilon = 0.0;
  TaskVec f_max;
  bool safety_stop = false;
  double safety_time = 0.0;

  int vertical_axis() const { return static_cast<int>(axes.size()) - 1; }
};

/// Closed-loop rollout on the fixed dt grid spanning the model's time support.
/// Ends early on a safety stop. Throws IntegratorDiverged with the step index.
EpisodeLog run_episode(const EpisodeSetup& setup, StiffnessMode mode, const GaussianMixture& reference,
                       const DisturbanceScript& disturbances, std::uint64_t seed);

/// Reference segments (contact strokes and free returns) of a trained model,
/// sampled on a 10 ms grid.
std::vector<Segment> model_segments(const GaussianMixture& model, double threshold = 5.0);

/// One CSV row every `every` steps (the last row is always kept).
std::string format_episode_csv(const EpisodeLog& log, int every = 1);
void write_episode_csv(const std::filesystem::path& path, const EpisodeLog& log, int every = 1);

}  // namespace vic
