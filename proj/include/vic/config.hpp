#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "vic/disturbance.hpp"
#include "vic/episode.hpp"
#include "vic/gmm.hpp"
#include "vic/metrics.hpp"
#include "vic/teacher.hpp"

namespace vic {

struct ExperimentConfig {
  RobotModel robot = RobotModel::planar_xz();
  WholeBodyGains gains = WholeBodyGains::defaults(RobotModel::planar_xz());
  double cond_max = 1e8;
  VicConfig vic = VicConfig::defaults(2);
  TableModel table;

  TeacherScript script = TeacherScript::cleaning(CleaningPattern{});
  TeacherConfig teacher;
  int demos = 3;

  int components = 40;
  EmConfig em;

  SimConfig sim;
  int log_every = 10;
  MetricsConfig metrics;
  DisturbanceSettings disturbances = DisturbanceSettings::defaults();
  std::string compare_disturbance = "lift-slow";

  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "out";
  std::string hash;  // FNV-1a of the resolved configuration document

  EpisodeSetup episode_setup() const;
  /// Demo i (0-based) uses seed + 1 + i.
  std::uint64_t demo_seed(int i) const { return seed + 1 + static_cast<std::uint64_t>(i); }
  void validate() const;
};

/// Built-in defaults (planar plant, six-stroke cleaning pattern).
ExperimentConfig default_config();

/// Parses a configuration document. Relative file references ("script",
/// "disturbances", "output_dir") resolve against base_dir. Unknown keys and
/// invalid values raise ConfigError naming the offending key.
ExperimentConfig config_from_json(const std::string& text, const std::filesystem::path& base_dir,
                                  const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace vic
