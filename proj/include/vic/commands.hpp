#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vic/config.hpp"
#include "vic/episode.hpp"
#include "vic/metrics.hpp"

namespace vic {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kSafetyStop = 2;
inline constexpr int kConfig = 3;
inline constexpr int kNumeric = 4;
}  // namespace exit_code

/// Generates config.demos teacher runs into <out>/demos/demo_<i>.csv.
std::vector<std::filesystem::path> cmd_demo(const ExperimentConfig& config);

struct TrainReport {
  int components = 0;
  int iterations = 0;
  bool converged = false;
  std::size_t rows = 0;
  std::vector<double> loglik_trace;
  std::filesystem::path model_path;
};

/// Fits the mixture on every demo in <out>/demos and writes model.json and train_report.json.
TrainReport cmd_train(const ExperimentConfig& config);

struct RolloutResult {
  EpisodeLog log;
  EpisodeMetrics metrics;
  int exit_code = exit_code::kOk;
};

/// Runs one episode against <out>/model.json and writes episode.csv and metrics.json
/// under <out>/rollout_<mode>_<scenario>/.
RolloutResult cmd_rollout(const ExperimentConfig& config, StiffnessMode mode, const std::string& scenario,
                          bool write_files = true);

struct CompareRow {
  StiffnessMode mode;
  std::string scenario;
  EpisodeMetrics metrics;
};

struct CompareCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  std::vector<CompareCheck> checks;
  std::string csv;
  std::string text;
  bool all_pass() const;
};

/// LS, HS and OS under no disturbance and under config.compare_disturbance.
CompareResult run_compare(const ExperimentConfig& config, const GaussianMixture& model);
/// run_compare against <out>/model.json, writing compare.csv and compare.txt.
CompareResult cmd_compare(const ExperimentConfig& config);

/// demo, train and compare in sequence.
CompareResult cmd_pipeline(const ExperimentConfig& config);

}  // namespace vic
