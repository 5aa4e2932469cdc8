#include "vic/commands.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "vic/demo_io.hpp"
#include "vic/errors.hpp"
#include "vic/teacher.hpp"

namespace vic {

namespace fs = std::filesystem;

namespace {

fs::path demo_dir(const ExperimentConfig& c) { return c.output_dir / "demos"; }
fs::path model_path(const ExperimentConfig& c) { return c.output_dir / "model.json"; }

std::vector<fs::path> list_demos(const ExperimentConfig& c) {
  std::vector<fs::path> files;
  if (fs::is_directory(demo_dir(c)))
    for (const auto& e : fs::directory_iterator(demo_dir(c)))
      if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no demonstrations found in " + demo_dir(c).string());
  return files;
}

GaussianMixture load_model(const ExperimentConfig& c) {
  GaussianMixture model = read_mixture(model_path(c));
  if (model.axes != c.robot.axes())
    throw DataError(model_path(c).string() + ": model axes do not match the configured plant");
  return model;
}

EpisodeLog rollout(const ExperimentConfig& c, const GaussianMixture& model, StiffnessMode mode,
                   const std::string& scenario) {
  const auto script = build_scenario(scenario, c.disturbances, model_segments(model, c.metrics.contact_threshold));
  EpisodeLog log = run_episode(c.episode_setup(), mode, model, script, c.seed);
  log.scenario = scenario;
  log.config_hash = c.hash;
  return log;
}

}  // namespace

std::vector<fs::path> cmd_demo(const ExperimentConfig& c) {
  std::vector<fs::path> paths;
  for (int i = 0; i < c.demos; ++i) {
    const DemoDataset data = synthetic_teacher(c.script, c.robot, c.gains, c.teacher, c.demo_seed(i), i);
    const fs::path p = demo_dir(c) / ("demo_" + std::to_string(i) + ".csv");
    record_demo(p, data);
    paths.push_back(p);
  }
  return paths;
}

TrainReport cmd_train(const ExperimentConfig& c) {
  std::vector<DemoDataset> parts;
  for (const auto& p : list_demos(c)) parts.push_back(read_demo_csv(p));
  const DemoDataset data = merge_datasets(parts);
  if (data.axes != c.robot.axes()) throw DataError("demonstration axes do not match the configured plant");
  const EmResult fit = fit_em(data, c.components, c.em);

  TrainReport report;
  report.components = c.components;
  report.iterations = fit.iterations;
  report.converged = fit.converged;
  report.rows = data.rows.size();
  report.loglik_trace = fit.loglik_trace;
  report.model_path = model_path(c);
  write_mixture(report.model_path, fit.model);

  nlohmann::ordered_json j;
  j["config_hash"] = c.hash;
  j["components"] = report.components;
  j["rows"] = report.rows;
  j["demos"] = parts.size();
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["loglik_trace"] = report.loglik_trace;
  j["restart_iterations"] = fit.restart_iterations;
  write_text_file(c.output_dir / "train_report.json", j.dump(2) + "\n");
  return report;
}

RolloutResult cmd_rollout(const ExperimentConfig& c, StiffnessMode mode, const std::string& scenario,
                          bool write_files) {
  const GaussianMixture model = load_model(c);
  RolloutResult r;
  r.log = rollout(c, model, mode, scenario);
  r.metrics = episode_metrics(r.log, c.metrics);
  r.exit_code = r.log.safety_stop ? exit_code::kSafetyStop : exit_code::kOk;
  if (write_files) {
    const fs::path dir = c.output_dir / ("rollout_" + to_string(mode) + "_" + scenario);
    write_episode_csv(dir / "episode.csv", r.log, c.log_every);
    write_metrics_json(dir / "metrics.json", r.metrics, r.log);
  }
  return r;
}

bool CompareResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CompareCheck& k) { return k.pass; });
}

CompareResult run_compare(const ExperimentConfig& c, const GaussianMixture& model) {
  CompareResult res;
  const std::string disturbed = c.compare_disturbance;
  for (const std::string& scenario : {std::string("none"), disturbed})
    for (const auto mode : {StiffnessMode::Low, StiffnessMode::High, StiffnessMode::Optimized}) {
      const EpisodeLog log = rollout(c, model, mode, scenario);
      res.rows.push_back({mode, scenario, episode_metrics(log, c.metrics)});
    }
  auto row = [&](StiffnessMode m, const std::string& s) -> const EpisodeMetrics& {
    for (const auto& r : res.rows)
      if (r.mode == m && r.scenario == s) return r.metrics;
    throw Error("missing compare row");
  };
  const auto& ls = row(StiffnessMode::Low, "none");
  const auto& hs = row(StiffnessMode::High, "none");
  const auto& os = row(StiffnessMode::Optimized, "none");
  const auto& hs_d = row(StiffnessMode::High, disturbed);
  const auto& os_d = row(StiffnessMode::Optimized, disturbed);
  const double k_min = c.vic.envelope.k_min.mean();
  const double eps = c.vic.tank.epsilon;

  auto fmt = format_double;
  res.checks.push_back({"os_force_tracking", os.force_rmse < ls.force_rmse && os.force_rmse < hs.force_rmse,
                        "os " + fmt(os.force_rmse) + " ls " + fmt(ls.force_rmse) + " hs " + fmt(hs.force_rmse)});
  res.checks.push_back({"ls_contact_force", ls.force_undershoot,
                        "mean normal " + fmt(ls.contact_mean_normal) + " desired " + fmt(ls.contact_mean_desired)});
  res.checks.push_back({"hs_safety_stop", hs_d.safety_stop && !os_d.safety_stop,
                        "hs stop " + std::to_string(hs_d.safety_stop) + " os stop " + std::to_string(os_d.safety_stop)});
  res.checks.push_back({"os_free_motion", os.position_rmse < 0.01 && std::abs(os.free_mean_stiffness - k_min) <= 0.1 * k_min,
                        "position rmse " + fmt(os.position_rmse) + " mean k " + fmt(os.free_mean_stiffness)});
  bool tank_ok = true;
  std::string tank_detail;
  for (const auto& r : res.rows)
    if (r.mode == StiffnessMode::Optimized) {
      tank_ok = tank_ok && r.metrics.min_tank >= eps;
      tank_detail += r.scenario + " " + fmt(r.metrics.min_tank) + " ";
    }
  res.checks.push_back({"os_tank_floor", tank_ok, tank_detail + "epsilon " + fmt(eps)});

  std::ostringstream csv;
  csv << "mode,scenario,force_rmse,position_rmse,min_tank,max_abs_force,safety_stop,safety_time,"
         "free_mean_stiffness,contact_mean_normal,contact_mean_desired,tank_balance_error,steps,config_hash\n";
  for (const auto& r : res.rows) {
    const auto& m = r.metrics;
    csv << to_string(r.mode) << ',' << r.scenario << ',' << fmt(m.force_rmse) << ',' << fmt(m.position_rmse) << ','
        << fmt(m.min_tank) << ',' << fmt(m.max_abs_force) << ',' << (m.safety_stop ? 1 : 0) << ','
        << fmt(m.safety_time) << ',' << fmt(m.free_mean_stiffness) << ',' << fmt(m.contact_mean_normal) << ','
        << fmt(m.contact_mean_desired) << ',' << fmt(m.tank_balance_error) << ',' << m.steps << ',' << c.hash
        << '\n';
  }
  res.csv = csv.str();

  std::ostringstream txt;
  char line[160];
  std::snprintf(line, sizeof(line), "%-4s %-16s %10s %10s %8s %9s %5s %8s\n", "mode", "scenario", "F rmse", "x rmse",
                "min T", "max |F|", "stop", "free k");
  txt << line;
  for (const auto& r : res.rows) {
    const auto& m = r.metrics;
    std::snprintf(line, sizeof(line), "%-4s %-16s %10.4f %10.5f %8.4f %9.3f %5s %8.2f\n", to_string(r.mode).c_str(),
                  r.scenario.c_str(), m.force_rmse, m.position_rmse, m.min_tank, m.max_abs_force,
                  m.safety_stop ? "yes" : "no", m.free_mean_stiffness);
    txt << line;
  }
  txt << '\n';
  for (const auto& k : res.checks) txt << (k.pass ? "ok   " : "FAIL ") << k.name << ": " << k.detail << '\n';
  res.text = txt.str();
  return res;
}

CompareResult cmd_compare(const ExperimentConfig& c) {
  CompareResult res = run_compare(c, load_model(c));
  write_text_file(c.output_dir / "compare.csv", res.csv);
  write_text_file(c.output_dir / "compare.txt", res.text);
  return res;
}

CompareResult cmd_pipeline(const ExperimentConfig& c) {
  cmd_demo(c);
  cmd_train(c);
  return cmd_compare(c);
}

}  // namespace vic
