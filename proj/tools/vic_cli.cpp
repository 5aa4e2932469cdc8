#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vic/commands.hpp"
#include "vic/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string mode = "os";
  std::string disturbance = "none";
  std::optional<std::uint64_t> seed;
  std::string out;
};

vic::ExperimentConfig resolve(const Options& o) {
  vic::ExperimentConfig c = o.config.empty() ? vic::default_config() : vic::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "simulation seed");
  cmd->add_option("--out", o.out, "output directory");
}

int report_compare(const vic::CompareResult& r, const fs::path& dir) {
  std::cout << r.text << "wrote " << (dir / "compare.csv").string() << "\n";
  return vic::exit_code::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable impedance table-cleaning simulator"};
  app.require_subcommand(1);
  Options o;

  auto* demo = app.add_subcommand("demo", "generate teacher demonstrations");
  add_common(demo, o);
  auto* train = app.add_subcommand("train", "fit the reference mixture on the demonstrations");
  add_common(train, o);
  auto* rollout = app.add_subcommand("rollout", "run one closed-loop episode");
  add_common(rollout, o);
  rollout->add_option("--mode", o.mode, "stiffness setting")->check(CLI::IsMember({"ls", "hs", "os"}));
  rollout->add_option("--disturbance", o.disturbance, "scenario name or none")
      ->check(CLI::IsMember(vic::scenario_names()));
  auto* compare = app.add_subcommand("compare", "run the LS/HS/OS comparison matrix");
  add_common(compare, o);
  auto* pipeline = app.add_subcommand("pipeline", "demo, train and compare");
  add_common(pipeline, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : vic::exit_code::kConfig;
  }

  try {
    const vic::ExperimentConfig c = resolve(o);
    if (demo->parsed()) {
      for (const auto& p : vic::cmd_demo(c)) std::cout << "wrote " << p.string() << "\n";
    } else if (train->parsed()) {
      const auto r = vic::cmd_train(c);
      std::cout << "K=" << r.components << " rows=" << r.rows << " iterations=" << r.iterations
                << (r.converged ? " converged" : " not converged") << " loglik=" << r.loglik_trace.back() << "\n"
                << "wrote " << r.model_path.string() << "\n";
    } else if (rollout->parsed()) {
      const auto r = vic::cmd_rollout(c, vic::stiffness_mode_from_string(o.mode), o.disturbance);
      const auto& m = r.metrics;
      std::cout << "mode=" << o.mode << " scenario=" << o.disturbance << " force_rmse=" << m.force_rmse
                << " position_rmse=" << m.position_rmse << " min_tank=" << m.min_tank
                << " max_abs_force=" << m.max_abs_force << (m.force_undershoot ? " force_undershoot" : "") << "\n";
      if (m.safety_stop) std::cout << "safety stop at t=" << m.safety_time << "\n";
      return r.exit_code;
    } else if (compare->parsed()) {
      return report_compare(vic::cmd_compare(c), c.output_dir);
    } else if (pipeline->parsed()) {
      return report_compare(vic::cmd_pipeline(c), c.output_dir);
    }
  } catch (const vic::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return vic::exit_code::kNumeric;
  } catch (const vic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vic::exit_code::kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vic::exit_code::kConfig;
  }
  return vic::exit_code::kOk;
}
