#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vic/commands.hpp"
#include "vic/demo_io.hpp"
#include "vic/errors.hpp"
#include "vic/gmm.hpp"
#include "vic/stiffness_qp.hpp"
#include "vic/whole_body.hpp"

namespace py = pybind11;
using namespace vic;

namespace {

TaskVec task(const Eigen::VectorXd& v, const char* name) {
  if (v.size() < 1 || v.size() > kMaxTaskDim) throw py::value_error(std::string(name) + ": expected 1 to 3 entries");
  return v;
}

py::dict solve_qp(const Eigen::VectorXd& offset, const Eigen::VectorXd& slope, const Eigen::VectorXd& F_d,
                  const Eigen::VectorXd& k_min, const Eigen::VectorXd& k_max, const Eigen::VectorXd& f_max,
                  const Eigen::VectorXd& Q, const Eigen::VectorXd& R, std::optional<Eigen::VectorXd> tank_c,
                  double tank_b) {
  StiffnessQp qp;
  qp.wrench = {task(offset, "offset"), task(slope, "slope")};
  qp.F_d = task(F_d, "F_d");
  qp.envelope = {task(k_min, "k_min"), task(k_max, "k_max"), task(f_max, "f_max")};
  qp.weights = {task(Q, "Q"), task(R, "R")};
  if (tank_c) qp.tank = LinearConstraint{task(*tank_c, "tank_c"), tank_b};
  const QpSolution sol = solve_stiffness_qp(qp);
  py::dict out;
  out["k"] = Eigen::VectorXd(sol.k);
  out["objective"] = sol.objective;
  out["infeasible"] = sol.infeasible;
  out["tank_active"] = sol.tank_active;
  out["kkt_residual"] = sol.infeasible ? 0.0 : kkt_residual(qp, sol);
  return out;
}

py::dict mixture_dict(const GaussianMixture& g) {
  py::list weights, means, covs;
  for (const auto& c : g.components) {
    weights.append(c.weight);
    means.append(c.mean);
    covs.append(c.covariance);
  }
  py::dict out;
  out["weights"] = weights;
  out["means"] = means;
  out["covariances"] = covs;
  return out;
}

py::dict fit(const Eigen::MatrixXd& data, int K, int max_iters, double tol, double reg_floor, std::uint64_t seed) {
  EmConfig cfg;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.reg_floor = reg_floor;
  cfg.seed = seed;
  const EmResult r = fit_em(data, K, cfg);
  py::dict out = mixture_dict(r.model);
  out["loglik_trace"] = r.loglik_trace;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  return out;
}

py::dict reference(const std::string& model_json, const std::vector<double>& t) {
  const GaussianMixture g = mixture_from_json(model_json);
  const auto ref = generate_reference(g, t, 0.01, false);
  const int m = g.task_dim();
  Eigen::MatrixXd x(t.size(), m), xd(t.size(), m), f(t.size(), m);
  for (std::size_t i = 0; i < t.size(); ++i) {
    x.row(i) = ref.samples[i].x_d.transpose();
    xd.row(i) = ref.samples[i].xdot_d.transpose();
    f.row(i) = ref.samples[i].F_d.transpose();
  }
  py::dict out;
  out["x_d"] = x;
  out["xdot_d"] = xd;
  out["F_d"] = f;
  out["extrapolated"] = ref.extrapolated;
  return out;
}

ExperimentConfig resolve(const std::optional<std::filesystem::path>& path, std::optional<std::filesystem::path> out,
                         std::optional<std::uint64_t> seed) {
  ExperimentConfig c = path ? load_config(*path) : default_config();
  if (out) c.output_dir = *out;
  if (seed) c.seed = *seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_vic, m) {
  m.doc() = "Variable impedance control simulator core";

  // later registrations are tried first, so the base class goes first
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def("damping_from_stiffness", py::overload_cast<double>(&damping_from_stiffness), py::arg("k"));
  m.def("solve_stiffness_qp", &solve_qp, py::arg("offset"), py::arg("slope"), py::arg("F_d"), py::arg("k_min"),
        py::arg("k_max"), py::arg("f_max"), py::arg("Q"), py::arg("R"), py::arg("tank_c") = py::none(),
        py::arg("tank_b") = 0.0);
  m.def("fit_em", &fit, py::arg("data"), py::arg("K"), py::arg("max_iters") = 300, py::arg("tol") = 1e-7,
        py::arg("reg_floor") = 1e-6, py::arg("seed") = 1);
  m.def("generate_reference", &reference, py::arg("model_json"), py::arg("t"));

  m.def(
      "weighted_inverse_dynamics",
      [](const Eigen::VectorXd& q, const Eigen::VectorXd& F, const Eigen::VectorXd& H, const Eigen::VectorXd& tau0) {
        const RobotModel model = RobotModel::planar_xz();
        const Mat M = mass_matrix(model, q);
        const Mat J = task_jacobian(model, q);
        const TaskMat L = cartesian_inertia(M, J);
        const Mat W = weighting_matrix(Vec(H).asDiagonal().toDenseMatrix(), M);
        return Eigen::VectorXd(weighted_inverse_dynamics(M, J, L, W, task(F, "F"), tau0));
      },
      py::arg("q"), py::arg("F"), py::arg("H"), py::arg("tau0"), "Planar plant torque for task wrench F.");

  m.def(
      "config_hash",
      [](std::optional<std::filesystem::path> path) { return resolve(path, std::nullopt, std::nullopt).hash; },
      py::arg("config") = py::none());
  m.def(
      "demo",
      [](std::optional<std::filesystem::path> config, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed) {
        py::gil_scoped_release release;
        return cmd_demo(resolve(config, out, seed));
      },
      py::arg("config") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none());
  m.def(
      "train",
      [](std::optional<std::filesystem::path> config, std::optional<std::filesystem::path> out) {
        TrainReport r;
        {
          py::gil_scoped_release release;
          r = cmd_train(resolve(config, out, std::nullopt));
        }
        py::dict d;
        d["components"] = r.components;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["loglik_trace"] = r.loglik_trace;
        d["model_path"] = r.model_path;
        return d;
      },
      py::arg("config") = py::none(), py::arg("out") = py::none());
  m.def(
      "rollout",
      [](const std::string& mode, const std::string& disturbance, std::optional<std::filesystem::path> config,
         std::optional<std::filesystem::path> out, std::optional<std::uint64_t> seed) {
        RolloutResult r;
        {
          py::gil_scoped_release release;
          r = cmd_rollout(resolve(config, out, seed), stiffness_mode_from_string(mode), disturbance);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["safety_stop"] = r.metrics.safety_stop;
        d["force_rmse"] = r.metrics.force_rmse;
        d["position_rmse"] = r.metrics.position_rmse;
        d["min_tank"] = r.metrics.min_tank;
        d["max_abs_force"] = r.metrics.max_abs_force;
        d["free_mean_stiffness"] = r.metrics.free_mean_stiffness;
        d["force_undershoot"] = r.metrics.force_undershoot;
        return d;
      },
      py::arg("mode") = "os", py::arg("disturbance") = "none", py::arg("config") = py::none(),
      py::arg("out") = py::none(), py::arg("seed") = py::none());
  m.def(
      "compare",
      [](std::optional<std::filesystem::path> config, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed) {
        CompareResult r;
        {
          py::gil_scoped_release release;
          r = cmd_compare(resolve(config, out, seed));
        }
        py::dict checks;
        for (const auto& c : r.checks) checks[py::str(c.name)] = c.pass;
        py::dict d;
        d["csv"] = r.csv;
        d["text"] = r.text;
        d["checks"] = checks;
        return d;
      },
      py::arg("config") = py::none(), py::arg("out") = py::none(), py::arg("seed") = py::none());
}
