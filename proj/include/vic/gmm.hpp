#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vic/linalg.hpp"

namespace vic {

/// One time-stamped demonstration sample: desired pose, desired twist and the
/// estimated interaction force, all translational and in task coordinates.
struct DemoRow {
  int demo_id = 0;
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd xd;
  Eigen::VectorXd f;
};

struct DemoDataset {
  std::vector<std::string> axes;  // task axis labels, e.g. {"x", "z"}
  std::vector<DemoRow> rows;

  int task_dim() const { return static_cast<int>(axes.size()); }
  std::vector<int> demo_ids() const;  // sorted, unique

  /// Checks row dimensions, strictly increasing time within each demo and the
  /// minimum demo count. Throws DataError.
  void validate(int min_demos = 2) const;

  /// Stacks rows into an (N x (1 + 3 m)) matrix laid out as [t, x, xd, f].
  Eigen::MatrixXd to_matrix() const;
};

/// Linearly rescales the time axis of every demo so that all demos start at
/// t = 0 and last the mean demo duration.
DemoDataset align_demos(const DemoDataset& data);

struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;
  std::vector<int> input_dims{0};
  std::vector<int> output_dims;
  std::vector<std::string> axes;
  // Input support seen during training; GMR flags queries outside it.
  double input_min = 0.0;
  double input_max = 0.0;

  int dim() const { return components.empty() ? 0 : static_cast<int>(components.front().mean.size()); }
  int size() const { return static_cast<int>(components.size()); }
  int task_dim() const { return static_cast<int>(axes.size()); }

  /// Throws DataError when weights do not sum to one, dimensions disagree or a
  /// covariance is not symmetric positive definite with eigenvalues >= floor.
  void validate(double reg_floor = 0.0) const;
};

struct EmConfig {
  int max_iters = 300;
  double tol = 1e-7;  // relative log-likelihood improvement
  double reg_floor = 1e-6;
  std::uint64_t seed = 1;
  double jitter = 1e-3;  // init mean jitter, in units of the bin standard deviation
};

struct EmResult {
  GaussianMixture model;
  std::vector<double> loglik_trace;  // total log-likelihood of the i-th parameter set
  std::vector<int> restart_iterations;  // iterations at which a component was re-seeded
  int iterations = 0;
  bool converged = false;
};

/// Expectation-maximization on the rows of `data` (one sample per row).
/// Components are initialized from K contiguous bins along the first input
/// column. A component whose responsibility mass collapses is re-seeded from a
/// random row. When max_iters is hit, the last model is returned with
/// converged = false.
EmResult fit_em(const Eigen::MatrixXd& data, int K, const EmConfig& config,
                std::vector<int> input_dims = {0});

/// Fits the time-indexed mixture over [t, x, xd, f] after temporal alignment.
EmResult fit_em(const DemoDataset& data, int K, const EmConfig& config);

double log_likelihood(const GaussianMixture& model, const Eigen::MatrixXd& data);

struct ReferenceSample {
  double t = 0.0;
  TaskVec x_d;
  TaskVec xdot_d;
  TaskVec F_d;
  Eigen::MatrixXd output_covariance;  // empty when not requested
  Eigen::VectorXd mixing_weights;
  bool underflow = false;     // all input likelihoods underflowed; nearest component used
  bool extrapolated = false;  // query outside the training support
};

/// Gaussian mixture regression with precomputed per-component conditionals.
class GmrConditioner {
 public:
  explicit GmrConditioner(const GaussianMixture& model);

  /// Conditional mean and moment-matched covariance of the outputs given the
  /// input vector.
  void condition(const Eigen::VectorXd& input, Eigen::VectorXd& mean, Eigen::MatrixXd* covariance,
                 Eigen::VectorXd& weights, bool& underflow) const;

  ReferenceSample sample(double t, bool with_covariance = true) const;

  const GaussianMixture& model() const { return model_; }

 private:
  struct Conditional {
    double log_weight;
    Eigen::VectorXd mu_in;
    Eigen::VectorXd mu_out;
    Eigen::MatrixXd in_cov_inv;
    Eigen::MatrixXd gain;      // Sigma_OI Sigma_II^-1
    Eigen::MatrixXd cond_cov;  // Sigma_OO - Sigma_OI Sigma_II^-1 Sigma_IO
    double log_norm;
  };
  GaussianMixture model_;
  std::vector<Conditional> parts_;
};

ReferenceSample gmr_condition(const GaussianMixture& model, double t);

struct ReferenceTrajectory {
  std::vector<ReferenceSample> samples;
  bool extrapolated = false;
  bool discontinuous = false;  // some adjacent positions jumped by more than max_step

  double duration() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
  int task_dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x_d.size()); }
};

/// Evaluates GMR on an increasing grid. Throws DataError on an empty or
/// non-increasing grid.
ReferenceTrajectory generate_reference(const GaussianMixture& model, std::span<const double> t_grid,
                                       double max_step = 0.01, bool with_covariance = true);

/// Uniform grid [0, duration] with spacing dt (inclusive of both ends when
/// duration is a multiple of dt).
std::vector<double> uniform_grid(double t0, double t1, double dt);

}  // namespace vic
