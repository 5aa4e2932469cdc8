#include "vic/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "vic/errors.hpp"

namespace vic {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::MatrixXd select(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

Eigen::VectorXd select(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

// Log density of every row of `x` under N(mean, cov). Returns false when the
// covariance is not positive definite.
bool log_gaussian_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       Eigen::Ref<Eigen::VectorXd> out) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd centered = (x.rowwise() - mean.transpose()).transpose();
  const Eigen::MatrixXd whitened = llt.matrixL().solve(centered);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double dim = static_cast<double>(mean.size());
  out = (-0.5 * (dim * kLog2Pi + log_det)) - 0.5 * whitened.colwise().squaredNorm().transpose().array();
  return true;
}

}  // namespace

std::vector<int> DemoDataset::demo_ids() const {
  std::set<int> ids;
  for (const auto& r : rows) ids.insert(r.demo_id);
  return {ids.begin(), ids.end()};
}

void DemoDataset::validate(int min_demos) const {
  const int m = task_dim();
  if (m < 1 || m > kMaxTaskDim) throw DataError("dataset task dimension must be 1..3, got " + std::to_string(m));
  if (rows.empty()) throw DataError("dataset is empty");
  std::map<int, double> last_t;
  std::map<int, int> counts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.x.size() != m || r.xd.size() != m || r.f.size() != m)
      throw DataError("row " + std::to_string(i) + " has inconsistent dimensions");
    if (!std::isfinite(r.t) || !r.x.allFinite() || !r.xd.allFinite() || !r.f.allFinite())
      throw DataError("row " + std::to_string(i) + " contains non-finite values");
    auto it = last_t.find(r.demo_id);
    if (it != last_t.end() && !(r.t > it->second))
      throw DataError("demo " + std::to_string(r.demo_id) + ": time not strictly increasing at row " +
                      std::to_string(i));
    last_t[r.demo_id] = r.t;
    ++counts[r.demo_id];
  }
  if (static_cast<int>(counts.size()) < min_demos)
    throw DataError("need at least " + std::to_string(min_demos) + " demos, got " + std::to_string(counts.size()));
  for (const auto& [id, n] : counts)
    if (n < 2) throw DataError("demo " + std::to_string(id) + " has fewer than 2 rows");
}

Eigen::MatrixXd DemoDataset::to_matrix() const {
  const int m = task_dim();
  Eigen::MatrixXd out(rows.size(), 1 + 3 * m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(i, 0) = rows[i].t;
    out.block(i, 1, 1, m) = rows[i].x.transpose();
    out.block(i, 1 + m, 1, m) = rows[i].xd.transpose();
    out.block(i, 1 + 2 * m, 1, m) = rows[i].f.transpose();
  }
  return out;
}

DemoDataset align_demos(const DemoDataset& data) {
  data.validate(1);
  std::map<int, std::pair<double, double>> span;
  for (const auto& r : data.rows) {
    auto [it, inserted] = span.try_emplace(r.demo_id, r.t, r.t);
    if (!inserted) {
      it->second.first = std::min(it->second.first, r.t);
      it->second.second = std::max(it->second.second, r.t);
    }
  }
  double mean_duration = 0.0;
  for (const auto& [id, s] : span) mean_duration += s.second - s.first;
  mean_duration /= static_cast<double>(span.size());

  DemoDataset out = data;
  for (auto& r : out.rows) {
    const auto [t0, t1] = span.at(r.demo_id);
    r.t = (r.t - t0) * (mean_duration / (t1 - t0));
  }
  return out;
}

void GaussianMixture::validate(double reg_floor) const {
  if (components.empty()) throw DataError("mixture has no components");
  const int d = dim();
  double total = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    const std::string tag = "component " + std::to_string(k);
    if (c.mean.size() != d || c.covariance.rows() != d || c.covariance.cols() != d)
      throw DataError(tag + ": dimension mismatch");
    if (!(c.weight > 0.0 && c.weight <= 1.0)) throw DataError(tag + ": weight outside (0, 1]");
    if (!c.mean.allFinite() || !c.covariance.allFinite()) throw DataError(tag + ": non-finite parameters");
    const double asym = (c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + c.covariance.cwiseAbs().maxCoeff())) throw DataError(tag + ": covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 0.0) || min_eig < reg_floor * (1.0 - 1e-9))
      throw DataError(tag + ": covariance eigenvalue " + std::to_string(min_eig) + " below floor");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DataError("mixture weights sum to " + std::to_string(total));
  for (int i : input_dims)
    if (i < 0 || i >= d) throw DataError("input dimension out of range");
  for (int o : output_dims)
    if (o < 0 || o >= d) throw DataError("output dimension out of range");
}

EmResult fit_em(const Eigen::MatrixXd& data, int K, const EmConfig& config, std::vector<int> input_dims) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (K < 1) throw DataError("K must be >= 1");
  if (n < 10 * static_cast<Eigen::Index>(K))
    throw DataError("need at least 10*K rows (" + std::to_string(10 * K) + "), got " + std::to_string(n));
  if (input_dims.empty()) throw DataError("at least one input dimension is required");
  if (!data.allFinite()) throw DataError("training data contains non-finite values");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd reg = config.reg_floor * Eigen::MatrixXd::Identity(d, d);

  const Eigen::VectorXd global_mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd global_centered = data.rowwise() - global_mean.transpose();
  const Eigen::MatrixXd global_cov =
      symmetrized(global_centered.transpose() * global_centered / static_cast<double>(n)) + reg;

  // Contiguous bins along the first input column.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int key = input_dims.front();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return data(a, key) < data(b, key); });

  GaussianMixture model;
  model.input_dims = input_dims;
  for (int j = 0; j < d; ++j)
    if (std::find(input_dims.begin(), input_dims.end(), j) == input_dims.end()) model.output_dims.push_back(j);
  model.input_min = data.col(key).minCoeff();
  model.input_max = data.col(key).maxCoeff();
  model.components.resize(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::Index lo = n * k / K;
    const Eigen::Index hi = n * (k + 1) / K;
    Eigen::MatrixXd bin(hi - lo, d);
    for (Eigen::Index i = lo; i < hi; ++i) bin.row(i - lo) = data.row(order[i]);
    auto& c = model.components[k];
    c.weight = 1.0 / K;
    c.mean = bin.colwise().mean().transpose();
    const Eigen::MatrixXd centered = bin.rowwise() - c.mean.transpose();
    c.covariance = symmetrized(centered.transpose() * centered / static_cast<double>(bin.rows())) + reg;
    for (Eigen::Index j = 0; j < d; ++j) c.mean(j) += config.jitter * std::sqrt(c.covariance(j, j)) * normal(rng);
  }

  EmResult result;
  Eigen::MatrixXd log_resp(n, K);
  std::uniform_int_distribution<Eigen::Index> pick_row(0, n - 1);
  for (int iter = 0;; ++iter) {
    // E-step
    for (int k = 0; k < K; ++k) {
      auto& c = model.components[k];
      if (!log_gaussian_rows(data, c.mean, c.covariance, log_resp.col(k))) {
        c.covariance = symmetrized(c.covariance) + reg;
        if (!log_gaussian_rows(data, c.mean, c.covariance, log_resp.col(k)))
          throw NumericError("component " + std::to_string(k) + " covariance lost positive definiteness");
      }
      log_resp.col(k).array() += std::log(c.weight);
    }
    const Eigen::VectorXd row_max = log_resp.rowwise().maxCoeff();
    const Eigen::VectorXd row_lse =
        row_max.array() + (log_resp.colwise() - row_max).array().exp().rowwise().sum().log();
    const double loglik = row_lse.sum();
    result.loglik_trace.push_back(loglik);
    result.iterations = iter;

    if (iter > 0) {
      const double gain = loglik - result.loglik_trace[result.loglik_trace.size() - 2];
      const bool just_restarted =
          !result.restart_iterations.empty() && result.restart_iterations.back() == iter - 1;
      if (!just_restarted && gain <= config.tol * std::abs(loglik)) {
        result.converged = true;
        break;
      }
    }
    if (iter >= config.max_iters) break;

    // M-step
    const Eigen::MatrixXd resp = (log_resp.colwise() - row_lse).array().exp().matrix();
    bool restarted = false;
    for (int k = 0; k < K; ++k) {
      auto& c = model.components[k];
      const double mass = resp.col(k).sum();
      if (!(mass > 1e-9 * static_cast<double>(n))) {
        c.mean = data.row(pick_row(rng)).transpose();
        c.covariance = global_cov;
        c.weight = 1.0 / K;
        restarted = true;
        continue;
      }
      c.weight = mass / static_cast<double>(n);
      c.mean = (data.transpose() * resp.col(k)) / mass;
      const Eigen::MatrixXd centered = data.rowwise() - c.mean.transpose();
      c.covariance =
          symmetrized(centered.transpose() * (centered.array().colwise() * resp.col(k).array()).matrix() / mass) +
          reg;
    }
    if (restarted) result.restart_iterations.push_back(iter);
    double total = 0.0;
    for (const auto& c : model.components) total += c.weight;
    for (auto& c : model.components) c.weight /= total;
  }
  result.model = std::move(model);
  return result;
}

EmResult fit_em(const DemoDataset& data, int K, const EmConfig& config) {
  data.validate(2);
  const DemoDataset aligned = align_demos(data);
  EmResult result = fit_em(aligned.to_matrix(), K, config, {0});
  result.model.axes = data.axes;
  return result;
}

double log_likelihood(const GaussianMixture& model, const Eigen::MatrixXd& data) {
  Eigen::MatrixXd lr(data.rows(), model.size());
  for (int k = 0; k < model.size(); ++k) {
    const auto& c = model.components[k];
    if (!log_gaussian_rows(data, c.mean, c.covariance, lr.col(k)))
      throw NumericError("component covariance is not positive definite");
    lr.col(k).array() += std::log(c.weight);
  }
  const Eigen::VectorXd mx = lr.rowwise().maxCoeff();
  return (mx.array() + (lr.colwise() - mx).array().exp().rowwise().sum().log()).sum();
}

GmrConditioner::GmrConditioner(const GaussianMixture& model) : model_(model) {
  model_.validate();
  if (model_.output_dims.empty()) throw DataError("mixture has no output dimensions");
  for (const auto& c : model_.components) {
    Conditional part;
    const Eigen::MatrixXd s_ii = select(c.covariance, model_.input_dims, model_.input_dims);
    const Eigen::MatrixXd s_oi = select(c.covariance, model_.output_dims, model_.input_dims);
    const Eigen::MatrixXd s_oo = select(c.covariance, model_.output_dims, model_.output_dims);
    Eigen::LLT<Eigen::MatrixXd> llt(s_ii);
    if (llt.info() != Eigen::Success) throw NumericError("input covariance block is not positive definite");
    part.in_cov_inv = llt.solve(Eigen::MatrixXd::Identity(s_ii.rows(), s_ii.cols()));
    part.gain = s_oi * part.in_cov_inv;
    part.cond_cov = symmetrized(s_oo - part.gain * s_oi.transpose());
    part.mu_in = select(c.mean, model_.input_dims);
    part.mu_out = select(c.mean, model_.output_dims);
    part.log_weight = std::log(c.weight);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    part.log_norm = -0.5 * (static_cast<double>(s_ii.rows()) * kLog2Pi + log_det);
    parts_.push_back(std::move(part));
  }
}

void GmrConditioner::condition(const Eigen::VectorXd& input, Eigen::VectorXd& mean, Eigen::MatrixXd* covariance,
                               Eigen::VectorXd& weights, bool& underflow) const {
  const std::size_t K = parts_.size();
  Eigen::VectorXd log_h(K);
  Eigen::VectorXd maha(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& p = parts_[k];
    const Eigen::VectorXd diff = input - p.mu_in;
    maha(k) = diff.dot(p.in_cov_inv * diff);
    log_h(k) = p.log_weight + p.log_norm - 0.5 * maha(k);
  }
  underflow = (log_h.array().exp() == 0.0).all();
  weights.resize(K);
  if (underflow) {
    Eigen::Index nearest = 0;
    maha.minCoeff(&nearest);
    weights.setZero();
    weights(nearest) = 1.0;
  } else {
    const double mx = log_h.maxCoeff();
    weights = (log_h.array() - mx).exp().matrix();
    weights /= weights.sum();
  }
  const Eigen::Index n_out = parts_.front().mu_out.size();
  mean = Eigen::VectorXd::Zero(n_out);
  Eigen::MatrixXd second;
  if (covariance) second = Eigen::MatrixXd::Zero(n_out, n_out);
  for (std::size_t k = 0; k < K; ++k) {
    if (weights(k) == 0.0) continue;
    const auto& p = parts_[k];
    const Eigen::VectorXd mk = p.mu_out + p.gain * (input - p.mu_in);
    mean += weights(k) * mk;
    if (covariance) second += weights(k) * (p.cond_cov + mk * mk.transpose());
  }
  if (covariance) *covariance = symmetrized(second - mean * mean.transpose());
}

ReferenceSample GmrConditioner::sample(double t, bool with_covariance) const {
  if (!std::isfinite(t)) throw DataError("GMR query time must be finite");
  const int m = model_.task_dim();
  if (static_cast<int>(model_.output_dims.size()) != 3 * m)
    throw DataError("mixture outputs do not match [x, xd, f] layout");
  ReferenceSample s;
  s.t = t;
  Eigen::VectorXd input(1);
  input(0) = t;
  Eigen::VectorXd mean;
  condition(input, mean, with_covariance ? &s.output_covariance : nullptr, s.mixing_weights, s.underflow);
  s.x_d = mean.segment(0, m);
  s.xdot_d = mean.segment(m, m);
  s.F_d = mean.segment(2 * m, m);
  const double slack = 1e-9 * (1.0 + std::abs(model_.input_max));
  s.extrapolated = t < model_.input_min - slack || t > model_.input_max + slack;
  return s;
}

ReferenceSample gmr_condition(const GaussianMixture& model, double t) { return GmrConditioner(model).sample(t); }

ReferenceTrajectory generate_reference(const GaussianMixture& model, std::span<const double> t_grid, double max_step,
                                       bool with_covariance) {
  if (t_grid.empty()) throw DataError("reference grid is empty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DataError("reference grid must be strictly increasing");
  const GmrConditioner gmr(model);
  ReferenceTrajectory out;
  out.samples.reserve(t_grid.size());
  for (double t : t_grid) {
    out.samples.push_back(gmr.sample(t, with_covariance));
    const auto& s = out.samples.back();
    out.extrapolated = out.extrapolated || s.extrapolated;
    if (out.samples.size() > 1) {
      const auto& prev = out.samples[out.samples.size() - 2];
      if ((s.x_d - prev.x_d).cwiseAbs().maxCoeff() > max_step) out.discontinuous = true;
    }
  }
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 >= t0)) throw DataError("invalid grid bounds");
  const auto n = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (long i = 0; i < n; ++i) grid[i] = t0 + static_cast<double>(i) * dt;
  return grid;
}

}  // namespace vic
