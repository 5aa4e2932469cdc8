#include "vic/stiffness_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vic/errors.hpp"

namespace vic {

std::string to_string(InteractionModel model) {
  switch (model) {
    case InteractionModel::Simplified: return "simplified";
    case InteractionModel::NoInertiaShaping: return "no-inertia-shaping";
    case InteractionModel::InertiaShaping: return "inertia-shaping";
  }
  return "simplified";
}

InteractionModel interaction_model_from_string(const std::string& name) {
  if (name == "simplified") return InteractionModel::Simplified;
  if (name == "no-inertia-shaping") return InteractionModel::NoInertiaShaping;
  if (name == "inertia-shaping") return InteractionModel::InertiaShaping;
  throw ConfigError("unknown interaction model '" + name + "'");
}

AffineWrench interaction_coefficients(const InteractionInputs& in, InteractionModel model) {
  const auto m = in.x_tilde.size();
  if (in.xdot_tilde.size() != m || in.d.size() != m) throw DataError("interaction inputs: dimension mismatch");
  AffineWrench w;
  w.slope = in.x_tilde;
  w.offset = in.d.cwiseProduct(in.xdot_tilde);
  const bool use_mu = model != InteractionModel::InertiaShaping && in.mu.size() > 0;
  if (use_mu) {
    if (in.mu.rows() != m || in.mu.cols() != m) throw DataError("interaction inputs: mu has wrong size");
    w.offset += in.mu * in.xdot_tilde;
  }
  if (model != InteractionModel::Simplified) {
    if (in.xddot_tilde.size() != m || in.lambda.rows() != m || in.lambda.cols() != m)
      throw DataError("inertial interaction model needs acceleration and inertia");
    w.offset += in.lambda * in.xddot_tilde;
  }
  return w;
}

TaskVec interaction_wrench(const InteractionInputs& in, const TaskVec& k, InteractionModel model) {
  if (k.size() != in.x_tilde.size()) throw DataError("interaction_wrench: stiffness has wrong size");
  return interaction_coefficients(in, model)(k);
}

void StiffnessEnvelope::validate() const {
  const auto m = k_min.size();
  if (m < 1 || m > kMaxTaskDim || k_max.size() != m || f_max.size() != m)
    throw ConfigError("stiffness envelope vectors must share the task dimension");
  if (!(k_min.array() > 0.0).all() || !(k_min.array() <= k_max.array()).all())
    throw ConfigError("stiffness envelope needs 0 < k_min <= k_max");
  if (!(f_max.array() > 0.0).all()) throw ConfigError("f_max must be positive");
}

void QpWeights::validate(int dim) const {
  if (Q.size() != dim || R.size() != dim) throw ConfigError("Q and R must have the task dimension");
  if (!(Q.array() > 0.0).all() || !(R.array() > 0.0).all()) throw ConfigError("Q and R must be positive");
}

double StiffnessQp::objective(const TaskVec& k) const {
  const TaskVec e = wrench(k) - F_d;
  const TaskVec r = k - envelope.k_min;
  return 0.5 * ((weights.Q.array() * e.array().square()).sum() + (weights.R.array() * r.array().square()).sum());
}

double StiffnessQp::violation(const TaskVec& k) const {
  double v = 0.0;
  const TaskVec F = wrench(k);
  for (int j = 0; j < dim(); ++j) {
    v = std::max({v, envelope.k_min(j) - k(j), k(j) - envelope.k_max(j)});
    v = std::max({v, F(j) - envelope.f_max(j), -envelope.f_max(j) - F(j)});
  }
  if (tank) v = std::max(v, tank->c.dot(k) - tank->b);
  return v;
}

bool StiffnessQp::bounds(TaskVec& lo, TaskVec& hi) const {
  lo = envelope.k_min;
  hi = envelope.k_max;
  bool ok = true;
  for (int j = 0; j < dim(); ++j) {
    const double o = wrench.offset(j), s = wrench.slope(j), f = envelope.f_max(j);
    if (s == 0.0) {
      if (std::abs(o) > f) ok = false;
      continue;
    }
    double a = (-f - o) / s, b = (f - o) / s;
    if (s < 0.0) std::swap(a, b);
    lo(j) = std::max(lo(j), a);
    hi(j) = std::min(hi(j), b);
    if (lo(j) > hi(j)) ok = false;
  }
  return ok;
}

namespace {

enum class Bound { Free, Lower, Upper };

struct Candidate {
  TaskVec k;
  double objective;
  double nu;
  std::array<Bound, kMaxTaskDim> state;
  bool tank_active;
};

bool lex_less(const TaskVec& a, const TaskVec& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) < b(j)) return true;
    if (a(j) > b(j)) return false;
  }
  return false;
}

void fill_multipliers(const StiffnessQp& qp, const TaskVec& h, const TaskVec& g, const Candidate& c,
                      QpSolution& sol) {
  const int m = qp.dim();
  sol.lower_multiplier = TaskVec::Zero(m);
  sol.upper_multiplier = TaskVec::Zero(m);
  sol.tank_multiplier = c.tank_active ? c.nu : 0.0;
  for (int j = 0; j < m; ++j) {
    double grad = h(j) * c.k(j) - g(j);
    if (c.tank_active) grad += c.nu * qp.tank->c(j);
    if (c.state[j] == Bound::Lower) sol.lower_multiplier(j) = grad;
    if (c.state[j] == Bound::Upper) sol.upper_multiplier(j) = -grad;
  }
}

}  // namespace

QpSolution solve_stiffness_qp(const StiffnessQp& qp) {
  qp.envelope.validate();
  const int m = qp.dim();
  qp.weights.validate(m);
  if (qp.F_d.size() != m || qp.wrench.offset.size() != m || qp.wrench.slope.size() != m)
    throw DataError("stiffness QP: dimension mismatch");
  if (qp.tank && qp.tank->c.size() != m) throw DataError("stiffness QP: tank constraint has wrong size");

  QpSolution sol;
  TaskVec lo, hi;
  auto fallback = [&] {
    sol.k = qp.envelope.k_min;
    sol.objective = qp.objective(sol.k);
    sol.infeasible = true;
    sol.lower_multiplier = TaskVec::Zero(m);
    sol.upper_multiplier = TaskVec::Zero(m);
    return sol;
  };
  if (!qp.bounds(lo, hi)) return fallback();

  // gradient of the objective along axis j is h_j k_j - g_j
  const TaskVec s = qp.wrench.slope;
  const TaskVec h = (qp.weights.Q.array() * s.array().square() + qp.weights.R.array()).matrix();
  const TaskVec g = (qp.weights.Q.array() * s.array() * (qp.F_d - qp.wrench.offset).array() +
                     qp.weights.R.array() * qp.envelope.k_min.array())
                        .matrix();

  const double box_tol = 1e-12;
  auto in_box = [&](int j, double v) { return v >= lo(j) - box_tol * (1.0 + std::abs(lo(j))) &&
                                              v <= hi(j) + box_tol * (1.0 + std::abs(hi(j))); };

  std::optional<Candidate> best;
  auto consider = [&](Candidate c) {
    for (int j = 0; j < m; ++j) c.k(j) = std::clamp(c.k(j), lo(j), hi(j));
    if (qp.tank && qp.tank->c.dot(c.k) - qp.tank->b > 1e-12 * (1.0 + std::abs(qp.tank->b))) return;
    c.objective = qp.objective(c.k);
    if (!best) {
      best = c;
      return;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best->objective));
    if (c.objective < best->objective - tie || (std::abs(c.objective - best->objective) <= tie && lex_less(c.k, best->k)))
      best = c;
  };

  int n_states = 1;
  for (int j = 0; j < m; ++j) n_states *= 3;
  for (int code = 0; code < n_states; ++code) {
    Candidate c{TaskVec::Zero(m), 0.0, 0.0, {}, false};
    int rest = code;
    for (int j = 0; j < m; ++j, rest /= 3) c.state[j] = static_cast<Bound>(rest % 3);

    bool ok = true;
    for (int j = 0; j < m && ok; ++j) {
      if (c.state[j] == Bound::Lower) c.k(j) = lo(j);
      else if (c.state[j] == Bound::Upper) c.k(j) = hi(j);
      else {
        c.k(j) = g(j) / h(j);
        ok = in_box(j, c.k(j));
      }
    }
    if (ok) consider(c);

    if (!qp.tank) continue;
    const auto& con = *qp.tank;
    double denom = 0.0, num = -con.b;
    for (int j = 0; j < m; ++j) {
      if (c.state[j] == Bound::Free) {
        denom += con.c(j) * con.c(j) / h(j);
        num += con.c(j) * g(j) / h(j);
      } else {
        num += con.c(j) * (c.state[j] == Bound::Lower ? lo(j) : hi(j));
      }
    }
    if (!(denom > 0.0)) continue;
    Candidate a = c;
    a.tank_active = true;
    a.nu = num / denom;
    ok = true;
    for (int j = 0; j < m && ok; ++j) {
      if (a.state[j] == Bound::Lower) a.k(j) = lo(j);
      else if (a.state[j] == Bound::Upper) a.k(j) = hi(j);
      else {
        a.k(j) = (g(j) - a.nu * con.c(j)) / h(j);
        ok = in_box(j, a.k(j));
      }
    }
    if (ok) consider(a);
  }
  if (!best) return fallback();

  sol.k = best->k;
  sol.objective = best->objective;
  sol.tank_active = best->tank_active;
  fill_multipliers(qp, h, g, *best, sol);
  return sol;
}

double kkt_residual(const StiffnessQp& qp, const QpSolution& sol) {
  const int m = qp.dim();
  TaskVec lo, hi;
  if (!qp.bounds(lo, hi)) return std::numeric_limits<double>::infinity();
  const TaskVec s = qp.wrench.slope;
  double r = qp.violation(sol.k);
  const double nu = sol.tank_multiplier;
  r = std::max(r, -nu);
  if (qp.tank) r = std::max(r, std::abs(nu * (qp.tank->c.dot(sol.k) - qp.tank->b)));
  for (int j = 0; j < m; ++j) {
    const double grad = qp.weights.Q(j) * s(j) * (qp.wrench(sol.k)(j) - qp.F_d(j)) +
                        qp.weights.R(j) * (sol.k(j) - qp.envelope.k_min(j));
    double stat = grad - sol.lower_multiplier(j) + sol.upper_multiplier(j);
    if (qp.tank) stat += nu * qp.tank->c(j);
    const double scale = 1.0 + std::abs(grad);
    r = std::max(r, std::abs(stat) / scale);
    r = std::max({r, -sol.lower_multiplier(j), -sol.upper_multiplier(j)});
    r = std::max(r, std::abs(sol.lower_multiplier(j) * (sol.k(j) - lo(j))));
    r = std::max(r, std::abs(sol.upper_multiplier(j) * (hi(j) - sol.k(j))));
    r = std::max(r, std::max(lo(j) - sol.k(j), sol.k(j) - hi(j)));
  }
  return r;
}

}  // namespace vic
