#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "vic/energy_tank.hpp"
#include "vic/stiffness_qp.hpp"

namespace vic::oracle {

// Brute force: a uniform grid over the box, then a feasible pattern search from the best node.
struct OracleResult {
  TaskVec k;
  double objective = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

inline int oracle_nodes(int dim, double width) {
  switch (dim) {
    case 1: return std::max(2, static_cast<int>(std::ceil(width / 0.5)) + 1);
    case 2: return std::max(2, static_cast<int>(std::ceil(width / 2.0)) + 1);
    default: return std::max(2, static_cast<int>(std::ceil(width / 10.0)) + 1);
  }
}

inline OracleResult qp_oracle(const StiffnessQp& qp, double tol = 1e-10) {
  OracleResult best;
  TaskVec lo, hi;
  if (!qp.bounds(lo, hi)) return best;
  const int m = qp.dim();
  std::vector<int> nodes(m);
  for (int j = 0; j < m; ++j) nodes[j] = oracle_nodes(m, hi(j) - lo(j));
  std::vector<int> idx(m, 0);
  TaskVec k(m);
  while (true) {
    for (int j = 0; j < m; ++j)
      k(j) = nodes[j] == 1 ? lo(j) : lo(j) + (hi(j) - lo(j)) * idx[j] / (nodes[j] - 1);
    if (qp.violation(k) <= tol) {
      const double f = qp.objective(k);
      if (f < best.objective) {
        best.objective = f;
        best.k = k;
        best.feasible = true;
      }
    }
    int j = 0;
    while (j < m && ++idx[j] == nodes[j]) idx[j++] = 0;
    if (j == m) break;
  }
  if (!best.feasible) return best;

  std::vector<TaskVec> dirs;
  for (int i = 0; i < m; ++i) {
    TaskVec e = TaskVec::Zero(m);
    e(i) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
    for (int j = i + 1; j < m; ++j)
      for (double s : {1.0, -1.0}) {
        TaskVec v = TaskVec::Zero(m);
        v(i) = 1.0;
        v(j) = s;
        dirs.push_back(v);
        dirs.push_back(-v);
      }
  }
  double step = 0.0;
  for (int j = 0; j < m; ++j) step = std::max(step, (hi(j) - lo(j)) / std::max(1, nodes[j] - 1));
  step = std::max(step, 1e-3);
  while (step > 1e-10) {
    bool moved = false;
    for (const auto& d : dirs) {
      const TaskVec trial = (best.k + step * d).cwiseMax(lo).cwiseMin(hi);
      if (qp.violation(trial) > tol) continue;
      const double f = qp.objective(trial);
      if (f < best.objective) {
        best.objective = f;
        best.k = trial;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

// Seeded random instances with a non-empty feasible set containing k_min's neighbourhood.
inline StiffnessQp random_qp(std::mt19937_64& rng, int m, bool with_tank) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double a, double b) { return a + (b - a) * u(rng); };
  while (true) {
    StiffnessQp qp;
    qp.envelope.k_min = TaskVec(m);
    qp.envelope.k_max = TaskVec(m);
    qp.envelope.f_max = TaskVec(m);
    qp.weights.Q = TaskVec(m);
    qp.weights.R = TaskVec(m);
    qp.F_d = TaskVec(m);
    InteractionInputs in;
    in.x_tilde = TaskVec(m);
    in.xdot_tilde = TaskVec(m);
    for (int j = 0; j < m; ++j) {
      qp.envelope.k_min(j) = range(50.0, 400.0);
      qp.envelope.k_max(j) = qp.envelope.k_min(j) + range(100.0, 900.0);
      qp.envelope.f_max(j) = range(20.0, 100.0);
      qp.weights.Q(j) = range(100.0, 5000.0);
      qp.weights.R(j) = range(0.1, 10.0);
      qp.F_d(j) = range(-30.0, 30.0);
      in.x_tilde(j) = range(-0.05, 0.05);
      in.xdot_tilde(j) = range(-0.2, 0.2);
    }
    in.d = damping_from_stiffness(qp.envelope.k_min);
    if (with_tank) {
      // mostly releasing springs so the energy constraint actually bites
      if (u(rng) < 0.7)
        for (int j = 0; j < m; ++j) {
          in.xdot_tilde(j) = -std::copysign(std::abs(in.xdot_tilde(j)), in.x_tilde(j));
          qp.F_d(j) = std::copysign(std::abs(qp.F_d(j)), in.x_tilde(j));
        }
      TankState tank;
      tank.energy = range(0.4001, 0.6);
      qp.tank = tank_constraint(tank, in.x_tilde, in.xdot_tilde, in.d, qp.envelope.k_min, range(0.01, 1.0), 1e-9);
    }
    qp.wrench = interaction_coefficients(in);
    TaskVec lo, hi;
    if (!qp.bounds(lo, hi)) continue;
    if (qp.violation(lo) > 0.0) continue;
    return qp;
  }
}

}  // namespace vic::oracle
