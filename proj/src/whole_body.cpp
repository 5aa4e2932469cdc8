#include "vic/whole_body.hpp"

#include <cmath>

#include "vic/errors.hpp"

namespace vic {

namespace {

using P2 = Eigen::Vector2d;

// rotation by +90 deg in the (x, z) plane: d/dphi of (cos phi, sin phi)
inline P2 rot90(const P2& v) { return {-v.y(), v.x()}; }

struct PlanarChain {
  std::vector<P2> joint;  // joint[i]: origin of arm joint i; joint[n_a]: end effector
  std::vector<P2> com;
};

PlanarChain planar_chain(const RobotModel& model, const Vec& q) {
  const int na = model.n_a();
  PlanarChain c;
  c.joint.resize(na + 1);
  c.com.resize(na);
  c.joint[0] = P2(model.n_b > 0 ? q(0) : 0.0, model.mount_height);
  double phi = 0.0;
  for (int i = 0; i < na; ++i) {
    phi += q(model.n_b + i);
    const P2 dir(std::cos(phi), std::sin(phi));
    const auto& link = model.links[i];
    c.com[i] = c.joint[i] + link.com_fraction * link.length * dir;
    c.joint[i + 1] = c.joint[i] + link.length * dir;
  }
  return c;
}

void check_sizes(const RobotModel& model, const Vec& q) {
  if (q.size() != model.dof()) throw DataError("joint vector has wrong size");
}

double condition_number(const TaskMat& sym, double& min_eig) {
  Eigen::SelfAdjointEigenSolver<TaskMat> eig(sym, Eigen::EigenvaluesOnly);
  min_eig = eig.eigenvalues().minCoeff();
  const double max_eig = eig.eigenvalues().maxCoeff();
  if (!(min_eig > 0.0)) return std::numeric_limits<double>::infinity();
  return max_eig / min_eig;
}

}  // namespace

std::string to_string(PlantKind kind) { return kind == PlantKind::PlanarXZ ? "planar-xz" : "point-3d"; }

PlantKind plant_kind_from_string(const std::string& name) {
  if (name == "planar-xz") return PlantKind::PlanarXZ;
  if (name == "point-3d") return PlantKind::Point3D;
  throw ConfigError("unknown plant '" + name + "' (expected planar-xz or point-3d)");
}

std::string to_string(MotionMode mode) { return mode == MotionMode::Locomotion ? "locomotion" : "manipulation"; }

int RobotModel::n_a() const { return kind == PlantKind::PlanarXZ ? static_cast<int>(links.size()) : 3; }

int RobotModel::task_dim() const { return kind == PlantKind::PlanarXZ ? 2 : 3; }

std::vector<std::string> RobotModel::axes() const {
  if (kind == PlantKind::PlanarXZ) return {"x", "z"};
  return {"x", "y", "z"};
}

void RobotModel::validate() const {
  if (kind == PlantKind::PlanarXZ) {
    if (n_b < 0 || n_b > 1) throw ConfigError("planar plant supports at most one (prismatic x) base DoF");
    if (links.empty() || dof() > kMaxDof) throw ConfigError("planar plant needs 1..7 links");
    if (base_inertia.size() != n_b || base_damping.size() != n_b)
      throw ConfigError("base inertia/damping must have n_b entries");
    for (Eigen::Index i = 0; i < n_b; ++i)
      if (!(base_inertia(i) > 0.0) || !(base_damping(i) > 0.0))
        throw ConfigError("base virtual inertia and damping must be positive");
    for (const auto& l : links)
      if (!(l.length >= 0.0) || !(l.mass > 0.0) || !(l.inertia > 0.0) || l.com_fraction < 0.0 ||
          l.com_fraction > 1.0)
        throw ConfigError("link parameters must be positive");
  } else {
    if (n_b != 0) throw ConfigError("point plant has no base");
    if (point_inertia.size() != 3 || !(point_inertia.array() > 0.0).all())
      throw ConfigError("point plant needs a positive 3-axis inertia");
  }
}

RobotModel RobotModel::planar_xz() {
  RobotModel m;
  m.kind = PlantKind::PlanarXZ;
  m.n_b = 1;
  m.base_inertia = Vec::Constant(1, 25.0);
  m.base_damping = Vec::Constant(1, 15.0);
  m.links = {{0.40, 3.0, 0.04, 0.5}, {0.35, 2.0, 0.02, 0.5}, {0.12, 0.8, 0.002, 0.5}};
  m.mount_height = 0.35;
  return m;
}

RobotModel RobotModel::point_3d() {
  RobotModel m;
  m.kind = PlantKind::Point3D;
  m.n_b = 0;
  m.base_inertia.resize(0);
  m.base_damping.resize(0);
  m.point_inertia = TaskVec::Constant(3, 3.0);
  return m;
}

RobotState make_state(const RobotModel& model, const Vec& q, const Vec& qdot) {
  check_sizes(model, q);
  if (qdot.size() != q.size()) throw DataError("velocity vector has wrong size");
  RobotState s;
  s.q = q;
  s.qdot = qdot;
  s.x = forward_kinematics(model, q);
  s.xdot = task_jacobian(model, q) * qdot;
  return s;
}

TaskVec forward_kinematics(const RobotModel& model, const Vec& q) {
  check_sizes(model, q);
  if (model.kind == PlantKind::Point3D) return q;
  const auto chain = planar_chain(model, q);
  TaskVec x(2);
  x << chain.joint.back().x(), chain.joint.back().y();
  return x;
}

Mat task_jacobian(const RobotModel& model, const Vec& q) {
  check_sizes(model, q);
  const int n = model.dof();
  if (model.kind == PlantKind::Point3D) return Mat::Identity(3, 3);
  const auto chain = planar_chain(model, q);
  Mat J = Mat::Zero(2, n);
  if (model.n_b > 0) J(0, 0) = 1.0;
  const P2& ee = chain.joint.back();
  for (int j = 0; j < model.n_a(); ++j) J.col(model.n_b + j) = rot90(ee - chain.joint[j]);
  return J;
}

Mat task_jacobian_derivative(const RobotModel& model, const Vec& q, const Vec& qdot) {
  check_sizes(model, q);
  const int n = model.dof();
  if (model.kind == PlantKind::Point3D) return Mat::Zero(3, 3);
  const auto chain = planar_chain(model, q);
  const int na = model.n_a();
  Mat Jd = Mat::Zero(2, n);
  const P2& ee = chain.joint.back();
  for (int j = 0; j < na; ++j) {
    P2 col = P2::Zero();
    for (int k = 0; k < na; ++k) col -= (ee - chain.joint[std::max(j, k)]) * qdot(model.n_b + k);
    Jd.col(model.n_b + j) = col;
  }
  return Jd;
}

Mat mass_matrix(const RobotModel& model, const Vec& q) {
  check_sizes(model, q);
  const int n = model.dof();
  if (model.kind == PlantKind::Point3D) return model.point_inertia.asDiagonal().toDenseMatrix();
  Mat M = Mat::Zero(n, n);
  for (int i = 0; i < model.n_b; ++i) M(i, i) = model.base_inertia(i);
  const auto chain = planar_chain(model, q);
  const int na = model.n_a();
  const int nb = model.n_b;
  for (int i = 0; i < na; ++i) {
    const auto& link = model.links[i];
    Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxDof> Jc = Eigen::MatrixXd::Zero(2, na);
    for (int j = 0; j <= i; ++j) Jc.col(j) = rot90(chain.com[i] - chain.joint[j]);
    M.block(nb, nb, na, na) += link.mass * Jc.transpose() * Jc;
    M.block(nb, nb, i + 1, i + 1).array() += link.inertia;
  }
  return 0.5 * (M + M.transpose());
}

Mat mass_matrix_partial(const RobotModel& model, const Vec& q, int k) {
  check_sizes(model, q);
  const int n = model.dof();
  Mat dM = Mat::Zero(n, n);
  if (model.kind == PlantKind::Point3D || k < model.n_b) return dM;
  const int nb = model.n_b;
  const int na = model.n_a();
  const int ka = k - nb;
  const auto chain = planar_chain(model, q);
  for (int i = ka; i < na; ++i) {
    const auto& link = model.links[i];
    Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxDof> Jc = Eigen::MatrixXd::Zero(2, na);
    Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, kMaxDof> dJc = Eigen::MatrixXd::Zero(2, na);
    for (int j = 0; j <= i; ++j) {
      Jc.col(j) = rot90(chain.com[i] - chain.joint[j]);
      dJc.col(j) = -(chain.com[i] - chain.joint[std::max(j, ka)]);
    }
    const Mat term = link.mass * (dJc.transpose() * Jc);
    dM.block(nb, nb, na, na) += term + term.transpose();
  }
  return dM;
}

Mat coriolis_matrix(const RobotModel& model, const Vec& q, const Vec& qdot) {
  check_sizes(model, q);
  const int n = model.dof();
  Mat C = Mat::Zero(n, n);
  if (model.kind == PlantKind::Point3D) return C;
  for (int i = 0; i < model.n_b; ++i) C(i, i) = model.base_damping(i);
  std::vector<Mat> dM(n);
  for (int k = 0; k < n; ++k) dM[k] = mass_matrix_partial(model, q, k);
  for (int i = model.n_b; i < n; ++i)
    for (int j = model.n_b; j < n; ++j) {
      double cij = 0.0;
      for (int k = model.n_b; k < n; ++k) cij += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qdot(k);
      C(i, j) = cij;
    }
  return C;
}

Vec gravity_torque(const RobotModel& model, const Vec& q) {
  check_sizes(model, q);
  const int n = model.dof();
  Vec g = Vec::Zero(n);
  if (model.kind == PlantKind::Point3D) return g;
  const auto chain = planar_chain(model, q);
  for (int j = 0; j < model.n_a(); ++j)
    for (int i = j; i < model.n_a(); ++i)
      g(model.n_b + j) += model.links[i].mass * model.gravity * (chain.com[i] - chain.joint[j]).x();
  return g;
}

DynamicsTerms dynamics_terms(const RobotModel& model, const RobotState& state) {
  DynamicsTerms d;
  d.M = mass_matrix(model, state.q);
  d.c = coriolis_matrix(model, state.q, state.qdot) * state.qdot;
  d.g = gravity_torque(model, state.q);
  return d;
}

TaskMat cartesian_inertia(const Mat& M, const Mat& J, double cond_max) {
  const Mat Minv_Jt = M.ldlt().solve(J.transpose());
  TaskMat X = J * Minv_Jt;
  X = 0.5 * (X + X.transpose()).eval();
  double min_eig = 0.0;
  const double cond = condition_number(X, min_eig);
  if (!(cond <= cond_max))
    throw NearSingularJacobian("J M^-1 J^T condition number " + std::to_string(cond) + " exceeds limit");
  TaskMat L = X.ldlt().solve(TaskMat::Identity(X.rows(), X.cols()));
  return 0.5 * (L + L.transpose());
}

TaskVec impedance_wrench(const TaskVec& x, const TaskVec& xdot, const TaskVec& x_d, const TaskVec& K,
                         const TaskVec& D) {
  if (x.size() != x_d.size() || x.size() != xdot.size() || K.size() != x.size() || D.size() != x.size())
    throw DataError("impedance_wrench: dimension mismatch");
  return K.cwiseProduct(x_d - x) - D.cwiseProduct(xdot);
}

Mat weighting_matrix(const Mat& H, const Mat& M) {
  const Mat W = H.transpose() * M.ldlt().solve(H);
  return 0.5 * (W + W.transpose());
}

Vec weighted_inverse_dynamics(const Mat& M, const Mat& J, const TaskMat& Lambda, const Mat& W, const TaskVec& F,
                              const Vec& tau0, double cond_max) {
  const Eigen::Index n = M.rows();
  if (J.cols() != n || tau0.size() != n || J.rows() != F.size() || Lambda.rows() != F.size())
    throw DataError("weighted_inverse_dynamics: dimension mismatch");
  const Mat A = M.ldlt().solve(J.transpose());  // M^-1 J^T
  const Mat B = W.ldlt().solve(A);               // W^-1 M^-1 J^T
  TaskMat Xw = A.transpose() * B;                // J M^-1 W^-1 M^-1 J^T
  Xw = 0.5 * (Xw + Xw.transpose()).eval();
  double min_eig = 0.0;
  const double cond = condition_number(Xw, min_eig);
  if (!(cond <= cond_max))
    throw NearSingularWeightedInertia("weighted Cartesian inertia condition number " + std::to_string(cond) +
                                      " exceeds limit");
  const TaskVec lambda_inv_F = Lambda.ldlt().solve(F);
  const TaskVec task_tau0 = A.transpose() * tau0;  // J M^-1 tau0
  const TaskVec rhs = Xw.ldlt().solve(lambda_inv_F - task_tau0);
  return tau0 + B * rhs;
}

TaskMat cartesian_coriolis(const RobotModel& model, const RobotState& state) {
  const Mat M = mass_matrix(model, state.q);
  const Mat J = task_jacobian(model, state.q);
  const TaskMat Lambda = cartesian_inertia(M, J);
  Mat C = coriolis_matrix(model, state.q, state.qdot);
  // Base damping is a dissipative element, not a Coriolis effect.
  for (int i = 0; i < model.n_b; ++i) C(i, i) = 0.0;
  const Mat Jd = task_jacobian_derivative(model, state.q, state.qdot);
  const Mat Minv = M.ldlt().solve(Mat::Identity(M.rows(), M.cols()));
  const Mat Jbar = Minv * J.transpose() * Lambda;
  return Lambda * (J * Minv * C - Jd) * Jbar;
}

Vec secondary_task(const Vec& q, const Vec& qdot, const PostureGains& gains) {
  if (gains.K0.size() != q.size() || gains.D0.size() != q.size() || gains.q0.size() != q.size())
    throw DataError("secondary_task: dimension mismatch");
  return -gains.D0.cwiseProduct(qdot) - gains.K0.cwiseProduct(q - gains.q0);
}

Vec nominal_configuration(const RobotModel& model) {
  if (model.kind == PlantKind::Point3D) return Vec::Zero(3);
  Vec q = Vec::Zero(model.dof());
  const double pattern[] = {0.3, -1.4, -0.6};
  for (int i = 0; i < model.n_a(); ++i) q(model.n_b + i) = pattern[std::min(i, 2)];
  return q;
}

Vec inverse_kinematics(const RobotModel& model, const TaskVec& x_target, const Vec& q_seed) {
  check_sizes(model, q_seed);
  if (x_target.size() != model.task_dim()) throw DataError("IK target has wrong dimension");
  if (model.kind == PlantKind::Point3D) return x_target;
  Vec q = q_seed;
  const int n = model.dof();
  constexpr double damping = 1e-3;
  // damped steps with a weak null-space pull toward the seed, then plain Newton polish
  for (int iter = 0; iter < 300; ++iter) {
    const bool polish = iter >= 200;
    const TaskVec err = x_target - forward_kinematics(model, q);
    const Mat J = task_jacobian(model, q);
    const double lambda2 = polish ? 0.0 : damping * damping;
    const TaskMat JJt = J * J.transpose() + lambda2 * TaskMat::Identity(J.rows(), J.rows());
    const Mat pinv = J.transpose() * JJt.ldlt().solve(TaskMat::Identity(J.rows(), J.rows()));
    Vec step = pinv * err;
    if (!polish) step += 0.1 * (Mat::Identity(n, n) - pinv * J) * (q_seed - q);
    q += step;
    if (polish && err.norm() < 1e-13) break;
  }
  if ((x_target - forward_kinematics(model, q)).norm() > 1e-8)
    throw NumericError("inverse kinematics did not converge");
  return q;
}

RobotState integrate(const RobotModel& model, const RobotState& state, const Vec& tau, const Vec& tau_ext,
                     double dt) {
  const DynamicsTerms d = dynamics_terms(model, state);
  const Vec qdd = d.M.ldlt().solve(tau + tau_ext - d.c - d.g);
  const Vec qdot = state.qdot + dt * qdd;
  const Vec q = state.q + dt * qdot;
  return make_state(model, q, qdot);
}

WholeBodyGains WholeBodyGains::defaults(const RobotModel& model) {
  const int n = model.dof();
  const int nb = model.n_b;
  auto make = [&](double h_base, double h_arm, double k0, double d0) {
    ModeGains g;
    g.H = Vec::Constant(n, h_arm);
    g.H.head(nb).setConstant(h_base);
    g.K0 = Vec::Constant(n, k0);
    g.D0 = Vec::Constant(n, d0);
    return g;
  };
  WholeBodyGains gains;
  gains.locomotion = make(2.0, 10.0, 50.0, 10.0);
  gains.manipulation = make(10.0, 2.0, 2.0, 4.0);
  return gains;
}

WholeBodyController::WholeBodyController(RobotModel model, WholeBodyGains gains, double cond_max)
    : model_(std::move(model)), gains_(std::move(gains)), cond_max_(cond_max) {
  model_.validate();
  const int n = model_.dof();
  for (const auto* g : {&gains_.locomotion, &gains_.manipulation})
    if (g->H.size() != n || g->K0.size() != n || g->D0.size() != n)
      throw ConfigError("controller gain vectors must have one entry per joint");
  q0_ = nominal_configuration(model_);
  held_base_tau_ = Vec::Zero(model_.n_b);
}

void WholeBodyController::reset(MotionMode mode, const Vec& q_now) {
  mode_ = mode;
  q0_ = q_now;
  held_base_tau_ = Vec::Zero(model_.n_b);
  has_history_ = false;
}

void WholeBodyController::set_mode(MotionMode mode, const Vec& q_now) {
  if (mode == mode_) return;
  mode_ = mode;
  q0_ = q_now;
}

WholeBodyController::Output WholeBodyController::compute(const RobotState& state, const TaskVec& F,
                                                         bool refresh_base) {
  Output out;
  const DynamicsTerms d = dynamics_terms(model_, state);
  const Mat J = task_jacobian(model_, state.q);
  const ModeGains& g = gains_[mode_];
  TaskMat Lambda;
  try {
    Lambda = cartesian_inertia(d.M, J, cond_max_);
    last_lambda_ = Lambda;
  } catch (const NearSingularJacobian&) {
    out.near_singular = true;
    if (!has_history_) throw;
    Lambda = last_lambda_;
  }
  const Mat W = weighting_matrix(g.H.asDiagonal().toDenseMatrix(), d.M);
  const Vec tau0 = secondary_task(state.q, state.qdot, {g.K0, g.D0, q0_});
  Vec tau;
  try {
    tau = weighted_inverse_dynamics(d.M, J, Lambda, W, F, tau0, cond_max_);
  } catch (const NearSingularWeightedInertia&) {
    out.near_singular = true;
    if (!has_history_) throw;
    tau = last_tau_;
  }
  last_tau_ = tau;
  has_history_ = true;
  tau += d.g;
  if (refresh_base)
    held_base_tau_ = tau.head(model_.n_b);
  else
    tau.head(model_.n_b) = held_base_tau_;
  out.tau = tau;
  return out;
}

}  // namespace vic
