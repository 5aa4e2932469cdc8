#pragma once

#include <Eigen/Dense>

namespace vic {

// Joint-space quantities never exceed kMaxDof entries and task-space quantities
// never exceed kMaxTaskDim, so both live on the stack.
inline constexpr int kMaxDof = 8;
inline constexpr int kMaxTaskDim = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDof, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDof, kMaxDof>;
using TaskVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxTaskDim, 1>;
using TaskMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxTaskDim, kMaxTaskDim>;

}  // namespace vic
