#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "tplearn/kinematics.hpp"
#include "tplearn/tpgmm.hpp"

namespace tpl {

struct ObjectPose {
  Eigen::VectorXd position;  // 2 (planar) or 3 (spatial)
  double angle = 0.0;        // planar
  Quat orientation;          // spatial

  Eigen::MatrixXd rotation() const;  // 2x2 or 3x3
};

// Robot state at one timestep, everything a projection-operator builder
// needs. `kind` names the task space of the operator's mean. For the plain
// operators `jacobian` carries that task's rows; for the null-space variants
// `jacobian` is the higher-priority task (any row count) and
// `jacobian_secondary` is the projected task whose rows match `kind`.
struct RobotContext {
  bool planar = true;
  JacobianKind kind = JacobianKind::kPosition;
  Eigen::VectorXd q_prev;
  Eigen::VectorXd x_prev;            // end-effector position at t-1
  double angle_prev = 0.0;           // planar orientation at t-1
  Quat eps_prev;                     // spatial orientation at t-1
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd jacobian_secondary;
  std::optional<ObjectPose> object;
  double dt = 0.01;
  double damping = 0.0;
};

// Candidate projection operators mapping constraints onto configuration
// space. Each returns a TaskFrame whose output dimension is Nq; applied to a
// mean, every operator is one differential-IK integration step, and each has
// the current pose as fixed point.
TaskFrame op_configuration(int nq);
TaskFrame op_absolute_pose(const RobotContext& ctx);
TaskFrame op_relative_pose(const RobotContext& ctx);
TaskFrame op_nullspace_configuration(const RobotContext& ctx);
TaskFrame op_nullspace_absolute(const RobotContext& ctx);
TaskFrame op_nullspace_relative(const RobotContext& ctx);

// Labels used by experiment configs: config, abs_pose, rel_pose, null_config,
// null_abs, null_rel. Throws std::invalid_argument for unknown labels.
TaskFrame operator_by_label(const std::string& label, const RobotContext& ctx, int nq);

}  // namespace tpl
