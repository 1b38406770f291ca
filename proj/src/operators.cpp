#include "tplearn/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace tpl {

namespace {

// Block mapping a frame-local mean onto one task-space displacement, plus the
// offset of the current state inside the task block. For quaternions the
// offset is zero because H_bar_star(conj(eps_prev)) annihilates eps_prev.
struct TaskBlock {
  Eigen::MatrixXd map;     // rows = task dim, cols = mean dim
  Eigen::VectorXd offset;  // rows = task dim
};

TaskBlock make_block(const RobotContext& ctx, bool relative) {
  const ObjectPose* obj = ctx.object ? &*ctx.object : nullptr;
  if (relative && !obj) {
    throw std::invalid_argument("projection operator: object pose required");
  }

  auto position_block = [&]() {
    TaskBlock blk;
    const int d = static_cast<int>(ctx.x_prev.size());
    blk.map = relative ? obj->rotation() : Eigen::MatrixXd::Identity(d, d);
    blk.offset = relative ? Eigen::VectorXd(obj->position - ctx.x_prev)
                          : Eigen::VectorXd(-ctx.x_prev);
    return blk;
  };

  auto orientation_block = [&]() {
    TaskBlock blk;
    if (ctx.planar) {
      blk.map = Eigen::MatrixXd::Identity(1, 1);
      Eigen::VectorXd off(1);
      off(0) = relative ? obj->angle - ctx.angle_prev : -ctx.angle_prev;
      blk.offset = off;
    } else {
      Eigen::MatrixXd m = hamilton_bar_star(ctx.eps_prev.conjugate());
      if (relative) {
        m = m * hamilton_plus(obj->orientation);
      }
      blk.map = m;
      blk.offset = Eigen::VectorXd::Zero(3);
    }
    return blk;
  };

  switch (ctx.kind) {
    case JacobianKind::kPosition:
      return position_block();
    case JacobianKind::kOrientation:
      return orientation_block();
    case JacobianKind::kPose: {
      const TaskBlock p = position_block();
      const TaskBlock o = orientation_block();
      TaskBlock blk;
      blk.map = Eigen::MatrixXd::Zero(p.map.rows() + o.map.rows(),
                                      p.map.cols() + o.map.cols());
      blk.map.topLeftCorner(p.map.rows(), p.map.cols()) = p.map;
      blk.map.bottomRightCorner(o.map.rows(), o.map.cols()) = o.map;
      blk.offset.resize(p.offset.size() + o.offset.size());
      blk.offset << p.offset, o.offset;
      return blk;
    }
  }
  throw std::invalid_argument("projection operator: unknown jacobian kind");
}

TaskFrame ik_step_frame(const RobotContext& ctx, bool relative, bool nullspace,
                        const std::string& label) {
  const Eigen::MatrixXd& J = ctx.jacobian;
  if (J.size() == 0 || J.cols() != ctx.q_prev.size()) {
    throw std::invalid_argument("projection operator: jacobian/context mismatch");
  }
  Eigen::MatrixXd lhs;  // maps task displacement to joint displacement
  if (nullspace) {
    const Eigen::MatrixXd& Jt = ctx.jacobian_secondary;
    if (Jt.size() == 0 || Jt.cols() != ctx.q_prev.size()) {
      throw std::invalid_argument("projection operator: secondary jacobian required");
    }
    lhs = nullspace_projector(J, ctx.damping) * pseudoinverse(Jt, ctx.damping);
  } else {
    lhs = pseudoinverse(J, ctx.damping);
  }
  const TaskBlock blk = make_block(ctx, relative);
  if (lhs.cols() != blk.map.rows()) {
    throw std::invalid_argument("projection operator: jacobian rows do not match kind");
  }
  TaskFrame frame;
  frame.A = lhs * blk.map;
  frame.b = lhs * blk.offset + ctx.q_prev;
  frame.label = label;
  return frame;
}

}  // namespace

Eigen::MatrixXd ObjectPose::rotation() const {
  if (position.size() == 2) {
    Eigen::Matrix2d R;
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return R;
  }
  return orientation.rotation_matrix();
}

TaskFrame op_configuration(int nq) {
  TaskFrame frame;
  frame.A = Eigen::MatrixXd::Identity(nq, nq);
  frame.b = Eigen::VectorXd::Zero(nq);
  frame.label = "config";
  return frame;
}

TaskFrame op_absolute_pose(const RobotContext& ctx) {
  return ik_step_frame(ctx, false, false, "abs_pose");
}

TaskFrame op_relative_pose(const RobotContext& ctx) {
  return ik_step_frame(ctx, true, false, "rel_pose");
}

TaskFrame op_nullspace_configuration(const RobotContext& ctx) {
  const Eigen::MatrixXd& J = ctx.jacobian;
  if (J.size() == 0 || J.cols() != ctx.q_prev.size()) {
    throw std::invalid_argument("projection operator: jacobian/context mismatch");
  }
  const Eigen::MatrixXd Jpinv = pseudoinverse(J, ctx.damping);
  TaskFrame frame;
  frame.A = Eigen::MatrixXd::Identity(J.cols(), J.cols()) - Jpinv * J;
  frame.b = Jpinv * J * ctx.q_prev;
  frame.label = "null_config";
  return frame;
}

TaskFrame op_nullspace_absolute(const RobotContext& ctx) {
  return ik_step_frame(ctx, false, true, "null_abs");
}

TaskFrame op_nullspace_relative(const RobotContext& ctx) {
  return ik_step_frame(ctx, true, true, "null_rel");
}

TaskFrame operator_by_label(const std::string& label, const RobotContext& ctx, int nq) {
  if (label == "config") return op_configuration(nq);
  if (label == "abs_pose") return op_absolute_pose(ctx);
  if (label == "rel_pose") return op_relative_pose(ctx);
  if (label == "null_config") return op_nullspace_configuration(ctx);
  if (label == "null_abs") return op_nullspace_absolute(ctx);
  if (label == "null_rel") return op_nullspace_relative(ctx);
  throw std::invalid_argument("unknown projection operator label: " + label);
}

}  // namespace tpl
