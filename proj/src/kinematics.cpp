#include "tplearn/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace tpl {

namespace {

constexpr double kAxisTol = 1e-12;
constexpr double kSvdRelTruncation = 1e-8;

void check_q(const SerialChain& chain, const Eigen::VectorXd& q) {
  if (q.size() != chain.dof()) {
    throw std::invalid_argument("joint vector size does not match chain DOF");
  }
  if (!q.allFinite()) {
    throw std::invalid_argument("joint vector has non-finite entries");
  }
}

}  // namespace

SerialChain SerialChain::planar(std::vector<double> link_lengths) {
  SerialChain c;
  c.type_ = ChainType::kPlanar;
  c.links_ = std::move(link_lengths);
  c.base_.position = Eigen::Vector2d::Zero();
  c.validate();
  return c;
}

SerialChain SerialChain::planar_branched(std::vector<double> link_lengths, Branches branches) {
  SerialChain c;
  c.type_ = ChainType::kPlanar;
  c.links_ = std::move(link_lengths);
  c.branches_ = std::move(branches);
  c.base_.position = Eigen::Vector2d::Zero();
  c.validate();
  return c;
}

SerialChain SerialChain::spatial(std::vector<SpatialJoint> joints) {
  SerialChain c;
  c.type_ = ChainType::kSpatial;
  c.spatial_ = std::move(joints);
  c.base_.position = Eigen::Vector3d::Zero();
  c.validate();
  return c;
}

void SerialChain::validate() const {
  if (dof() == 0) {
    throw std::invalid_argument("SerialChain: chain needs at least one joint");
  }
  if (type_ == ChainType::kPlanar) {
    for (double l : links_) {
      if (!(l >= 0.0) || !std::isfinite(l)) {
        throw std::invalid_argument("SerialChain: link lengths must be >= 0");
      }
    }
  } else {
    for (const auto& j : spatial_) {
      if (std::abs(j.axis.norm() - 1.0) > kAxisTol) {
        throw std::invalid_argument("SerialChain: spatial joint axes must be unit norm");
      }
      if (!j.offset.allFinite()) {
        throw std::invalid_argument("SerialChain: non-finite joint offset");
      }
    }
  }
  if (branches_) {
    for (const auto* list : {&branches_->left, &branches_->right}) {
      if (list->empty()) {
        throw std::invalid_argument("SerialChain: empty branch joint list");
      }
      for (int idx : *list) {
        if (idx < 0 || idx >= dof()) {
          throw std::invalid_argument("SerialChain: branch joint index out of range");
        }
      }
    }
  }
}

int SerialChain::dof() const {
  return type_ == ChainType::kPlanar ? static_cast<int>(links_.size())
                                     : static_cast<int>(spatial_.size());
}

std::vector<int> SerialChain::branch_joints(Branch branch) const {
  if (branch == Branch::kMain) {
    std::vector<int> all(dof());
    for (int i = 0; i < dof(); ++i) all[i] = i;
    return all;
  }
  if (!branches_) {
    throw std::invalid_argument("SerialChain: chain has no branches");
  }
  return branch == Branch::kLeft ? branches_->left : branches_->right;
}

int SerialChain::task_dim(JacobianKind kind) const {
  const bool planar = type_ == ChainType::kPlanar;
  switch (kind) {
    case JacobianKind::kPosition:
      return planar ? 2 : 3;
    case JacobianKind::kOrientation:
      return planar ? 1 : 3;
    case JacobianKind::kPose:
      return planar ? 3 : 6;
  }
  return 0;
}

Pose forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& q, Branch branch) {
  check_q(chain, q);
  const std::vector<int> joints = chain.branch_joints(branch);
  Pose pose;
  if (chain.type() == ChainType::kPlanar) {
    double a = chain.base_pose().angle;
    Eigen::Vector2d p = chain.base_pose().position.size() == 2
                            ? Eigen::Vector2d(chain.base_pose().position)
                            : Eigen::Vector2d::Zero();
    for (int idx : joints) {
      a += q(idx);
      p += chain.link_lengths()[idx] * Eigen::Vector2d(std::cos(a), std::sin(a));
    }
    pose.position = p;
    pose.angle = a;
  } else {
    Quat rot = chain.base_pose().orientation;
    Eigen::Vector3d p = chain.base_pose().position.size() == 3
                            ? Eigen::Vector3d(chain.base_pose().position)
                            : Eigen::Vector3d::Zero();
    for (int idx : joints) {
      const SpatialJoint& j = chain.spatial_joints()[idx];
      rot = rot * Quat::from_axis_angle(j.axis, q(idx));
      p += rot.rotate(j.offset);
    }
    pose.position = p;
    pose.orientation = rot;
  }
  return pose;
}

Eigen::MatrixXd geometric_jacobian(const SerialChain& chain, const Eigen::VectorXd& q,
                                   Branch branch, JacobianKind kind) {
  check_q(chain, q);
  const std::vector<int> joints = chain.branch_joints(branch);
  const int nq = chain.dof();

  Eigen::MatrixXd Jp, Jo;
  if (chain.type() == ChainType::kPlanar) {
    Jp = Eigen::MatrixXd::Zero(2, nq);
    Jo = Eigen::MatrixXd::Zero(1, nq);
    // Cumulative angles along the branch; column j sums the link tangents of
    // every branch link at or after joint j.
    double a = chain.base_pose().angle;
    std::vector<double> lc(joints.size()), ls(joints.size());
    for (size_t i = 0; i < joints.size(); ++i) {
      a += q(joints[i]);
      lc[i] = chain.link_lengths()[joints[i]] * std::cos(a);
      ls[i] = chain.link_lengths()[joints[i]] * std::sin(a);
    }
    for (size_t jidx = 0; jidx < joints.size(); ++jidx) {
      double dx = 0.0, dy = 0.0;
      for (size_t i = jidx; i < joints.size(); ++i) {
        dx -= ls[i];
        dy += lc[i];
      }
      Jp(0, joints[jidx]) = dx;
      Jp(1, joints[jidx]) = dy;
      Jo(0, joints[jidx]) = 1.0;
    }
  } else {
    Jp = Eigen::MatrixXd::Zero(3, nq);
    Jo = Eigen::MatrixXd::Zero(3, nq);
    Quat rot = chain.base_pose().orientation;
    Eigen::Vector3d p = chain.base_pose().position.size() == 3
                            ? Eigen::Vector3d(chain.base_pose().position)
                            : Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> axis_w(joints.size()), origin_w(joints.size());
    for (size_t i = 0; i < joints.size(); ++i) {
      const SpatialJoint& j = chain.spatial_joints()[joints[i]];
      axis_w[i] = rot.rotate(j.axis);
      origin_w[i] = p;
      rot = rot * Quat::from_axis_angle(j.axis, q(joints[i]));
      p += rot.rotate(j.offset);
    }
    for (size_t i = 0; i < joints.size(); ++i) {
      Jp.col(joints[i]) = axis_w[i].cross(p - origin_w[i]);
      Jo.col(joints[i]) = axis_w[i];
    }
  }

  switch (kind) {
    case JacobianKind::kPosition:
      return Jp;
    case JacobianKind::kOrientation:
      return Jo;
    case JacobianKind::kPose: {
      Eigen::MatrixXd J(Jp.rows() + Jo.rows(), nq);
      J << Jp, Jo;
      return J;
    }
  }
  return Jp;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& J, double damping) {
  if (J.size() == 0) {
    return Eigen::MatrixXd::Zero(J.cols(), J.rows());
  }
  if (damping > 0.0) {
    const Eigen::MatrixXd JJt = J * J.transpose() +
        damping * damping * Eigen::MatrixXd::Identity(J.rows(), J.rows());
    return J.transpose() * JJt.ldlt().solve(Eigen::MatrixXd::Identity(J.rows(), J.rows()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kSvdRelTruncation * s(0) : 0.0;
  Eigen::VectorXd sinv = Eigen::VectorXd::Zero(s.size());
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) {
      sinv(i) = 1.0 / s(i);
    }
  }
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd nullspace_projector(const Eigen::MatrixXd& J, double damping) {
  return Eigen::MatrixXd::Identity(J.cols(), J.cols()) - pseudoinverse(J, damping) * J;
}

Eigen::VectorXd weighted_pseudoinverse_step(const Eigen::MatrixXd& J_stack,
                                            const Eigen::MatrixXd& W,
                                            const Eigen::VectorXd& xdot) {
  if (W.rows() != J_stack.rows() || W.cols() != J_stack.rows() ||
      xdot.size() != J_stack.rows()) {
    throw std::invalid_argument("weighted_pseudoinverse_step: inconsistent dimensions");
  }
  const Eigen::MatrixXd JtW = J_stack.transpose() * W;
  return pseudoinverse(JtW * J_stack) * (JtW * xdot);
}

Eigen::VectorXd strict_hierarchy_step(const std::vector<TaskVelocity>& tasks,
                                      const std::vector<int>& order, double damping) {
  if (tasks.empty()) {
    throw std::invalid_argument("strict_hierarchy_step: no tasks");
  }
  if (order.size() != tasks.size()) {
    throw std::invalid_argument("strict_hierarchy_step: order size mismatch");
  }
  const int nq = static_cast<int>(tasks.front().jacobian.cols());
  Eigen::VectorXd qdot = Eigen::VectorXd::Zero(nq);
  Eigen::MatrixXd N_acc = Eigen::MatrixXd::Identity(nq, nq);
  for (int rank : order) {
    const TaskVelocity& task = tasks.at(rank);
    if (task.jacobian.cols() != nq || task.xdot.size() != task.jacobian.rows()) {
      throw std::invalid_argument("strict_hierarchy_step: task dimensions inconsistent");
    }
    qdot += N_acc * pseudoinverse(task.jacobian, damping) * task.xdot;
    N_acc = N_acc * nullspace_projector(task.jacobian, damping);
  }
  return qdot;
}

}  // namespace tpl
