#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tplearn/quaternion.hpp"

namespace tpl {

enum class ChainType { kPlanar, kSpatial };

// Chains with two end-effector branches address joints by index; indices
// shared between the two lists model joints driving both branches (e.g. a
// torso both arms hang from). kMain selects the full joint list.
enum class Branch { kMain, kLeft, kRight };

enum class JacobianKind { kPosition, kOrientation, kPose };

struct SpatialJoint {
  Eigen::Vector3d axis;    // unit rotation axis, in the parent frame
  Eigen::Vector3d offset;  // link vector to the next joint, in this joint's frame
};

struct Branches {
  std::vector<int> left;
  std::vector<int> right;
};

struct Pose {
  Eigen::VectorXd position;  // size 2 (planar) or 3 (spatial)
  double angle = 0.0;        // planar orientation
  Quat orientation;          // spatial orientation
};

class SerialChain {
 public:
  SerialChain() = default;  // empty placeholder; build through the factories

  static SerialChain planar(std::vector<double> link_lengths);
  static SerialChain planar_branched(std::vector<double> link_lengths, Branches branches);
  static SerialChain spatial(std::vector<SpatialJoint> joints);

  ChainType type() const { return type_; }
  int dof() const;
  bool has_branches() const { return branches_.has_value(); }
  std::vector<int> branch_joints(Branch branch) const;

  const std::vector<double>& link_lengths() const { return links_; }
  const std::vector<SpatialJoint>& spatial_joints() const { return spatial_; }

  // Root pose of the chain. Planar chains use (x, y) + angle; spatial chains
  // use position + quaternion.
  void set_base_pose(const Pose& base) { base_ = base; }
  const Pose& base_pose() const { return base_; }

  int task_dim(JacobianKind kind) const;

 private:
  void validate() const;

  ChainType type_ = ChainType::kPlanar;
  std::vector<double> links_;
  std::vector<SpatialJoint> spatial_;
  std::optional<Branches> branches_;
  Pose base_;
};

Pose forward_kinematics(const SerialChain& chain, const Eigen::VectorXd& q,
                        Branch branch = Branch::kMain);

// Geometric Jacobian for the selected branch end-effector; always has dof()
// columns, with zeros for joints off the branch. Planar rows: [xdot ydot]
// (position), [thetadot] (orientation), stacked for kPose. Spatial rows:
// [v] / [omega] / [v; omega].
Eigen::MatrixXd geometric_jacobian(const SerialChain& chain, const Eigen::VectorXd& q,
                                   Branch branch = Branch::kMain,
                                   JacobianKind kind = JacobianKind::kPose);

// damping == 0: SVD pseudoinverse, singular values below 1e-8 * sigma_max
// truncated. damping > 0: J^T (J J^T + damping^2 I)^-1.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& J, double damping = 0.0);

// N = I - J^+ J
Eigen::MatrixXd nullspace_projector(const Eigen::MatrixXd& J, double damping = 0.0);

// qdot = (J^T W J)^-1 J^T W xdot, with the pseudoinverse truncation policy
// when J^T W J is singular. W must be symmetric positive semi-definite.
Eigen::VectorXd weighted_pseudoinverse_step(const Eigen::MatrixXd& J_stack,
                                            const Eigen::MatrixXd& W,
                                            const Eigen::VectorXd& xdot);

struct TaskVelocity {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd xdot;
};

// qdot = J1^+ x1 + N1 J2^+ x2 + N1 N2 J3^+ x3 + ... in the given priority
// order (null-space projectors accumulate left to right).
Eigen::VectorXd strict_hierarchy_step(const std::vector<TaskVelocity>& tasks,
                                      const std::vector<int>& order,
                                      double damping = 0.0);

}  // namespace tpl
