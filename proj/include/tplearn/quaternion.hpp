#pragma once

#include <Eigen/Dense>

namespace tpl {

// Unit quaternion stored as [w, x, y, z] (real part first). Inputs are
// renormalized on construction so downstream algebra can assume unit norm.
class Quat {
 public:
  Quat() : w_(1.0), u_(Eigen::Vector3d::Zero()) {}
  Quat(double w, const Eigen::Vector3d& u);
  Quat(double w, double x, double y, double z);

  static Quat from_axis_angle(const Eigen::Vector3d& axis, double angle);
  static Quat from_rotation_matrix(const Eigen::Matrix3d& R);
  static Quat from_coeffs(const Eigen::Vector4d& wxyz);

  double w() const { return w_; }
  const Eigen::Vector3d& vec() const { return u_; }
  Eigen::Vector4d coeffs() const;  // [w, x, y, z]

  Quat conjugate() const { return Quat(w_, -u_, NoNormalize{}); }
  Eigen::Matrix3d rotation_matrix() const;
  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const;

  // Flips the sign so the real part is non-negative (shortest-arc branch
  // of the double cover).
  Quat canonical() const;

  double norm_error() const;  // |1 - ||q|||, for invariant checks

 private:
  struct NoNormalize {};
  Quat(double w, const Eigen::Vector3d& u, NoNormalize) : w_(w), u_(u) {}

  double w_;
  Eigen::Vector3d u_;
};

Quat operator*(const Quat& a, const Quat& b);

// Hamilton operators: hamilton_plus(a) * b.coeffs() == (a*b).coeffs() and
// hamilton_bar(b) * a.coeffs() == (a*b).coeffs().
Eigen::Matrix4d hamilton_plus(const Quat& q);
Eigen::Matrix4d hamilton_bar(const Quat& q);

// Bottom three rows of hamilton_bar: maps eps_t to vec(eps_t * q).
Eigen::Matrix<double, 3, 4> hamilton_bar_star(const Quat& q);

// Angular velocity rotating q_prev into q_t over dt seconds, taken from the
// vector part of the relative quaternion (sign-canonicalized first).
// Throws std::invalid_argument for dt <= 0.
Eigen::Vector3d angular_velocity(const Quat& q_t, const Quat& q_prev, double dt);

}  // namespace tpl
