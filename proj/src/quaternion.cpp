#include "tplearn/quaternion.hpp"

#include <cmath>
#include <stdexcept>

namespace tpl {

namespace {

void normalize(double& w, Eigen::Vector3d& u) {
  const double n = std::sqrt(w * w + u.squaredNorm());
  if (n <= 0.0 || !std::isfinite(n)) {
    throw std::invalid_argument("Quat: cannot normalize zero/non-finite quaternion");
  }
  w /= n;
  u /= n;
}

}  // namespace

Quat::Quat(double w, const Eigen::Vector3d& u) : w_(w), u_(u) {
  normalize(w_, u_);
}

Quat::Quat(double w, double x, double y, double z) : w_(w), u_(x, y, z) {
  normalize(w_, u_);
}

Quat Quat::from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n <= 0.0) {
    throw std::invalid_argument("Quat::from_axis_angle: zero axis");
  }
  return Quat(std::cos(0.5 * angle), std::sin(0.5 * angle) * (axis / n));
}

Quat Quat::from_rotation_matrix(const Eigen::Matrix3d& R) {
  // Shepperd's method: pick the largest diagonal combination for stability.
  const double tr = R.trace();
  double w, x, y, z;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    w = 0.25 * s;
    x = (R(2, 1) - R(1, 2)) / s;
    y = (R(0, 2) - R(2, 0)) / s;
    z = (R(1, 0) - R(0, 1)) / s;
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    w = (R(2, 1) - R(1, 2)) / s;
    x = 0.25 * s;
    y = (R(0, 1) + R(1, 0)) / s;
    z = (R(0, 2) + R(2, 0)) / s;
  } else if (R(1, 1) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
    w = (R(0, 2) - R(2, 0)) / s;
    x = (R(0, 1) + R(1, 0)) / s;
    y = 0.25 * s;
    z = (R(1, 2) + R(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
    w = (R(1, 0) - R(0, 1)) / s;
    x = (R(0, 2) + R(2, 0)) / s;
    y = (R(1, 2) + R(2, 1)) / s;
    z = 0.25 * s;
  }
  return Quat(w, x, y, z);
}

Quat Quat::from_coeffs(const Eigen::Vector4d& wxyz) {
  return Quat(wxyz(0), wxyz(1), wxyz(2), wxyz(3));
}

Eigen::Vector4d Quat::coeffs() const {
  return Eigen::Vector4d(w_, u_.x(), u_.y(), u_.z());
}

Eigen::Matrix3d Quat::rotation_matrix() const {
  const double w = w_, x = u_.x(), y = u_.y(), z = u_.z();
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

Eigen::Vector3d Quat::rotate(const Eigen::Vector3d& v) const {
  // q * (0, v) * conj(q), expanded.
  const Eigen::Vector3d t = 2.0 * u_.cross(v);
  return v + w_ * t + u_.cross(t);
}

Quat Quat::canonical() const {
  if (w_ < 0.0) {
    return Quat(-w_, -u_, NoNormalize{});
  }
  return *this;
}

double Quat::norm_error() const {
  return std::abs(1.0 - std::sqrt(w_ * w_ + u_.squaredNorm()));
}

Quat operator*(const Quat& a, const Quat& b) {
  const double w = a.w() * b.w() - a.vec().dot(b.vec());
  const Eigen::Vector3d u =
      a.w() * b.vec() + b.w() * a.vec() + a.vec().cross(b.vec());
  return Quat(w, u);
}

Eigen::Matrix4d hamilton_plus(const Quat& q) {
  const double a0 = q.w(), a1 = q.vec().x(), a2 = q.vec().y(), a3 = q.vec().z();
  Eigen::Matrix4d H;
  H << a0, -a1, -a2, -a3,
      a1, a0, -a3, a2,
      a2, a3, a0, -a1,
      a3, -a2, a1, a0;
  return H;
}

Eigen::Matrix4d hamilton_bar(const Quat& q) {
  const double b0 = q.w(), b1 = q.vec().x(), b2 = q.vec().y(), b3 = q.vec().z();
  Eigen::Matrix4d H;
  H << b0, -b1, -b2, -b3,
      b1, b0, b3, -b2,
      b2, -b3, b0, b1,
      b3, b2, -b1, b0;
  return H;
}

Eigen::Matrix<double, 3, 4> hamilton_bar_star(const Quat& q) {
  return hamilton_bar(q).bottomRows<3>();
}

Eigen::Vector3d angular_velocity(const Quat& q_t, const Quat& q_prev, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("angular_velocity: dt must be positive");
  }
  const Quat rel = (q_t * q_prev.conjugate()).canonical();
  return rel.vec() / dt;
}

}  // namespace tpl
