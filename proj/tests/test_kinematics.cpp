#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tplearn/kinematics.hpp"

using namespace tpl;

namespace {

std::mt19937_64 rng(11);

Eigen::VectorXd random_vec(int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Eigen::MatrixXd random_mat(int r, int c) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  }
  return m;
}

SerialChain bimanual_chain() {
  return SerialChain::planar_branched({0.5, 0.6, 0.6, 0.6, 0.6},
                                      Branches{{0, 1, 2}, {0, 3, 4}});
}

SerialChain spatial_chain() {
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  return SerialChain::spatial({{z, Eigen::Vector3d(0, 0, 0.3)},
                               {y, Eigen::Vector3d(0.4, 0, 0)},
                               {y, Eigen::Vector3d(0.4, 0, 0)},
                               {z, Eigen::Vector3d(0.2, 0, 0)}});
}

// Central-difference columns of the pose map; the independent check for the
// analytic Jacobians.
Eigen::MatrixXd fd_jacobian(const SerialChain& chain, const Eigen::VectorXd& q,
                            Branch branch) {
  const double h = 1e-7;
  const bool planar = chain.type() == ChainType::kPlanar;
  const int rows = planar ? 3 : 6;
  Eigen::MatrixXd J(rows, q.size());
  for (int i = 0; i < q.size(); ++i) {
    Eigen::VectorXd qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    const Pose pp = forward_kinematics(chain, qp, branch);
    const Pose pm = forward_kinematics(chain, qm, branch);
    J.col(i).head(pp.position.size()) = (pp.position - pm.position) / (2 * h);
    if (planar) {
      J(2, i) = (pp.angle - pm.angle) / (2 * h);
    } else {
      // omega * (2h) from the relative quaternion's vector part, doubled for
      // the half-angle parameterization.
      J.col(i).tail(3) = 2.0 * angular_velocity(pp.orientation, pm.orientation, 2 * h);
    }
  }
  return J;
}

}  // namespace

TEST_CASE("forward kinematics straight planar chain") {
  const SerialChain chain = SerialChain::planar({1, 1, 1});
  const Pose p0 = forward_kinematics(chain, Eigen::Vector3d(0, 0, 0));
  CHECK((p0.position - Eigen::Vector2d(3, 0)).norm() < 1e-15);
  CHECK(p0.angle == 0.0);

  const Pose p1 = forward_kinematics(chain, Eigen::Vector3d(M_PI / 2, 0, 0));
  CHECK((p1.position - Eigen::Vector2d(0, 3)).norm() < 1e-12);
  CHECK(p1.angle == doctest::Approx(M_PI / 2));
}

TEST_CASE("forward kinematics planar embedding of a spatial chain") {
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const SerialChain chain = SerialChain::spatial({{z, Eigen::Vector3d(1, 0, 0)},
                                                  {z, Eigen::Vector3d(1, 0, 0)},
                                                  {z, Eigen::Vector3d(1, 0, 0)}});
  const Pose p = forward_kinematics(chain, Eigen::Vector3d(0, 0, 0));
  CHECK((p.position - Eigen::Vector3d(3, 0, 0)).norm() < 1e-15);
  CHECK((p.orientation.coeffs() - Eigen::Vector4d(1, 0, 0, 0)).norm() < 1e-15);
}

TEST_CASE("dimension mismatch throws") {
  const SerialChain chain = SerialChain::planar({1, 1, 1});
  CHECK_THROWS_AS(forward_kinematics(chain, Eigen::Vector2d(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(geometric_jacobian(chain, Eigen::Vector2d(0, 0)), std::invalid_argument);
}

TEST_CASE("unit axes enforced") {
  CHECK_THROWS_AS(SerialChain::spatial({{Eigen::Vector3d(0, 0, 2), Eigen::Vector3d(1, 0, 0)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SerialChain::planar({-1.0}), std::invalid_argument);
}

TEST_CASE("jacobian at the straight configuration") {
  const SerialChain chain = SerialChain::planar({1, 1, 1});
  const Eigen::MatrixXd J =
      geometric_jacobian(chain, Eigen::Vector3d(0, 0, 0), Branch::kMain, JacobianKind::kPose);
  Eigen::MatrixXd expect(3, 3);
  expect << 0, 0, 0, 3, 2, 1, 1, 1, 1;
  CHECK((J - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("jacobian matches central differences") {
  const SerialChain planar = SerialChain::planar({1.0, 0.8, 1.2});
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd q = random_vec(3);
    const Eigen::MatrixXd J = geometric_jacobian(planar, q, Branch::kMain, JacobianKind::kPose);
    CHECK((J - fd_jacobian(planar, q, Branch::kMain)).cwiseAbs().maxCoeff() < 1e-6);
  }

  const SerialChain spatial = spatial_chain();
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd q = random_vec(4);
    const Eigen::MatrixXd J = geometric_jacobian(spatial, q, Branch::kMain, JacobianKind::kPose);
    CHECK((J - fd_jacobian(spatial, q, Branch::kMain)).cwiseAbs().maxCoeff() < 1e-6);
  }

  const SerialChain bim = bimanual_chain();
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::VectorXd q = random_vec(5);
    for (Branch b : {Branch::kLeft, Branch::kRight}) {
      const Eigen::MatrixXd J = geometric_jacobian(bim, q, b, JacobianKind::kPose);
      CHECK((J - fd_jacobian(bim, q, b)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("branch jacobian has zero off-branch columns") {
  const SerialChain bim = bimanual_chain();
  const Eigen::VectorXd q = random_vec(5);
  const Eigen::MatrixXd JL = geometric_jacobian(bim, q, Branch::kLeft, JacobianKind::kPosition);
  CHECK(JL.col(3).norm() == 0.0);
  CHECK(JL.col(4).norm() == 0.0);
  CHECK(JL.col(0).norm() > 0.0);
  const Eigen::MatrixXd JR = geometric_jacobian(bim, q, Branch::kRight, JacobianKind::kPosition);
  CHECK(JR.col(1).norm() == 0.0);
  CHECK(JR.col(2).norm() == 0.0);
}

TEST_CASE("pseudoinverse basics") {
  CHECK((pseudoinverse(Eigen::Matrix2d::Identity()) - Eigen::Matrix2d::Identity()).norm() <
        1e-14);
  Eigen::MatrixXd scalar(1, 1);
  scalar << 2.0;
  CHECK(pseudoinverse(scalar)(0, 0) == doctest::Approx(0.5));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 3);
  CHECK(pseudoinverse(zero).norm() == 0.0);
  CHECK(pseudoinverse(zero).rows() == 3);
}

TEST_CASE("penrose conditions on random matrices") {
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> rows_d(1, 6), cols_d(1, 7);
    const Eigen::MatrixXd J = random_mat(rows_d(rng), cols_d(rng));
    const Eigen::MatrixXd Jp = pseudoinverse(J);
    CHECK((J * Jp * J - J).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((Jp * J * Jp - Jp).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(((J * Jp) - (J * Jp).transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(((Jp * J) - (Jp * J).transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("nullspace projector identities") {
  Eigen::MatrixXd J(1, 2);
  J << 1, 0;
  Eigen::Matrix2d expect;
  expect << 0, 0, 0, 1;
  CHECK((nullspace_projector(J) - expect).norm() < 1e-14);

  const Eigen::MatrixXd square = random_mat(3, 3);
  CHECK(nullspace_projector(square).cwiseAbs().maxCoeff() < 1e-10);

  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd Jr = random_mat(2, 5);
    const Eigen::MatrixXd N = nullspace_projector(Jr);
    CHECK((Jr * N).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((N * N - N).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((N - N.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("weighted pseudoinverse step") {
  const Eigen::MatrixXd J = random_mat(3, 3);
  const Eigen::VectorXd xdot = random_vec(3);
  const Eigen::VectorXd unweighted =
      weighted_pseudoinverse_step(J, Eigen::Matrix3d::Identity(), xdot);
  CHECK((unweighted - pseudoinverse(J) * xdot).cwiseAbs().maxCoeff() < 1e-9);

  // Zero weight drops the second task entirely.
  Eigen::MatrixXd J2(2, 3);
  J2 << random_mat(1, 3), random_mat(1, 3);
  Eigen::Matrix2d W = Eigen::Matrix2d::Zero();
  W(0, 0) = 1.0;
  const Eigen::VectorXd x2 = random_vec(2);
  const Eigen::VectorXd only_first =
      weighted_pseudoinverse_step(J2, W, x2);
  const Eigen::VectorXd expect = pseudoinverse(J2.topRows(1)) * x2.head(1);
  CHECK((only_first - expect).cwiseAbs().maxCoeff() < 1e-9);

  // Common scale of W cancels.
  Eigen::Matrix2d Ws;
  Ws << 0.7, 0.0, 0.0, 0.7;
  const Eigen::VectorXd a = weighted_pseudoinverse_step(J2, Ws, x2);
  const Eigen::VectorXd b = weighted_pseudoinverse_step(J2, 40.0 * Ws, x2);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("strict hierarchy single task reduces to least norm") {
  const Eigen::MatrixXd J = random_mat(2, 4);
  const Eigen::VectorXd x = random_vec(2);
  const Eigen::VectorXd qdot = strict_hierarchy_step({{J, x}}, {0});
  CHECK((qdot - pseudoinverse(J) * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("strict hierarchy reproduces the top-priority velocity exactly") {
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd J1 = random_mat(2, 4);
    const Eigen::MatrixXd J2 = random_mat(2, 4);
    const Eigen::VectorXd x1 = random_vec(2);
    const Eigen::VectorXd x2 = random_vec(2);
    const Eigen::VectorXd qdot = strict_hierarchy_step({{J1, x1}, {J2, x2}}, {0, 1});
    CHECK((J1 * qdot - x1).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("compatible references satisfied under either order") {
  const SerialChain chain = SerialChain::planar({1, 1, 1});
  const Eigen::Vector3d q_goal(0.9, -0.5, 0.4);
  const Pose goal = forward_kinematics(chain, q_goal);

  for (const std::vector<int>& order : {std::vector<int>{0, 1}, std::vector<int>{1, 0}}) {
    Eigen::VectorXd q(3);
    q << 1.2, -0.8, 0.7;
    for (int step = 0; step < 400; ++step) {
      const Pose pose = forward_kinematics(chain, q);
      const Eigen::MatrixXd Jp = geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kPosition);
      const Eigen::MatrixXd Jo = geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kOrientation);
      Eigen::VectorXd e_pos = goal.position - pose.position;
      Eigen::VectorXd e_or(1);
      e_or << goal.angle - pose.angle;
      q += strict_hierarchy_step({{Jp, 0.5 * e_pos}, {Jo, 0.5 * e_or}}, order);
    }
    const Pose pose = forward_kinematics(chain, q);
    CHECK((goal.position - pose.position).norm() < 1e-9);
    CHECK(std::abs(goal.angle - pose.angle) < 1e-9);
  }
}
