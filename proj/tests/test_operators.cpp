#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tplearn/operators.hpp"
#include "tplearn/sim.hpp"

using namespace tpl;

namespace {

std::mt19937_64 rng(41);

Eigen::VectorXd random_vec(int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

// Planar context whose primary and secondary Jacobians both match the
// requested kind (the null-space builders expect the secondary task's rows to
// agree with it).
RobotContext planar_context(const SerialChain& chain, const Eigen::VectorXd& q,
                            JacobianKind kind) {
  RobotContext ctx;
  ctx.planar = true;
  ctx.kind = kind;
  ctx.q_prev = q;
  const Pose pose = forward_kinematics(chain, q);
  ctx.x_prev = pose.position;
  ctx.angle_prev = pose.angle;
  ctx.jacobian = geometric_jacobian(chain, q, Branch::kMain, kind);
  ctx.jacobian_secondary = ctx.jacobian;
  return ctx;
}

RobotContext spatial_context(const SerialChain& chain, const Eigen::VectorXd& q,
                             JacobianKind kind) {
  RobotContext ctx;
  ctx.planar = false;
  ctx.kind = kind;
  ctx.q_prev = q;
  const Pose pose = forward_kinematics(chain, q);
  ctx.x_prev = pose.position;
  ctx.eps_prev = pose.orientation;
  ctx.jacobian = geometric_jacobian(chain, q, Branch::kMain, kind);
  ctx.jacobian_secondary = ctx.jacobian;
  return ctx;
}

Eigen::VectorXd current_pose_mean(const RobotContext& ctx) {
  // The frame-local mean that represents "stay where you are".
  if (ctx.kind == JacobianKind::kPosition) {
    if (!ctx.object) return ctx.x_prev;
    const Eigen::MatrixXd R = ctx.object->rotation();
    return R.transpose() * (ctx.x_prev - ctx.object->position);
  }
  if (ctx.kind == JacobianKind::kOrientation) {
    if (ctx.planar) {
      Eigen::VectorXd a(1);
      a << (ctx.object ? ctx.angle_prev - ctx.object->angle : ctx.angle_prev);
      return a;
    }
    const Quat rel = ctx.object ? ctx.object->orientation.conjugate() * ctx.eps_prev
                                : ctx.eps_prev;
    return rel.coeffs();
  }
  // kPose: stacked position and orientation blocks.
  RobotContext pos = ctx;
  pos.kind = JacobianKind::kPosition;
  RobotContext ori = ctx;
  ori.kind = JacobianKind::kOrientation;
  const Eigen::VectorXd p = current_pose_mean(pos);
  const Eigen::VectorXd o = current_pose_mean(ori);
  Eigen::VectorXd out(p.size() + o.size());
  out << p, o;
  return out;
}

ObjectPose planar_object() {
  ObjectPose obj;
  obj.position = Eigen::Vector2d(0.4, 0.9);
  obj.angle = 0.7;
  return obj;
}

ObjectPose spatial_object() {
  ObjectPose obj;
  obj.position = Eigen::Vector3d(0.3, -0.2, 0.5);
  obj.orientation = Quat::from_axis_angle(Eigen::Vector3d(1, 2, -1).normalized(), 0.8);
  return obj;
}

}  // namespace

TEST_CASE("configuration operator is the identity frame") {
  const TaskFrame f = op_configuration(4);
  CHECK((f.A - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
  CHECK(f.b.norm() == 0.0);
  const Eigen::VectorXd mu = random_vec(4);
  CHECK(((f.A * mu + f.b) - mu).norm() == 0.0);
}

TEST_CASE("every operator has the current pose as fixed point") {
  const SerialChain planar = SerialChain::planar({1.0, 0.8, 1.2});
  const RobotPreset spatial = preset("spatial6");

  for (int trial = 0; trial < 20; ++trial) {
    for (JacobianKind kind :
         {JacobianKind::kPosition, JacobianKind::kOrientation, JacobianKind::kPose}) {
      RobotContext ctx = planar_context(planar, random_vec(3), kind);
      SUBCASE("") {}
      CHECK((op_absolute_pose(ctx).A * current_pose_mean(ctx) + op_absolute_pose(ctx).b -
             ctx.q_prev)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      ctx.object = planar_object();
      CHECK((op_relative_pose(ctx).A * current_pose_mean(ctx) + op_relative_pose(ctx).b -
             ctx.q_prev)
                .cwiseAbs()
                .maxCoeff() < 1e-9);

      RobotContext sctx = spatial_context(spatial.chain, random_vec(6, 0.7), kind);
      CHECK((op_absolute_pose(sctx).A * current_pose_mean(sctx) + op_absolute_pose(sctx).b -
             sctx.q_prev)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      sctx.object = spatial_object();
      CHECK((op_relative_pose(sctx).A * current_pose_mean(sctx) + op_relative_pose(sctx).b -
             sctx.q_prev)
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }

    // Null-space variants: fixed point in configuration space.
    RobotContext ctx =
        planar_context(planar, random_vec(3), JacobianKind::kPosition);
    const TaskFrame nc = op_nullspace_configuration(ctx);
    CHECK((nc.A * ctx.q_prev + nc.b - ctx.q_prev).cwiseAbs().maxCoeff() < 1e-9);

    RobotContext octx = planar_context(planar, random_vec(3), JacobianKind::kOrientation);
    octx.jacobian = geometric_jacobian(planar, octx.q_prev, Branch::kMain,
                                       JacobianKind::kPosition);  // primary: position
    const TaskFrame na = op_nullspace_absolute(octx);
    Eigen::VectorXd mu(1);
    mu << octx.angle_prev;
    CHECK((na.A * mu + na.b - octx.q_prev).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("absolute operator equals one differential IK step") {
  const SerialChain chain = SerialChain::planar({1.0, 1.0, 1.0});
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd q = random_vec(3);
    RobotContext ctx = planar_context(chain, q, JacobianKind::kPosition);
    const Eigen::VectorXd target = ctx.x_prev + random_vec(2, 0.01);
    const TaskFrame f = op_absolute_pose(ctx);
    const Eigen::VectorXd via_frame = f.A * target + f.b;
    const Eigen::VectorXd via_ik =
        q + pseudoinverse(ctx.jacobian) * (target - ctx.x_prev);
    CHECK((via_frame - via_ik).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("planar position-only absolute operator reduction") {
  const SerialChain chain = SerialChain::planar({1.0, 0.9, 1.1});
  const Eigen::VectorXd q = random_vec(3);
  RobotContext ctx = planar_context(chain, q, JacobianKind::kPosition);
  const TaskFrame f = op_absolute_pose(ctx);
  const Eigen::MatrixXd Jp = pseudoinverse(ctx.jacobian);
  CHECK((f.A - Jp).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f.b - (q - Jp * ctx.x_prev)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("relative operator with a world-aligned object equals the absolute one") {
  const SerialChain chain = SerialChain::planar({1.0, 1.0, 1.0});
  for (JacobianKind kind :
       {JacobianKind::kPosition, JacobianKind::kOrientation, JacobianKind::kPose}) {
    RobotContext ctx = planar_context(chain, random_vec(3), kind);
    ObjectPose obj;
    obj.position = Eigen::Vector2d::Zero();
    obj.angle = 0.0;
    ctx.object = obj;
    const TaskFrame rel = op_relative_pose(ctx);
    const TaskFrame abs = op_absolute_pose(ctx);
    CHECK((rel.A - abs.A).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rel.b - abs.b).cwiseAbs().maxCoeff() < 1e-12);
  }

  const RobotPreset spatial = preset("spatial6");
  RobotContext sctx = spatial_context(spatial.chain, random_vec(6, 0.5), JacobianKind::kPose);
  ObjectPose obj;
  obj.position = Eigen::Vector3d::Zero();
  sctx.object = obj;
  const TaskFrame rel = op_relative_pose(sctx);
  const TaskFrame abs = op_absolute_pose(sctx);
  CHECK((rel.A - abs.A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rel.b - abs.b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("relative operator reproduces the IK step toward a rotated target") {
  const SerialChain chain = SerialChain::planar({1.0, 1.0, 1.0});
  for (int trial = 0; trial < 30; ++trial) {
    RobotContext ctx = planar_context(chain, random_vec(3), JacobianKind::kPosition);
    ctx.object = planar_object();
    const Eigen::VectorXd mu_local = random_vec(2, 0.02);
    const Eigen::VectorXd world_target =
        ctx.object->position + ctx.object->rotation() * mu_local;
    const TaskFrame f = op_relative_pose(ctx);
    const Eigen::VectorXd via_frame = f.A * mu_local + f.b;
    const Eigen::VectorXd via_ik =
        ctx.q_prev + pseudoinverse(ctx.jacobian) * (world_target - ctx.x_prev);
    CHECK((via_frame - via_ik).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("null-space configuration operator identities") {
  const SerialChain chain = SerialChain::planar({1.0, 1.0, 1.0});
  const Eigen::VectorXd q = random_vec(3);

  // Square full-rank primary: candidate pinned to the current configuration.
  RobotContext pose_ctx = planar_context(chain, q, JacobianKind::kPose);
  const TaskFrame pinned = op_nullspace_configuration(pose_ctx);
  CHECK(pinned.A.cwiseAbs().maxCoeff() < 1e-9);
  CHECK((pinned.b - q).cwiseAbs().maxCoeff() < 1e-9);

  // Zero primary: reduces to the canonical configuration operator.
  RobotContext zero_ctx = pose_ctx;
  zero_ctx.jacobian = Eigen::MatrixXd::Zero(2, 3);
  const TaskFrame open = op_nullspace_configuration(zero_ctx);
  CHECK((open.A - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(open.b.cwiseAbs().maxCoeff() < 1e-12);

  // N + J^+J = I.
  RobotContext pos_ctx = planar_context(chain, q, JacobianKind::kPosition);
  const TaskFrame f = op_nullspace_configuration(pos_ctx);
  const Eigen::MatrixXd JpJ = pseudoinverse(pos_ctx.jacobian) * pos_ctx.jacobian;
  CHECK((f.A + JpJ - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("null-space pose operators never command primary-task motion") {
  const SerialChain chain = SerialChain::planar({1.0, 0.8, 1.2, 0.9});
  for (int trial = 0; trial < 30; ++trial) {
    RobotContext ctx;
    ctx.planar = true;
    ctx.kind = JacobianKind::kOrientation;
    ctx.q_prev = random_vec(4);
    const Pose pose = forward_kinematics(chain, ctx.q_prev);
    ctx.x_prev = pose.position;
    ctx.angle_prev = pose.angle;
    ctx.jacobian = geometric_jacobian(chain, ctx.q_prev, Branch::kMain, JacobianKind::kPosition);
    ctx.jacobian_secondary =
        geometric_jacobian(chain, ctx.q_prev, Branch::kMain, JacobianKind::kOrientation);

    const TaskFrame na = op_nullspace_absolute(ctx);
    ctx.object = planar_object();
    const TaskFrame nr = op_nullspace_relative(ctx);
    for (const TaskFrame& f : {na, nr}) {
      for (int m = 0; m < 5; ++m) {
        const Eigen::VectorXd mu = random_vec(static_cast<int>(f.A.cols()));
        const Eigen::VectorXd displacement = f.A * mu + f.b - ctx.q_prev;
        CHECK((ctx.jacobian * displacement).cwiseAbs().maxCoeff() < 1e-9);
      }
    }

    // Zero secondary reach: N = 0 when the primary constrains everything.
    RobotContext full = ctx;
    full.jacobian = geometric_jacobian(chain, ctx.q_prev, Branch::kMain, JacobianKind::kPose);
    Eigen::MatrixXd extra(1, 4);
    extra << 1, 0, 0, 0;
    full.jacobian.conservativeResize(4, Eigen::NoChange);
    full.jacobian.row(3) = extra;
    const TaskFrame blocked = op_nullspace_absolute(full);
    CHECK(blocked.A.cwiseAbs().maxCoeff() < 1e-8);
    CHECK((blocked.b - ctx.q_prev).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("planar and spatial operators agree on a planar embedding") {
  // Spatial chain with all z axes and x offsets behaves like the planar one.
  const SerialChain planar = SerialChain::planar({1.0, 1.0, 1.0});
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const SerialChain embedded = SerialChain::spatial(
      {{z, Eigen::Vector3d(1, 0, 0)}, {z, Eigen::Vector3d(1, 0, 0)}, {z, Eigen::Vector3d(1, 0, 0)}});

  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_vec(3);
    RobotContext pctx = planar_context(planar, q, JacobianKind::kPosition);
    RobotContext sctx;
    sctx.planar = false;
    sctx.kind = JacobianKind::kPosition;
    sctx.q_prev = q;
    const Pose spose = forward_kinematics(embedded, q);
    sctx.x_prev = spose.position;
    sctx.eps_prev = spose.orientation;
    sctx.jacobian = geometric_jacobian(embedded, q, Branch::kMain, JacobianKind::kPosition);

    const TaskFrame pf = op_absolute_pose(pctx);
    const TaskFrame sf = op_absolute_pose(sctx);
    const Eigen::VectorXd mu2 = Eigen::VectorXd(pctx.x_prev) + random_vec(2, 0.05);
    Eigen::VectorXd mu3(3);
    mu3 << mu2, 0.0;
    CHECK(((pf.A * mu2 + pf.b) - (sf.A * mu3 + sf.b)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("operator labels") {
  const SerialChain chain = SerialChain::planar({1.0, 1.0, 1.0});
  RobotContext ctx = planar_context(chain, random_vec(3), JacobianKind::kPosition);
  ctx.object = planar_object();
  for (const char* label :
       {"config", "abs_pose", "rel_pose", "null_config", "null_abs", "null_rel"}) {
    const TaskFrame f = operator_by_label(label, ctx, 3);
    CHECK(f.label == label);
    CHECK(f.A.rows() == 3);
  }
  CHECK_THROWS_AS(operator_by_label("bogus", ctx, 3), std::invalid_argument);

  RobotContext no_obj = planar_context(chain, random_vec(3), JacobianKind::kPosition);
  CHECK_THROWS_AS(op_relative_pose(no_obj), std::invalid_argument);
}
