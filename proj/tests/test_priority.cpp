#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tplearn/priority.hpp"
#include "tplearn/sim.hpp"

using namespace tpl;

namespace {

std::mt19937_64 rng(53);

Eigen::VectorXd random_vec(int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Eigen::MatrixXd random_mat(int r, int c) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) m.row(i) = random_vec(c).transpose();
  return m;
}

std::vector<Hierarchy> bimanual_candidates() {
  return {Hierarchy{{0, 1}, "left_first"}, Hierarchy{{1, 0}, "right_first"}};
}

PriorityDemoResult left_priority_demo(double horizon = 20.0) {
  const RobotPreset robot = preset("bimanual5");
  const ReferenceProgram program = bimanual_sweep_program(
      robot, horizon, {-1.25, 0.55}, {1.25, 0.55}, 3.0, 17.0);
  PriorityDemoOptions opts;
  return generate_priority_demos(robot, Hierarchy{{0, 1}, "left_first"}, program,
                                 bimanual_position_observer(robot.chain), opts);
}

}  // namespace

TEST_CASE("hierarchy matrix blocks") {
  const Eigen::MatrixXd J = random_mat(2, 4);
  const Eigen::VectorXd x = random_vec(2);
  CHECK((hierarchy_matrix({J}, {0}) - pseudoinverse(J)).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd J1 = random_mat(2, 5);
  const Eigen::MatrixXd J2 = random_mat(2, 5);
  const Eigen::MatrixXd A = hierarchy_matrix({J1, J2}, {0, 1});
  CHECK((A.leftCols(2) - pseudoinverse(J1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((A.rightCols(2) - nullspace_projector(J1) * pseudoinverse(J2)).cwiseAbs().maxCoeff() <
        1e-12);

  // Priority order only permutes which block gets the null-space projector;
  // columns stay at each task's slot.
  const Eigen::MatrixXd A2 = hierarchy_matrix({J1, J2}, {1, 0});
  CHECK((A2.rightCols(2) - pseudoinverse(J2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((A2.leftCols(2) - nullspace_projector(J2) * pseudoinverse(J1)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("secondary task inside the primary row space is fully blocked") {
  Eigen::MatrixXd J1(2, 3);
  J1 << 1, 0, 0, 0, 1, 0;
  Eigen::MatrixXd J2(1, 3);
  J2 << 1, 1, 0;  // rows inside rowspace(J1)
  const Eigen::MatrixXd A = hierarchy_matrix({J1, J2}, {0, 1});
  CHECK(A.rightCols(1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project_demo reproduces the top-priority block exactly") {
  const PriorityDemoResult demo = left_priority_demo(6.0);
  const std::vector<Eigen::MatrixXd> X =
      project_demo(demo.demos.front(), bimanual_candidates());
  // Left-first hierarchy: the left block of the projection equals xi's left
  // block through the identity block of Jbar * A.
  CHECK((X[0].leftCols(2) - demo.demos.front().xi.leftCols(2)).cwiseAbs().maxCoeff() < 1e-9);

  Demonstration no_jac = demo.demos.front();
  no_jac.jacobians.clear();
  CHECK_THROWS_AS(project_demo(no_jac, bimanual_candidates()), std::invalid_argument);
}

TEST_CASE("compatible references make both hierarchy projections agree") {
  // Static targets chosen inside the jointly reachable set: after the
  // controller settles, the desired velocities stay tiny and every candidate
  // hierarchy maps them to the same task-space motion.
  const RobotPreset robot = preset("bimanual5");
  const Eigen::Vector2d left_goal(-0.75, 0.9), right_goal(0.75, 0.9);
  ReferenceProgram program;
  program.horizon = 8.0;
  program.tasks.push_back(RefSignal::constant(left_goal));
  program.tasks.push_back(RefSignal::constant(right_goal));
  PriorityDemoOptions opts;
  const PriorityDemoResult demo = generate_priority_demos(
      robot, Hierarchy{{0, 1}, "left_first"}, program,
      bimanual_position_observer(robot.chain), opts);
  const std::vector<Eigen::MatrixXd> X =
      project_demo(demo.demos.front(), bimanual_candidates());
  const int settle = 200;
  const int n = static_cast<int>(X[0].rows());
  CHECK((X[0].bottomRows(n - settle) - X[1].bottomRows(n - settle)).cwiseAbs().maxCoeff() <
        1e-6);
}

TEST_CASE("strict-hierarchy demos leave the demonstrated frame tight") {
  const PriorityDemoResult demo = left_priority_demo();
  REQUIRE(demo.conflict_observed);
  const std::vector<Eigen::MatrixXd> X =
      project_demo(demo.demos.front(), bimanual_candidates());
  Eigen::VectorXd var[2];
  for (int j = 0; j < 2; ++j) {
    const Eigen::RowVectorXd mean = X[j].colwise().mean();
    var[j] = (X[j].rowwise() - mean).array().square().colwise().mean().transpose();
  }
  // Every dimension of the demonstrated (left) projection is far tighter.
  CHECK((var[0].array() / var[1].array()).maxCoeff() < 1e-2);
}

TEST_CASE("fit_priority_model with K=1 keeps sample statistics per frame") {
  const PriorityDemoResult demo = left_priority_demo();
  const std::vector<Hierarchy> candidates = bimanual_candidates();
  const PriorityModel model = fit_priority_model(demo.demos, candidates, 1);

  const std::vector<Eigen::MatrixXd> X = project_demo(demo.demos.front(), candidates);
  for (int j = 0; j < 2; ++j) {
    const int n = static_cast<int>(X[j].rows());
    Eigen::MatrixXd joint(n, 1 + X[j].cols());
    joint.col(0) = demo.demos.front().times;
    joint.rightCols(X[j].cols()) = X[j];
    const Eigen::RowVectorXd mean = joint.colwise().mean();
    const Eigen::MatrixXd centered = joint.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / n;
    CHECK((model.model.components[0][j].mean.transpose() - mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((model.model.components[0][j].cov - cov).cwiseAbs().maxCoeff() < 1e-6);
  }

  // Left-priority demos leave the left-hierarchy frame much tighter.
  const double trace_left = model.model.components[0][0].cov.bottomRightCorner(4, 4).trace();
  const double trace_right = model.model.components[0][1].cov.bottomRightCorner(4, 4).trace();
  CHECK(trace_right / trace_left > 10.0);
}

TEST_CASE("swapped demos swap which frame is tight") {
  const RobotPreset robot = preset("bimanual5");
  const ReferenceProgram program = bimanual_sweep_program(
      robot, 20.0, {-1.25, 0.55}, {1.25, 0.55}, 3.0, 17.0);
  PriorityDemoOptions opts;
  const PriorityDemoResult demo = generate_priority_demos(
      robot, Hierarchy{{1, 0}, "right_first"}, program,
      bimanual_position_observer(robot.chain), opts);
  const PriorityModel model = fit_priority_model(demo.demos, bimanual_candidates(), 1);
  const double trace_left = model.model.components[0][0].cov.bottomRightCorner(4, 4).trace();
  const double trace_right = model.model.components[0][1].cov.bottomRightCorner(4, 4).trace();
  CHECK(trace_left / trace_right > 10.0);
}

TEST_CASE("hierarchy precision") {
  const Eigen::MatrixXd I5 = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd gamma = hierarchy_precision(I5, I5);
  CHECK((gamma - I5).cwiseAbs().maxCoeff() < 2e-3);  // identity up to the ridge

  const Eigen::MatrixXd tight = hierarchy_precision(I5, 1e-6 * I5);
  const Eigen::MatrixXd loose = hierarchy_precision(I5, I5);
  CHECK(tight(0, 0) / loose(0, 0) == doctest::Approx(1e6).epsilon(5e-3));

  bool regularized = false;
  const Eigen::MatrixXd wide = random_mat(5, 4);
  hierarchy_precision(wide, Eigen::MatrixXd::Identity(4, 4), 1e-8, &regularized);
  CHECK(regularized);
}

TEST_CASE("soft weighted step") {
  const int nq = 4;
  const Eigen::VectorXd qa = random_vec(nq);
  const Eigen::VectorXd qb = random_vec(nq);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nq, nq);

  CHECK((soft_weighted_step({{qa, I}}) - qa).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((soft_weighted_step({{qa, I}, {qb, I}}) - 0.5 * (qa + qb)).cwiseAbs().maxCoeff() <
        1e-12);

  // A dominant candidate wins at gamma ratio 1e9.
  const Eigen::VectorXd out = soft_weighted_step({{qa, 1e9 * I}, {qb, I}});
  CHECK((out - qa).cwiseAbs().maxCoeff() < 1e-6 * qa.cwiseAbs().maxCoeff());

  // Invariance to a common positive scaling.
  Eigen::MatrixXd ga = random_mat(nq, nq);
  ga = ga * ga.transpose() + I;
  Eigen::MatrixXd gb = random_mat(nq, nq);
  gb = gb * gb.transpose() + I;
  const Eigen::VectorXd u1 = soft_weighted_step({{qa, ga}, {qb, gb}});
  const Eigen::VectorXd u2 = soft_weighted_step({{qa, 1e4 * ga}, {qb, 1e4 * gb}});
  CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-12 * u1.cwiseAbs().maxCoeff() + 1e-15);
}

TEST_CASE("manual scalar weights reproduce the transition-study controller") {
  // Gamma = w I turns the fusion into a convex combination of candidates.
  const int nq = 3;
  const Eigen::VectorXd qa = random_vec(nq);
  const Eigen::VectorXd qb = random_vec(nq);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nq, nq);
  for (double w : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const Eigen::VectorXd out = soft_weighted_step({{qa, w * I}, {qb, (1.0 - w) * I}});
    CHECK((out - (w * qa + (1.0 - w) * qb)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("synthesized priorities track the demonstrated side under conflict") {
  const RobotPreset robot = preset("bimanual5");
  const PriorityDemoResult demo = left_priority_demo();
  const PriorityModel model = fit_priority_model(demo.demos, bimanual_candidates(), 1);

  PrioritySynthesisOptions opts;
  opts.steps = 1000;
  opts.gain = 4.0;
  ReferenceProvider refs = [](double) {
    return std::vector<Eigen::VectorXd>{Eigen::Vector2d(-1.25, 0.55),
                                        Eigen::Vector2d(1.25, 0.55)};
  };
  const PriorityTrace trace = synthesize_priority(
      model, bimanual_position_observer(robot.chain), refs, robot.q_init, opts);
  CHECK(trace.task_error.col(0).tail(100).maxCoeff() < 1e-3);
  CHECK(trace.task_error.col(1).tail(100).minCoeff() > 0.1);
  // The learned left-first frame carries the dominant precision throughout.
  CHECK(trace.gamma_trace.col(0).minCoeff() > 10.0 * trace.gamma_trace.col(1).maxCoeff());
}
