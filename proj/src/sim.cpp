#include "tplearn/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tplearn/operators.hpp"

namespace tpl {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Matrix2d rot2(double a) {
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

// Damped Newton iteration onto a position target; used to seed demo start
// configurations deterministically.
Eigen::VectorXd solve_position_ik(const SerialChain& chain, const Eigen::VectorXd& q0,
                                  const Eigen::Vector2d& target) {
  Eigen::VectorXd q = q0;
  for (int iter = 0; iter < 300; ++iter) {
    const Pose pose = forward_kinematics(chain, q);
    const Eigen::Vector2d err = target - Eigen::Vector2d(pose.position);
    if (err.norm() < 1e-12) break;
    const Eigen::MatrixXd J = geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kPosition);
    q += pseudoinverse(J, 1e-8) * err;
  }
  return q;
}

std::vector<int> shared_joints(const SerialChain& chain) {
  const std::vector<int> left = chain.branch_joints(Branch::kLeft);
  const std::vector<int> right = chain.branch_joints(Branch::kRight);
  std::vector<int> shared;
  for (int i : left) {
    for (int j : right) {
      if (i == j) shared.push_back(i);
    }
  }
  return shared;
}

struct ArmGeometry {
  std::vector<double> lengths;
  double reach_out = 0.0;
  double reach_in = 0.0;
};

ArmGeometry arm_geometry(const SerialChain& chain, Branch branch, int shared) {
  ArmGeometry g;
  double sum = 0.0, longest = 0.0;
  for (int idx : chain.branch_joints(branch)) {
    if (idx == shared) continue;
    const double l = chain.link_lengths()[idx];
    g.lengths.push_back(l);
    sum += l;
    longest = std::max(longest, l);
  }
  g.reach_out = sum;
  g.reach_in = std::max(0.0, 2.0 * longest - sum);
  return g;
}

}  // namespace

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

RobotPreset preset(const std::string& name) {
  RobotPreset r;
  r.name = name;
  if (name == "planar3") {
    r.chain = SerialChain::planar({1.0, 1.0, 1.0});
    r.q_init = Eigen::Vector3d(kPi / 2 + 0.5, -1.0, -kPi / 2 + 0.5);
    r.notes = "three unit links; workspace radius 3";
  } else if (name == "planar3_alt") {
    r.chain = SerialChain::planar({0.8, 1.1, 0.9});
    r.q_init = Eigen::Vector3d(kPi / 2 + 0.5, -1.0, -kPi / 2 + 0.5);
    r.notes = "uneven links for cross-checks";
  } else if (name == "bimanual5") {
    r.chain = SerialChain::planar_branched({0.5, 0.6, 0.6, 0.6, 0.6},
                                           Branches{{0, 1, 2}, {0, 3, 4}});
    r.q_init = (Eigen::VectorXd(5) << kPi / 2, 0.7, 0.6, -0.7, -0.6).finished();
    r.notes = "shared torso joint, two 2-link arms; per-arm reach 1.2";
  } else if (name == "bimanual7") {
    r.chain = SerialChain::planar_branched({0.4, 0.5, 0.4, 0.35, 0.5, 0.4, 0.35},
                                           Branches{{0, 1, 2, 3}, {0, 4, 5, 6}});
    r.q_init = (Eigen::VectorXd(7) << kPi / 2, 0.7, 0.4, 0.3, -0.7, -0.4, -0.3).finished();
    r.notes = "shared torso joint, two 3-link arms; per-arm reach 1.25";
  } else if (name == "spatial6") {
    const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
    const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    r.chain = SerialChain::spatial({{z, Eigen::Vector3d(0, 0, 0.3)},
                                    {y, Eigen::Vector3d(0.4, 0, 0)},
                                    {y, Eigen::Vector3d(0.4, 0, 0)},
                                    {z, Eigen::Vector3d(0.2, 0, 0)},
                                    {y, Eigen::Vector3d(0.2, 0, 0)},
                                    {x, Eigen::Vector3d(0.15, 0, 0)}});
    r.q_init = Eigen::VectorXd::Zero(6);
    r.notes = "six-revolute chain for spatial operator tests";
  } else {
    throw std::invalid_argument("unknown robot preset: " + name);
  }
  return r;
}

RefSignal RefSignal::constant(const Eigen::VectorXd& value) {
  RefSignal s;
  s.kind_ = Kind::kConstant;
  s.a_ = value;
  return s;
}

RefSignal RefSignal::ramp(const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                          double t0, double t1) {
  if (!(t1 > t0)) {
    throw std::invalid_argument("RefSignal::ramp: t1 must exceed t0");
  }
  RefSignal s;
  s.kind_ = Kind::kRamp;
  s.a_ = from;
  s.b_ = to;
  s.t0_ = t0;
  s.t1_ = t1;
  return s;
}

RefSignal RefSignal::sinusoid(const Eigen::VectorXd& center, const Eigen::VectorXd& amplitude,
                              double freq_hz, double t0) {
  RefSignal s;
  s.kind_ = Kind::kSinusoid;
  s.a_ = center;
  s.b_ = amplitude;
  s.freq_ = freq_hz;
  s.t0_ = t0;
  return s;
}

Eigen::VectorXd RefSignal::at(double t) const {
  switch (kind_) {
    case Kind::kConstant:
      return a_;
    case Kind::kRamp: {
      const double u = std::clamp((t - t0_) / (t1_ - t0_), 0.0, 1.0);
      return a_ + u * (b_ - a_);
    }
    case Kind::kSinusoid:
      return a_ + b_ * std::sin(2.0 * kPi * freq_ * (t - t0_));
  }
  return a_;
}

std::vector<Eigen::VectorXd> ReferenceProgram::at(double t) const {
  std::vector<Eigen::VectorXd> refs;
  refs.reserve(tasks.size());
  for (const auto& s : tasks) refs.push_back(s.at(t));
  return refs;
}

TaskObserver bimanual_position_observer(const SerialChain& chain) {
  return [chain](const Eigen::VectorXd& q, std::vector<Eigen::MatrixXd>* jacobians,
                 std::vector<Eigen::VectorXd>* positions) {
    jacobians->clear();
    positions->clear();
    for (Branch b : {Branch::kLeft, Branch::kRight}) {
      jacobians->push_back(geometric_jacobian(chain, q, b, JacobianKind::kPosition));
      positions->push_back(forward_kinematics(chain, q, b).position);
    }
  };
}

TaskObserver planar_upright_observer(const SerialChain& chain) {
  return [chain](const Eigen::VectorXd& q, std::vector<Eigen::MatrixXd>* jacobians,
                 std::vector<Eigen::VectorXd>* positions) {
    jacobians->clear();
    positions->clear();
    const Pose pose = forward_kinematics(chain, q);
    const Eigen::MatrixXd Jp = geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kPosition);
    jacobians->push_back(Jp.row(1));  // vertical coordinate only
    Eigen::VectorXd y(1);
    y << pose.position(1);
    positions->push_back(y);
    jacobians->push_back(geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kOrientation));
    Eigen::VectorXd a(1);
    a << pose.angle;
    positions->push_back(a);
  };
}

ReferenceProgram bimanual_sweep_program(const RobotPreset& robot, double horizon,
                                        const Eigen::Vector2d& left_goal,
                                        const Eigen::Vector2d& right_goal,
                                        double sweep_start, double sweep_end) {
  const Eigen::Vector2d left0 = forward_kinematics(robot.chain, robot.q_init, Branch::kLeft).position;
  const Eigen::Vector2d right0 = forward_kinematics(robot.chain, robot.q_init, Branch::kRight).position;
  ReferenceProgram program;
  program.horizon = horizon;
  program.tasks.push_back(RefSignal::ramp(left0, left_goal, sweep_start, sweep_end));
  program.tasks.push_back(RefSignal::ramp(right0, right_goal, sweep_start, sweep_end));
  return program;
}

PriorityDemoResult generate_priority_demos(const RobotPreset& robot,
                                           const Hierarchy& hierarchy,
                                           const ReferenceProgram& program,
                                           const TaskObserver& observe,
                                           const PriorityDemoOptions& opts) {
  const int steps = static_cast<int>(std::lround(program.horizon / opts.dt));
  const int nq = robot.chain.dof();
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> jitter(0.0, 0.02);

  PriorityDemoResult result;
  for (int d = 0; d < opts.n_demos; ++d) {
    // Later demos see slightly displaced targets, like repeated human demos.
    std::vector<Eigen::VectorXd> offsets;
    Eigen::VectorXd q = robot.q_init;
    Demonstration demo;
    demo.times.resize(steps);
    demo.joints.resize(steps, nq);
    demo.jacobians.resize(steps);

    bool top_ok = false, other_blocked = false;
    for (int step = 0; step < steps; ++step) {
      const double t = step * opts.dt;
      std::vector<Eigen::MatrixXd> jacobians;
      std::vector<Eigen::VectorXd> positions;
      observe(q, &jacobians, &positions);
      std::vector<Eigen::VectorXd> refs = program.at(t);
      if (offsets.empty()) {
        for (const auto& r : refs) {
          Eigen::VectorXd off = Eigen::VectorXd::Zero(r.size());
          if (d > 0) {
            for (int i = 0; i < off.size(); ++i) off(i) = jitter(rng);
          }
          offsets.push_back(off);
        }
      }
      const int n_tasks = static_cast<int>(jacobians.size());
      int S = 0;
      for (const auto& J : jacobians) S += static_cast<int>(J.rows());
      if (demo.xi.size() == 0) {
        demo.xi.resize(steps, S);
        demo.task_state.resize(steps, S);
        demo.references.resize(steps, S);
      }

      std::vector<TaskVelocity> tasks(n_tasks);
      int at = 0;
      double err_min = std::numeric_limits<double>::max();
      double err_max = 0.0;
      for (int i = 0; i < n_tasks; ++i) {
        refs[i] += offsets[i];
        const Eigen::VectorXd e = refs[i] - positions[i];
        tasks[i].jacobian = jacobians[i];
        tasks[i].xdot = opts.gain * e;
        demo.xi.row(step).segment(at, e.size()) = e.transpose();
        demo.task_state.row(step).segment(at, e.size()) = positions[i].transpose();
        demo.references.row(step).segment(at, e.size()) = refs[i].transpose();
        at += static_cast<int>(e.size());
        err_min = std::min(err_min, e.norm());
        err_max = std::max(err_max, e.norm());
      }
      if (err_min < 1e-2 && err_max > 0.1) {
        top_ok = true;
        other_blocked = true;
      }
      demo.times(step) = t;
      demo.joints.row(step) = q.transpose();
      demo.jacobians[step] = jacobians;

      q += strict_hierarchy_step(tasks, hierarchy.order, opts.damping) * opts.dt;
    }
    result.conflict_observed = result.conflict_observed || (top_ok && other_blocked);
    result.demos.push_back(std::move(demo));
  }
  return result;
}

SpacesDemoResult generate_spaces_demos(const RobotPreset& robot, const SpacesDemoOptions& opts) {
  const SerialChain& chain = robot.chain;
  if (chain.type() != ChainType::kPlanar || chain.dof() < 3) {
    throw std::invalid_argument("generate_spaces_demos: expects a planar chain");
  }
  const int nq = chain.dof();
  const int steps = static_cast<int>(std::lround(opts.horizon() / opts.dt));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  SpacesDemoResult result;
  result.sufficient_for_covariance = opts.n_demos >= 2;
  result.object_spread_degenerate = opts.object_spread.norm() < 1e-12;

  const Eigen::VectorXd q_nominal =
      (Eigen::VectorXd(nq) << 2.0, -0.9, -0.6).finished().head(nq);

  for (int d = 0; d < opts.n_demos; ++d) {
    Eigen::Vector3d obj = opts.object_nominal;
    for (int i = 0; i < 3; ++i) obj(i) += uni(rng) * opts.object_spread(i);

    const Eigen::Matrix2d R = rot2(obj(2));
    const Eigen::Vector2d p = obj.head<2>();
    const Eigen::Vector2d start = p + R * opts.approach_offset;
    Eigen::VectorXd q = solve_position_ik(chain, q_nominal, start);
    const Eigen::VectorXd q_start = q;

    Demonstration demo;
    demo.times.resize(steps);
    demo.joints.resize(steps, nq);
    demo.task_state.resize(steps, 2);
    demo.object_pose = obj;

    double q1_grasp = 0.0;
    Eigen::VectorXd q_grasp = q;
    bool grasp_latched = false;

    for (int step = 0; step < steps; ++step) {
      const double t = step * opts.dt;
      if (t < opts.reach_duration) {
        const double u = t / opts.reach_duration;
        const double s = 1.0 - (3.0 * u * u - 2.0 * u * u * u);
        const Eigen::Vector2d ref = p + R * (opts.approach_offset * s);
        const Pose pose = forward_kinematics(chain, q);
        const Eigen::MatrixXd J =
            geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kPosition);
        q += pseudoinverse(J, opts.damping) * (opts.gain * (ref - Eigen::Vector2d(pose.position))) * opts.dt;
      } else {
        if (!grasp_latched) {
          q_grasp = q;
          q1_grasp = q(0);
          grasp_latched = true;
        }
        Eigen::VectorXd q_ref = q_grasp;
        const double tb = t - opts.reach_duration;
        if (tb < opts.blend_duration) {
          const double u = tb / opts.blend_duration;
          const double s = 3.0 * u * u - 2.0 * u * u * u;
          q_ref(0) = q1_grasp + s * (opts.osc_center - q1_grasp);
        } else {
          const double to = tb - opts.blend_duration;
          q_ref(0) = opts.osc_center +
                     opts.osc_amplitude * std::sin(2.0 * kPi * opts.osc_freq * to);
        }
        q = q_ref;
      }

      Eigen::VectorXd q_exec = q;
      if (opts.joint_noise > 0.0) {
        for (int i = 0; i < nq; ++i) q_exec(i) += opts.joint_noise * noise(rng);
      }
      demo.times(step) = t;
      demo.joints.row(step) = q_exec.transpose();
      demo.task_state.row(step) =
          forward_kinematics(chain, q_exec).position.transpose();
    }
    (void)q_start;
    result.demos.push_back(std::move(demo));
  }
  return result;
}

SpacesVarianceReport spaces_variance_report(const std::vector<Demonstration>& demos,
                                            const SpacesDemoOptions& opts) {
  if (demos.size() < 2) {
    throw std::invalid_argument("spaces_variance_report: needs at least two demos");
  }
  const int n = demos.front().length();
  const int nq = static_cast<int>(demos.front().joints.cols());
  const int m = static_cast<int>(demos.size());
  const int reach_end = static_cast<int>(std::lround(opts.reach_duration / opts.dt)) - 1;
  const int osc_begin =
      static_cast<int>(std::lround((opts.reach_duration + opts.blend_duration) / opts.dt));

  auto object_frame_ee = [&](const Demonstration& d, int t) -> Eigen::Vector2d {
    const Eigen::Matrix2d R = rot2(d.object_pose(2));
    return R.transpose() *
           (Eigen::Vector2d(d.task_state.row(t).transpose()) - Eigen::Vector2d(d.object_pose.head<2>()));
  };

  auto across_demo_var = [&](int t, auto&& getter, int dims) -> Eigen::VectorXd {
    Eigen::MatrixXd vals(m, dims);
    for (int i = 0; i < m; ++i) vals.row(i) = getter(demos[i], t).transpose();
    const Eigen::RowVectorXd mean = vals.colwise().mean();
    return ((vals.rowwise() - mean).array().square().colwise().sum() / m)
        .matrix()
        .transpose();
  };

  SpacesVarianceReport report;
  report.reach_end_object_var =
      across_demo_var(reach_end, object_frame_ee, 2).maxCoeff();

  auto joints_at = [&](const Demonstration& d, int t) -> Eigen::VectorXd {
    return d.joints.row(t).transpose();
  };

  double osc_j1 = 0.0, osc_obj = 0.0;
  for (int t = osc_begin; t < n; ++t) {
    osc_j1 = std::max(osc_j1, across_demo_var(t, joints_at, nq)(0));
    osc_obj = std::max(osc_obj, across_demo_var(t, object_frame_ee, 2).maxCoeff());
  }
  report.osc_joint1_var = osc_j1;
  report.osc_object_var = osc_obj;

  double reach_cfg = 0.0;
  for (int t = 0; t < reach_end; ++t) {
    reach_cfg = std::max(reach_cfg, across_demo_var(t, joints_at, nq).maxCoeff());
  }
  report.reach_config_var = reach_cfg;
  return report;
}

TpgmmFit fit_spaces_model(const std::vector<Demonstration>& demos, int K, std::uint64_t seed) {
  // Frame 0 observes (t, EE position in the object frame); frame 1 observes
  // (t, joints). Both are inverse-affine views of the recorded states.
  std::vector<Demonstration> op_view = demos;
  std::vector<Demonstration> cfg_view = demos;
  for (size_t i = 0; i < demos.size(); ++i) {
    const int n = demos[i].length();
    op_view[i].xi.resize(n, 3);
    op_view[i].xi.col(0) = demos[i].times;
    op_view[i].xi.rightCols(2) = demos[i].task_state;
    cfg_view[i].xi.resize(n, 1 + demos[i].joints.cols());
    cfg_view[i].xi.col(0) = demos[i].times;
    cfg_view[i].xi.rightCols(demos[i].joints.cols()) = demos[i].joints;
  }

  FrameBuilder object_frame = [](const Demonstration& demo, int /*step*/) {
    TaskFrame f;
    f.A = rot2(demo.object_pose(2));
    f.b = demo.object_pose.head<2>();
    f.label = "object";
    return std::vector<TaskFrame>{with_time_dims(f)};
  };
  FrameBuilder config_frame = [](const Demonstration& demo, int /*step*/) {
    const int nq = static_cast<int>(demo.joints.cols());
    TaskFrame f = op_configuration(nq);
    f.label = "config";
    return std::vector<TaskFrame>{with_time_dims(f)};
  };

  const Eigen::MatrixXd X_op =
      project_to_frames(op_view, object_frame, ProjectionMode::kInverseAffine)[0];
  const Eigen::MatrixXd X_cfg =
      project_to_frames(cfg_view, config_frame, ProjectionMode::kInverseAffine)[0];

  EmOptions opts;
  opts.seed = seed;
  return tpgmm_fit({X_op, X_cfg}, K, opts, {"object", "config"});
}

SpacesReproduceResult reproduce_spaces(const TpGmm& model, const RobotPreset& robot,
                                       const Eigen::Vector3d& object_pose,
                                       const Eigen::VectorXd& q0, double dt, int steps) {
  const SerialChain chain = robot.chain;
  SynthesisFrameBuilder builder = [chain, object_pose](double /*t*/, const Eigen::VectorXd& q) {
    const Pose pose = forward_kinematics(chain, q);
    RobotContext ctx;
    ctx.planar = true;
    ctx.kind = JacobianKind::kPosition;
    ctx.q_prev = q;
    ctx.x_prev = pose.position;
    ctx.angle_prev = pose.angle;
    ctx.jacobian = geometric_jacobian(chain, q, Branch::kMain, JacobianKind::kPosition);
    ctx.damping = 1e-6;
    ObjectPose obj;
    obj.position = object_pose.head<2>();
    obj.angle = object_pose(2);
    ctx.object = obj;
    return std::vector<TaskFrame>{with_time_dims(op_relative_pose(ctx)),
                                  with_time_dims(op_configuration(chain.dof()))};
  };

  ReproduceOptions opts;
  opts.steps = steps;
  opts.dt = dt;
  SpacesReproduceResult result;
  result.trace = reproduce(model, builder, q0, opts);

  result.ee.resize(steps, 2);
  result.frame_ee.assign(model.num_frames(), Eigen::MatrixXd(steps, 2));
  for (int t = 0; t < steps; ++t) {
    result.ee.row(t) =
        forward_kinematics(chain, result.trace.reference.row(t).transpose()).position.transpose();
    for (int j = 0; j < model.num_frames(); ++j) {
      result.frame_ee[j].row(t) =
          forward_kinematics(chain, result.trace.frame_reference[j].row(t).transpose())
              .position.transpose();
    }
  }
  return result;
}

TransitionStudyResult run_transition_study(const RobotPreset& robot,
                                           const TransitionStudyOptions& opts) {
  const SerialChain& chain = robot.chain;
  const int nq = chain.dof();
  const int pair_steps = static_cast<int>(std::lround(opts.pair_duration / opts.dt));
  TaskObserver observe = planar_upright_observer(chain);

  TransitionStudyResult result;
  result.weights.resize(opts.weight_points, 2);
  result.errors.resize(opts.weight_points, 2);
  result.q_ends.resize(opts.weight_points, nq);

  Eigen::VectorXd q = robot.q_init;
  for (int i = 0; i < opts.weight_points; ++i) {
    const double w_pos = opts.weight_points == 1
                             ? 0.0
                             : static_cast<double>(i) / (opts.weight_points - 1);
    const double w_or = 1.0 - w_pos;
    for (int step = 0; step < pair_steps; ++step) {
      std::vector<Eigen::MatrixXd> jacobians;
      std::vector<Eigen::VectorXd> positions;
      observe(q, &jacobians, &positions);
      Eigen::VectorXd xdot(2);
      xdot << opts.gain * (opts.y_ref - positions[0](0)),
          opts.gain * wrap_angle(opts.angle_ref - positions[1](0));

      const Eigen::MatrixXd A_pos = hierarchy_matrix(jacobians, {0, 1}, opts.damping);
      const Eigen::MatrixXd A_or = hierarchy_matrix(jacobians, {1, 0}, opts.damping);
      std::vector<WeightedCandidate> candidates(2);
      candidates[0].qdot = A_or * xdot;
      candidates[0].gamma = w_or * Eigen::MatrixXd::Identity(nq, nq);
      candidates[1].qdot = A_pos * xdot;
      candidates[1].gamma = w_pos * Eigen::MatrixXd::Identity(nq, nq);
      q += soft_weighted_step(candidates) * opts.dt;
    }
    std::vector<Eigen::MatrixXd> jacobians;
    std::vector<Eigen::VectorXd> positions;
    observe(q, &jacobians, &positions);
    result.weights.row(i) << w_or, w_pos;
    result.errors(i, 0) = std::abs(wrap_angle(opts.angle_ref - positions[1](0)));
    result.errors(i, 1) = std::abs(opts.y_ref - positions[0](0));
    result.q_ends.row(i) = q.transpose();
  }
  return result;
}

BimanualReachability bimanual_reachability(const SerialChain& chain,
                                           const Eigen::Vector2d& left_target,
                                           const Eigen::Vector2d& right_target,
                                           int samples) {
  if (!chain.has_branches()) {
    throw std::invalid_argument("bimanual_reachability: chain has no branches");
  }
  const std::vector<int> shared = shared_joints(chain);
  if (shared.size() != 1) {
    throw std::invalid_argument("bimanual_reachability: expects exactly one shared joint");
  }
  const double torso_len = chain.link_lengths()[shared[0]];
  const ArmGeometry left = arm_geometry(chain, Branch::kLeft, shared[0]);
  const ArmGeometry right = arm_geometry(chain, Branch::kRight, shared[0]);
  const Eigen::Vector2d base = chain.base_pose().position.size() == 2
                                   ? Eigen::Vector2d(chain.base_pose().position)
                                   : Eigen::Vector2d::Zero();

  auto reachable = [](const ArmGeometry& g, double dist) {
    return dist <= g.reach_out && dist >= g.reach_in;
  };

  BimanualReachability r;
  for (int i = 0; i < samples; ++i) {
    const double a = chain.base_pose().angle - kPi + 2.0 * kPi * i / samples;
    const Eigen::Vector2d shoulder = base + torso_len * Eigen::Vector2d(std::cos(a), std::sin(a));
    const bool lk = reachable(left, (left_target - shoulder).norm());
    const bool rk = reachable(right, (right_target - shoulder).norm());
    r.left_alone = r.left_alone || lk;
    r.right_alone = r.right_alone || rk;
    r.both = r.both || (lk && rk);
  }
  return r;
}

}  // namespace tpl
