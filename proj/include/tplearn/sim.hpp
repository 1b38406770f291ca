#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tplearn/kinematics.hpp"
#include "tplearn/priority.hpp"
#include "tplearn/tpgmm.hpp"

namespace tpl {

struct RobotPreset {
  std::string name;
  SerialChain chain;
  Eigen::VectorXd q_init;
  std::string notes;
};

// planar3, planar3_alt, bimanual5, bimanual7, spatial6. Throws for unknown
// names.
RobotPreset preset(const std::string& name);

double wrap_angle(double a);  // to (-pi, pi]

// Piecewise time-parameterized reference: constant, clamped linear ramp, or
// sinusoid.
class RefSignal {
 public:
  static RefSignal constant(const Eigen::VectorXd& value);
  static RefSignal ramp(const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                        double t0, double t1);
  static RefSignal sinusoid(const Eigen::VectorXd& center, const Eigen::VectorXd& amplitude,
                            double freq_hz, double t0 = 0.0);
  Eigen::VectorXd at(double t) const;

 private:
  enum class Kind { kConstant, kRamp, kSinusoid };
  Kind kind_ = Kind::kConstant;
  Eigen::VectorXd a_, b_;
  double t0_ = 0.0, t1_ = 0.0, freq_ = 0.0;
};

struct ReferenceProgram {
  std::vector<RefSignal> tasks;
  double horizon = 20.0;

  std::vector<Eigen::VectorXd> at(double t) const;
};

// Observers binding a chain to task lists for the priority controllers.
TaskObserver bimanual_position_observer(const SerialChain& chain);
// Single planar chain with task 0 = vertical end-effector position (1-D) and
// task 1 = end-effector orientation; errors are wrapped for the angle task.
TaskObserver planar_upright_observer(const SerialChain& chain);

// Reference program whose targets start on the current end-effector
// positions and sweep apart until only one arm can track.
ReferenceProgram bimanual_sweep_program(const RobotPreset& robot, double horizon,
                                        const Eigen::Vector2d& left_goal,
                                        const Eigen::Vector2d& right_goal,
                                        double sweep_start, double sweep_end);

struct PriorityDemoOptions {
  double dt = 0.01;
  double gain = 80.0;     // tracking gain of the demonstration controller
  double damping = 1e-6;
  int n_demos = 1;
  std::uint64_t seed = 0;
};

struct PriorityDemoResult {
  std::vector<Demonstration> demos;
  bool conflict_observed = false;
};

// Simulates a strict-hierarchy velocity controller tracking the program and
// records q, per-task Jacobians and xi (gain-1 tracking errors) per step.
PriorityDemoResult generate_priority_demos(const RobotPreset& robot,
                                           const Hierarchy& hierarchy,
                                           const ReferenceProgram& program,
                                           const TaskObserver& observe,
                                           const PriorityDemoOptions& opts);

struct SpacesDemoOptions {
  double dt = 0.01;
  double reach_duration = 4.0;
  double blend_duration = 1.0;
  double oscillate_duration = 5.0;
  double gain = 10.0;
  double damping = 1e-6;
  double joint_noise = 0.002;
  double osc_amplitude = 0.4;
  double osc_freq = 0.5;
  double osc_center = 1.5;  // absolute joint-1 center, shared by all demos
  Eigen::Vector3d object_nominal{1.6, 0.9, 0.3};
  Eigen::Vector3d object_spread{0.25, 0.2, 0.4};
  Eigen::Vector2d approach_offset{-0.9, 0.35};
  int n_demos = 10;
  std::uint64_t seed = 0;

  double horizon() const { return reach_duration + blend_duration + oscillate_duration; }
};

struct SpacesDemoResult {
  std::vector<Demonstration> demos;
  bool sufficient_for_covariance = true;
  bool object_spread_degenerate = false;
};

// Reach-then-oscillate demonstrations: differential-IK reach to a sampled
// object pose along a fixed object-frame approach, then an absolute sinusoid
// on joint 1 with the remaining joints held.
SpacesDemoResult generate_spaces_demos(const RobotPreset& robot, const SpacesDemoOptions& opts);

struct SpacesVarianceReport {
  double reach_end_object_var = 0.0;  // across-demo EE variance in the object frame
  double osc_joint1_var = 0.0;        // across-demo joint-1 variance while oscillating
  double reach_config_var = 0.0;      // across-demo joint variance during reach
  double osc_object_var = 0.0;        // across-demo object-frame EE variance while oscillating
};

SpacesVarianceReport spaces_variance_report(const std::vector<Demonstration>& demos,
                                            const SpacesDemoOptions& opts);

// Two-frame model over (time, EE-in-object-frame) and (time, joints).
TpgmmFit fit_spaces_model(const std::vector<Demonstration>& demos, int K,
                          std::uint64_t seed = 0);

struct SpacesReproduceResult {
  ReproduceTrace trace;
  Eigen::MatrixXd ee;                      // steps x 2, FK of the commanded reference
  std::vector<Eigen::MatrixXd> frame_ee;   // FK of each frame's candidate reference
};

SpacesReproduceResult reproduce_spaces(const TpGmm& model, const RobotPreset& robot,
                                       const Eigen::Vector3d& object_pose,
                                       const Eigen::VectorXd& q0, double dt, int steps);

struct TransitionStudyOptions {
  int weight_points = 101;
  double pair_duration = 5.0;
  double dt = 0.01;
  double gain = 4.0;
  double damping = 1e-6;
  double y_ref = 1.1;
  double angle_ref = -1.5707963267948966;  // point downwards
};

struct TransitionStudyResult {
  Eigen::MatrixXd weights;  // points x 2: (w_orient, w_pos), from (1,0) to (0,1)
  Eigen::MatrixXd errors;   // points x 2: (orientation, position) error at pair end
  Eigen::MatrixXd q_ends;   // points x Nq
};

// Sweeps hierarchy weights with Gamma = w I while tracking a vertical
// position and a pointing direction; each pair warm-starts from the previous
// pair's final configuration.
TransitionStudyResult run_transition_study(const RobotPreset& robot,
                                           const TransitionStudyOptions& opts);

struct BimanualReachability {
  bool left_alone = false;
  bool right_alone = false;
  bool both = false;  // some shared-joint angle lets both arms reach
};

// Brute-force sweep over the shared joint with per-arm annulus checks;
// supports chains whose branches share exactly one joint.
BimanualReachability bimanual_reachability(const SerialChain& chain,
                                           const Eigen::Vector2d& left_target,
                                           const Eigen::Vector2d& right_target,
                                           int samples = 3600);

}  // namespace tpl
