#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tplearn/gaussians.hpp"

namespace tpl {

// Affine task parameters (A, b) of one candidate frame. A maps the frame's
// local space into the common synthesis space and may be non-square.
struct TaskFrame {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::string label;
};

// Extends a frame with identity blocks for leading input dimensions (time)
// that are not modulated by the task parameterization.
TaskFrame with_time_dims(const TaskFrame& frame, int n_time = 1);

struct TpGmm {
  Eigen::VectorXd priors;
  std::vector<std::string> frames;
  std::vector<std::vector<Gaussian>> components;  // [component][frame]

  int num_components() const { return static_cast<int>(components.size()); }
  int num_frames() const { return static_cast<int>(frames.size()); }
  int frame_dim(int j) const { return components.front()[j].dim(); }
};

// Time-indexed records of one demonstration plus the per-step context needed
// to rebuild frames (joint state, task-space state, per-task Jacobians,
// object pose). Consumers only require the fields their projection needs.
struct Demonstration {
  Eigen::VectorXd times;                              // N, strictly increasing
  Eigen::MatrixXd xi;                                 // N x D datapoints
  Eigen::MatrixXd joints;                             // N x Nq
  Eigen::MatrixXd task_state;                         // N x (stacked task dims)
  Eigen::MatrixXd references;                         // N x (stacked task dims)
  std::vector<std::vector<Eigen::MatrixXd>> jacobians;  // [step][task]
  Eigen::VectorXd object_pose;                        // e.g. planar [px, py, angle]

  int length() const { return static_cast<int>(times.size()); }
  void validate() const;
};

enum class ProjectionMode { kInverseAffine, kForwardLinear };

using FrameBuilder =
    std::function<std::vector<TaskFrame>(const Demonstration& demo, int step)>;

// Observes every demonstration datapoint from each candidate frame:
// inverse-affine X = A^-1 (xi - b) (truncated pseudoinverse when A is not
// invertible, reported through used_fallback), forward-linear X = A xi.
std::vector<Eigen::MatrixXd> project_to_frames(const std::vector<Demonstration>& demos,
                                               const FrameBuilder& builder,
                                               ProjectionMode mode,
                                               bool* used_fallback = nullptr);

struct TpgmmFit {
  TpGmm model;
  std::vector<double> loglik_trace;
  bool converged = true;
};

// EM with responsibilities shared across frames; frame datasets may have
// different dimensionality but must agree on the datapoint count.
TpgmmFit tpgmm_fit(const std::vector<Eigen::MatrixXd>& frame_datasets, int K,
                   const EmOptions& opts = {},
                   const std::vector<std::string>& labels = {});

// New mixture in the common space: component i is the Gaussian product over
// frames of the affinely transformed per-frame components. Singular
// transformed covariances (non-square A) enter the product through
// regularized precisions.
Gmm synthesize(const TpGmm& model, const std::vector<TaskFrame>& frames_now);

using SynthesisFrameBuilder =
    std::function<std::vector<TaskFrame>(double t, const Eigen::VectorXd& q)>;

struct ReproduceOptions {
  int steps = 0;
  double dt = 0.01;
  double t0 = 0.0;
};

struct ReproduceTrace {
  Eigen::VectorXd times;                        // steps
  Eigen::MatrixXd reference;                    // steps x out-dim, product reference
  std::vector<Eigen::MatrixXd> frame_reference; // per frame candidate means
  std::vector<Eigen::MatrixXd> frame_variance;  // per frame candidate variance diagonals
  Eigen::MatrixXd variance_trace;               // steps x P, tr of candidate covariance
};

// Movement synthesis loop: rebuild frames from the current state, synthesize,
// condition on time, command the resulting reference to an ideal
// position-controlled robot (q follows the reference each step).
ReproduceTrace reproduce(const TpGmm& model, const SynthesisFrameBuilder& builder,
                         const Eigen::VectorXd& q0, const ReproduceOptions& opts);

}  // namespace tpl
