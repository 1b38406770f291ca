#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tplearn/tpgmm.hpp"

namespace tpl {

// One candidate strict hierarchy: a priority permutation of the task indices
// (highest priority first).
struct Hierarchy {
  std::vector<int> order;
  std::string label;
};

// A = [J1^+  N1 J2^+  N1 N2 J3^+ ...], blocks placed at each task's column
// slot in the stacked task-velocity vector, priority following `order`.
Eigen::MatrixXd hierarchy_matrix(const std::vector<Eigen::MatrixXd>& task_jacobians,
                                 const std::vector<int>& order, double damping = 0.0);

// X_t^(j) = Jbar_t A_t^(j) xi_t for every candidate hierarchy: the task-space
// velocities each candidate would have produced for the demonstrated desired
// velocities. Requires per-step task Jacobians in the demonstration.
std::vector<Eigen::MatrixXd> project_demo(const Demonstration& demo,
                                          const std::vector<Hierarchy>& hierarchies,
                                          double damping = 0.0);

struct PriorityModel {
  TpGmm model;                       // frame j encodes (t, X^(j))
  std::vector<Hierarchy> hierarchies;
  std::vector<int> task_dims;
  double gain = 1.0;                 // K_p used when recording xi
};

// Algorithm: project demonstrations through every candidate hierarchy and fit
// one TP-GMM over (time, projected velocities) with shared responsibilities.
PriorityModel fit_priority_model(const std::vector<Demonstration>& demos,
                                 const std::vector<Hierarchy>& hierarchies, int K,
                                 double damping = 0.0, std::uint64_t seed = 0);

// Gamma = (A Sigma A^T + reg I)^-1 with reg = reg_factor * trace / Nq (an
// absolute floor covers a zero trace). The ridge makes the sandwich invertible
// when A is rank-deficient (flagged through `regularized`) and caps how much
// weight one hierarchy can claim through near-null covariance directions.
Eigen::MatrixXd hierarchy_precision(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma,
                                    double reg_factor = 1e-3, bool* regularized = nullptr);

struct WeightedCandidate {
  Eigen::VectorXd qdot;
  Eigen::MatrixXd gamma;
};

// qdot = (sum Gamma_j)^-1 sum Gamma_j qdot_j; the Gaussian-product fusion of
// the candidate joint velocities.
Eigen::VectorXd soft_weighted_step(const std::vector<WeightedCandidate>& candidates,
                                   bool* regularized = nullptr);

// Fills per-task Jacobians and end-effector positions at q.
using TaskObserver = std::function<void(const Eigen::VectorXd& q,
                                        std::vector<Eigen::MatrixXd>* jacobians,
                                        std::vector<Eigen::VectorXd>* positions)>;
using ReferenceProvider = std::function<std::vector<Eigen::VectorXd>(double t)>;

struct PrioritySynthesisOptions {
  int steps = 0;
  double dt = 0.01;
  double gain = 1.0;
  double damping = 1e-6;
  double reg_factor = 1e-3;
};

struct PriorityTrace {
  Eigen::VectorXd times;
  Eigen::MatrixXd q;            // steps x Nq
  Eigen::MatrixXd task_error;   // steps x N_T, per-task error norms
  Eigen::MatrixXd gamma_trace;  // steps x P, tr(Gamma_j)
};

// Per step: rebuild A^(j) from the current Jacobians, condition the model on
// time for Sigma^(j), form Gamma^(j) and the candidate qdot^(j) = A^(j) xdot,
// fuse with soft_weighted_step and integrate.
PriorityTrace synthesize_priority(const PriorityModel& model, const TaskObserver& observe,
                                  const ReferenceProvider& references,
                                  const Eigen::VectorXd& q0,
                                  const PrioritySynthesisOptions& opts);

}  // namespace tpl
