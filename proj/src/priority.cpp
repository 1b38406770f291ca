#include "tplearn/priority.hpp"

#include <cmath>
#include <stdexcept>

#include "tplearn/kinematics.hpp"

namespace tpl {

namespace {

constexpr double kAbsRegFloor = 1e-12;
constexpr double kPriorityEmReg = 1e-10;

Eigen::MatrixXd stack_rows(const std::vector<Eigen::MatrixXd>& mats) {
  int rows = 0;
  for (const auto& m : mats) rows += static_cast<int>(m.rows());
  Eigen::MatrixXd out(rows, mats.front().cols());
  int at = 0;
  for (const auto& m : mats) {
    out.middleRows(at, m.rows()) = m;
    at += static_cast<int>(m.rows());
  }
  return out;
}

std::vector<int> column_offsets(const std::vector<Eigen::MatrixXd>& jacobians) {
  std::vector<int> off(jacobians.size() + 1, 0);
  for (size_t i = 0; i < jacobians.size(); ++i) {
    off[i + 1] = off[i] + static_cast<int>(jacobians[i].rows());
  }
  return off;
}

}  // namespace

Eigen::MatrixXd hierarchy_matrix(const std::vector<Eigen::MatrixXd>& task_jacobians,
                                 const std::vector<int>& order, double damping) {
  if (task_jacobians.empty() || order.size() != task_jacobians.size()) {
    throw std::invalid_argument("hierarchy_matrix: order must permute the task list");
  }
  const int nq = static_cast<int>(task_jacobians.front().cols());
  const std::vector<int> off = column_offsets(task_jacobians);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nq, off.back());
  Eigen::MatrixXd N_acc = Eigen::MatrixXd::Identity(nq, nq);
  for (int rank : order) {
    const Eigen::MatrixXd& J = task_jacobians.at(rank);
    if (J.cols() != nq) {
      throw std::invalid_argument("hierarchy_matrix: inconsistent joint dimensions");
    }
    A.middleCols(off[rank], J.rows()) = N_acc * pseudoinverse(J, damping);
    N_acc = N_acc * nullspace_projector(J, damping);
  }
  return A;
}

std::vector<Eigen::MatrixXd> project_demo(const Demonstration& demo,
                                          const std::vector<Hierarchy>& hierarchies,
                                          double damping) {
  demo.validate();
  if (demo.jacobians.size() != static_cast<size_t>(demo.length())) {
    throw std::invalid_argument("project_demo: demonstration has no per-step Jacobians");
  }
  const int n = demo.length();
  const int S = static_cast<int>(demo.xi.cols());
  std::vector<Eigen::MatrixXd> out(hierarchies.size(), Eigen::MatrixXd(n, S));
  for (int t = 0; t < n; ++t) {
    const Eigen::MatrixXd Jbar = stack_rows(demo.jacobians[t]);
    if (Jbar.rows() != S) {
      throw std::invalid_argument("project_demo: xi does not match stacked task dims");
    }
    const Eigen::VectorXd xi_t = demo.xi.row(t).transpose();
    for (size_t j = 0; j < hierarchies.size(); ++j) {
      const Eigen::MatrixXd A = hierarchy_matrix(demo.jacobians[t], hierarchies[j].order, damping);
      out[j].row(t) = (Jbar * A * xi_t).transpose();
    }
  }
  return out;
}

PriorityModel fit_priority_model(const std::vector<Demonstration>& demos,
                                 const std::vector<Hierarchy>& hierarchies, int K,
                                 double damping, std::uint64_t seed) {
  if (demos.empty() || hierarchies.empty()) {
    throw std::invalid_argument("fit_priority_model: need demos and candidate hierarchies");
  }
  int total = 0;
  for (const auto& d : demos) total += d.length();
  const int P = static_cast<int>(hierarchies.size());

  std::vector<Eigen::MatrixXd> datasets(P);
  int row = 0;
  for (const auto& demo : demos) {
    const std::vector<Eigen::MatrixXd> X = project_demo(demo, hierarchies, damping);
    for (int j = 0; j < P; ++j) {
      if (datasets[j].size() == 0) {
        datasets[j].resize(total, 1 + X[j].cols());
      }
      datasets[j].block(row, 1, demo.length(), X[j].cols()) = X[j];
      datasets[j].col(0).segment(row, demo.length()) = demo.times;
    }
    row += demo.length();
  }

  EmOptions opts;
  opts.seed = seed;
  // Tight frames carry the priority signal; a trace-scaled floor would blur
  // them because the time dimension dominates the trace.
  opts.reg = kPriorityEmReg;
  std::vector<std::string> labels;
  for (const auto& h : hierarchies) labels.push_back(h.label);

  PriorityModel model;
  model.model = tpgmm_fit(datasets, K, opts, labels).model;
  model.hierarchies = hierarchies;
  if (!demos.front().jacobians.empty()) {
    for (const auto& J : demos.front().jacobians.front()) {
      model.task_dims.push_back(static_cast<int>(J.rows()));
    }
  }
  return model;
}

Eigen::MatrixXd hierarchy_precision(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma,
                                    double reg_factor, bool* regularized) {
  if (A.cols() != sigma.rows() || sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("hierarchy_precision: dimension mismatch");
  }
  // The trace-scaled ridge both makes the sandwich invertible (A has at most
  // task-stack rank) and caps the weight any single hierarchy can claim at
  // Nq / (reg_factor * trace): frames with spread-out projections cannot pin
  // the command through near-null directions of their covariance.
  const int nq = static_cast<int>(A.rows());
  Eigen::MatrixXd M = A * sigma * A.transpose();
  M = 0.5 * (M + M.transpose());
  if (regularized) *regularized = A.cols() < A.rows();
  const double tr = M.trace();
  const double reg = tr > 0.0 ? reg_factor * tr / nq : kAbsRegFloor;
  M += reg * Eigen::MatrixXd::Identity(nq, nq);
  return psd_inverse(M, 1e-14);
}

Eigen::VectorXd soft_weighted_step(const std::vector<WeightedCandidate>& candidates,
                                   bool* regularized) {
  if (candidates.empty()) {
    throw std::invalid_argument("soft_weighted_step: no candidates");
  }
  if (regularized) *regularized = false;
  const int nq = static_cast<int>(candidates.front().qdot.size());
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(nq, nq);
  Eigen::VectorXd info = Eigen::VectorXd::Zero(nq);
  for (const auto& c : candidates) {
    if (c.qdot.size() != nq || c.gamma.rows() != nq || c.gamma.cols() != nq) {
      throw std::invalid_argument("soft_weighted_step: inconsistent candidate dimensions");
    }
    total += c.gamma;
    info += c.gamma * c.qdot;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(total);
  if (llt.info() == Eigen::Success) {
    return llt.solve(info);
  }
  if (regularized) *regularized = true;
  return psd_inverse(total, 1e-12) * info;
}

PriorityTrace synthesize_priority(const PriorityModel& model, const TaskObserver& observe,
                                  const ReferenceProvider& references,
                                  const Eigen::VectorXd& q0,
                                  const PrioritySynthesisOptions& opts) {
  if (opts.steps <= 0) {
    throw std::invalid_argument("synthesize_priority: steps must be positive");
  }
  const int P = model.model.num_frames();
  const int nq = static_cast<int>(q0.size());

  PriorityTrace trace;
  trace.times.resize(opts.steps);
  trace.q.resize(opts.steps, nq);
  trace.gamma_trace.resize(opts.steps, P);

  std::vector<int> in_dims{0};
  std::vector<int> out_dims;
  for (int i = 1; i < model.model.frame_dim(0); ++i) out_dims.push_back(i);

  Eigen::VectorXd q = q0;
  for (int step = 0; step < opts.steps; ++step) {
    const double t = step * opts.dt;
    std::vector<Eigen::MatrixXd> jacobians;
    std::vector<Eigen::VectorXd> positions;
    observe(q, &jacobians, &positions);
    const std::vector<Eigen::VectorXd> refs = references(t);
    if (refs.size() != jacobians.size() || positions.size() != jacobians.size()) {
      throw std::invalid_argument("synthesize_priority: task count mismatch");
    }
    const int n_tasks = static_cast<int>(jacobians.size());
    if (trace.task_error.size() == 0) {
      trace.task_error.resize(opts.steps, n_tasks);
    }

    int S = 0;
    for (const auto& J : jacobians) S += static_cast<int>(J.rows());
    Eigen::VectorXd xdot(S);
    int at = 0;
    for (int i = 0; i < n_tasks; ++i) {
      const Eigen::VectorXd e = refs[i] - positions[i];
      xdot.segment(at, e.size()) = opts.gain * e;
      at += static_cast<int>(e.size());
      trace.task_error(step, i) = e.norm();
    }

    Eigen::VectorXd tin(1);
    tin << t;
    std::vector<WeightedCandidate> candidates(P);
    for (int j = 0; j < P; ++j) {
      const Eigen::MatrixXd A =
          hierarchy_matrix(jacobians, model.hierarchies[j].order, opts.damping);
      Gmm frame_gmm;
      frame_gmm.priors = model.model.priors;
      for (int k = 0; k < model.model.num_components(); ++k) {
        frame_gmm.components.push_back(model.model.components[k][j]);
      }
      const Gaussian cond = gmr(frame_gmm, in_dims, out_dims, tin);
      candidates[j].gamma = hierarchy_precision(A, cond.cov, opts.reg_factor);
      candidates[j].qdot = A * xdot;
      trace.gamma_trace(step, j) = candidates[j].gamma.trace();
    }
    const Eigen::VectorXd qdot = soft_weighted_step(candidates);
    trace.times(step) = t;
    trace.q.row(step) = q.transpose();
    q += qdot * opts.dt;
  }
  return trace;
}

}  // namespace tpl
