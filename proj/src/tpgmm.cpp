#include "tplearn/tpgmm.hpp"

#include <cmath>
#include <stdexcept>

#include "tplearn/kinematics.hpp"

namespace tpl {

namespace {

constexpr double kPrecisionRelFloor = 1e-10;
constexpr double kInvertibleRcond = 1e-10;

bool invertible(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& s = svd.singularValues();
  return s(s.size() - 1) > kInvertibleRcond * s(0);
}

}  // namespace

TaskFrame with_time_dims(const TaskFrame& frame, int n_time) {
  TaskFrame out;
  out.label = frame.label;
  out.A = Eigen::MatrixXd::Zero(frame.A.rows() + n_time, frame.A.cols() + n_time);
  out.A.topLeftCorner(n_time, n_time).setIdentity();
  out.A.bottomRightCorner(frame.A.rows(), frame.A.cols()) = frame.A;
  out.b = Eigen::VectorXd::Zero(frame.b.size() + n_time);
  out.b.tail(frame.b.size()) = frame.b;
  return out;
}

void Demonstration::validate() const {
  const int n = length();
  if (n == 0) {
    throw std::invalid_argument("Demonstration: empty");
  }
  for (int t = 1; t < n; ++t) {
    if (!(times(t) > times(t - 1))) {
      throw std::invalid_argument("Demonstration: times must be strictly increasing");
    }
  }
  if (xi.size() > 0 && xi.rows() != n) {
    throw std::invalid_argument("Demonstration: xi row count mismatch");
  }
  if (joints.size() > 0 && joints.rows() != n) {
    throw std::invalid_argument("Demonstration: joints row count mismatch");
  }
}

std::vector<Eigen::MatrixXd> project_to_frames(const std::vector<Demonstration>& demos,
                                               const FrameBuilder& builder,
                                               ProjectionMode mode, bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  if (demos.empty()) {
    throw std::invalid_argument("project_to_frames: no demonstrations");
  }
  int total = 0;
  for (const auto& d : demos) {
    d.validate();
    total += d.length();
  }

  std::vector<Eigen::MatrixXd> out;
  int row = 0;
  for (const auto& demo : demos) {
    for (int t = 0; t < demo.length(); ++t) {
      const std::vector<TaskFrame> frames = builder(demo, t);
      if (out.empty()) {
        out.resize(frames.size());
      } else if (out.size() != frames.size()) {
        throw std::invalid_argument("project_to_frames: frame count changed mid-demo");
      }
      const Eigen::VectorXd xi_t = demo.xi.row(t).transpose();
      for (size_t j = 0; j < frames.size(); ++j) {
        Eigen::VectorXd x;
        if (mode == ProjectionMode::kForwardLinear) {
          x = frames[j].A * xi_t;
        } else {
          if (invertible(frames[j].A)) {
            x = frames[j].A.partialPivLu().solve(xi_t - frames[j].b);
          } else {
            if (used_fallback) *used_fallback = true;
            x = pseudoinverse(frames[j].A) * (xi_t - frames[j].b);
          }
        }
        if (out[j].size() == 0) {
          out[j].resize(total, x.size());
        }
        out[j].row(row) = x.transpose();
      }
      ++row;
    }
  }
  return out;
}

TpgmmFit tpgmm_fit(const std::vector<Eigen::MatrixXd>& frame_datasets, int K,
                   const EmOptions& opts, const std::vector<std::string>& labels) {
  BlockEmResult r = em_fit_blocks(frame_datasets, K, opts);
  TpgmmFit fit;
  fit.model.priors = r.priors;
  fit.model.components = std::move(r.components);
  fit.model.frames.resize(frame_datasets.size());
  for (size_t j = 0; j < frame_datasets.size(); ++j) {
    fit.model.frames[j] = j < labels.size() ? labels[j] : "frame" + std::to_string(j);
  }
  fit.loglik_trace = std::move(r.loglik_trace);
  fit.converged = r.converged;
  return fit;
}

Gmm synthesize(const TpGmm& model, const std::vector<TaskFrame>& frames_now) {
  if (static_cast<int>(frames_now.size()) != model.num_frames()) {
    throw std::invalid_argument("synthesize: frame count mismatch");
  }
  const int out_dim = static_cast<int>(frames_now.front().A.rows());
  for (const auto& f : frames_now) {
    if (f.A.rows() != out_dim || f.b.size() != out_dim) {
      throw std::invalid_argument("synthesize: frames disagree on output dimension");
    }
  }
  Gmm out;
  out.priors = model.priors;
  out.components.reserve(model.num_components());
  for (int k = 0; k < model.num_components(); ++k) {
    std::vector<ProductTerm> terms;
    terms.reserve(model.num_frames());
    for (int j = 0; j < model.num_frames(); ++j) {
      const Gaussian g = transform(model.components[k][j], frames_now[j].A, frames_now[j].b);
      // Structurally singular directions (non-square A) carry no observation
      // and must not constrain the product; truncation gives them zero weight
      // while data-derived tightness keeps its large weight.
      terms.push_back(
          ProductTerm::precision(g.mean, psd_truncated_inverse(g.cov, kPrecisionRelFloor)));
    }
    out.components.push_back(gaussian_product(terms));
  }
  return out;
}

ReproduceTrace reproduce(const TpGmm& model, const SynthesisFrameBuilder& builder,
                         const Eigen::VectorXd& q0, const ReproduceOptions& opts) {
  if (opts.steps <= 0) {
    throw std::invalid_argument("reproduce: steps must be positive");
  }
  const int P = model.num_frames();
  Eigen::VectorXd q = q0;

  ReproduceTrace trace;
  trace.times.resize(opts.steps);
  trace.frame_reference.assign(P, Eigen::MatrixXd());
  trace.frame_variance.assign(P, Eigen::MatrixXd());
  trace.variance_trace.resize(opts.steps, P);

  std::vector<int> in_dims{0};
  std::vector<int> out_dims;

  for (int step = 0; step < opts.steps; ++step) {
    const double t = opts.t0 + step * opts.dt;
    const std::vector<TaskFrame> frames = builder(t, q);
    const int out_dim = static_cast<int>(frames.front().A.rows()) - 1;
    if (out_dims.empty()) {
      for (int i = 0; i < out_dim; ++i) out_dims.push_back(i + 1);
      trace.reference.resize(opts.steps, out_dim);
      for (int j = 0; j < P; ++j) {
        trace.frame_reference[j].resize(opts.steps, out_dim);
        trace.frame_variance[j].resize(opts.steps, out_dim);
      }
    }
    Eigen::VectorXd tin(1);
    tin << t;

    const Gmm combined = synthesize(model, frames);
    const Gaussian ref = gmr(combined, in_dims, out_dims, tin);

    for (int j = 0; j < P; ++j) {
      Gmm single;
      single.priors = model.priors;
      for (int k = 0; k < model.num_components(); ++k) {
        single.components.push_back(
            transform(model.components[k][j], frames[j].A, frames[j].b));
      }
      const Gaussian cand = gmr(single, in_dims, out_dims, tin);
      trace.frame_reference[j].row(step) = cand.mean.transpose();
      trace.frame_variance[j].row(step) = cand.cov.diagonal().transpose();
      trace.variance_trace(step, j) = cand.cov.trace();
    }

    trace.times(step) = t;
    trace.reference.row(step) = ref.mean.transpose();
    q = ref.mean;
  }
  return trace;
}

}  // namespace tpl
