#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tpl {

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

struct Gmm {
  Eigen::VectorXd priors;
  std::vector<Gaussian> components;

  int num_components() const { return static_cast<int>(components.size()); }
  int dim() const { return components.empty() ? 0 : components.front().dim(); }
};

struct IllConditionedProduct : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One factor of a Gaussian product; carries either a covariance or a
// precision matrix (the latter lets callers pass regularized inverses of
// singular transformed covariances).
struct ProductTerm {
  Eigen::VectorXd mean;
  Eigen::MatrixXd matrix;
  bool is_precision = false;

  static ProductTerm covariance(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  static ProductTerm precision(Eigen::VectorXd mean, Eigen::MatrixXd prec);
};

// cov = (sum of precisions)^-1, mean = cov * (sum of precision-weighted
// means). Throws IllConditionedProduct when the total precision is singular.
Gaussian gaussian_product(const std::vector<ProductTerm>& terms);

// mean -> A mean + b, cov -> A cov A^T (A may be non-square).
Gaussian transform(const Gaussian& g, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Inverse of a symmetric PSD matrix with eigenvalues floored at
// rel_floor * lambda_max (absolute fallback for numerically zero input).
Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& M, double rel_floor = 1e-10);

// Moore-Penrose-style inverse of a symmetric PSD matrix: eigenvalues below
// rel_cutoff * lambda_max contribute zero. Structural null directions of a
// rank-deficient covariance (e.g. pushed through a non-square map) end up
// with no weight instead of a huge one.
Eigen::MatrixXd psd_truncated_inverse(const Eigen::MatrixXd& M, double rel_cutoff = 1e-10);

double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov);

enum class EmInit { kTimeSplit, kKmeans };

struct EmOptions {
  int max_iter = 200;
  double tol = 1e-6;      // relative log-likelihood improvement
  double reg = -1.0;      // < 0: adaptive 1e-6 * trace(cov)/D per component
  EmInit init = EmInit::kTimeSplit;
  std::uint64_t seed = 0;
};

struct EmResult {
  Gmm model;
  std::vector<double> loglik_trace;
  bool converged = true;
};

EmResult em_fit(const Eigen::MatrixXd& data, int K, const EmOptions& opts = {});

// EM over several per-frame views of the same N datapoints: responsibilities
// are shared, component parameters are kept per block. Blocks may have
// different dimensionality.
struct BlockEmResult {
  Eigen::VectorXd priors;
  std::vector<std::vector<Gaussian>> components;  // [component][block]
  std::vector<double> loglik_trace;
  bool converged = true;
};

BlockEmResult em_fit_blocks(const std::vector<Eigen::MatrixXd>& blocks, int K,
                            const EmOptions& opts = {});

// Conditional of the mixture on the input dimensions, with the mixture
// covariance from the law of total variance.
Gaussian gmr(const Gmm& model, const std::vector<int>& in_dims,
             const std::vector<int>& out_dims, const Eigen::VectorXd& x_in,
             double reg = 0.0);

}  // namespace tpl
