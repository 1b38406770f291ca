#include "tplearn/gaussians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tpl {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kExactInverseRcond = 1e-12;
constexpr double kAdaptiveRegFactor = 1e-6;
constexpr double kAbsRegFloor = 1e-12;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

// Inverse of a symmetric positive definite matrix; throws when the matrix is
// numerically singular.
Eigen::MatrixXd spd_inverse_strict(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(M));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double lmax = ev.cwiseAbs().maxCoeff();
  if (lmax <= 0.0 || ev.minCoeff() <= kExactInverseRcond * lmax) {
    throw IllConditionedProduct("gaussian_product: singular covariance/precision");
  }
  return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

double adaptive_reg(const Eigen::MatrixXd& cov) {
  const double tr = cov.trace();
  return std::max(kAdaptiveRegFactor * tr / cov.rows(), kAbsRegFloor);
}

Eigen::MatrixXd slice(const Eigen::MatrixXd& M, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) {
      out(i, j) = M(rows[i], cols[j]);
    }
  }
  return out;
}

Eigen::VectorXd slice(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

// k-means with k-means++ seeding; used only for EM initialization, so a
// bounded iteration count is enough.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& data, int K, std::uint64_t seed) {
  const int n = static_cast<int>(data.rows());
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> centers;
  std::uniform_int_distribution<int> first(0, n - 1);
  centers.push_back(data.row(first(rng)).transpose());
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::max());
  while (static_cast<int>(centers.size()) < K) {
    for (int t = 0; t < n; ++t) {
      const double d = (data.row(t).transpose() - centers.back()).squaredNorm();
      d2(t) = std::min(d2(t), d);
    }
    std::discrete_distribution<int> pick(d2.data(), d2.data() + n);
    centers.push_back(data.row(pick(rng)).transpose());
  }
  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int t = 0; t < n; ++t) {
      int best = 0;
      double best_d = std::numeric_limits<double>::max();
      for (int k = 0; k < K; ++k) {
        const double d = (data.row(t).transpose() - centers[k]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (labels[t] != best) {
        labels[t] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.cols());
      int count = 0;
      for (int t = 0; t < n; ++t) {
        if (labels[t] == k) {
          sum += data.row(t).transpose();
          ++count;
        }
      }
      if (count > 0) centers[k] = sum / count;
    }
  }
  return labels;
}

struct CompCache {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_norm = 0.0;
  bool valid = false;
};

CompCache make_cache(const Gaussian& g) {
  CompCache c;
  c.llt.compute(g.cov);
  if (c.llt.info() == Eigen::Success) {
    double logdet = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
      logdet += 2.0 * std::log(c.llt.matrixL()(i, i));
    }
    c.log_norm = -0.5 * (g.dim() * kLogTwoPi + logdet);
    c.valid = true;
  }
  return c;
}

double log_gaussian_cached(const Eigen::VectorXd& x, const Gaussian& g, const CompCache& c) {
  const Eigen::VectorXd d = x - g.mean;
  return c.log_norm - 0.5 * d.dot(c.llt.solve(d));
}

}  // namespace

ProductTerm ProductTerm::covariance(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  return ProductTerm{std::move(mean), std::move(cov), false};
}

ProductTerm ProductTerm::precision(Eigen::VectorXd mean, Eigen::MatrixXd prec) {
  return ProductTerm{std::move(mean), std::move(prec), true};
}

Gaussian gaussian_product(const std::vector<ProductTerm>& terms) {
  if (terms.empty()) {
    throw std::invalid_argument("gaussian_product: no terms");
  }
  const int d = static_cast<int>(terms.front().mean.size());
  Eigen::MatrixXd prec_sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd info_sum = Eigen::VectorXd::Zero(d);
  for (const ProductTerm& t : terms) {
    if (t.mean.size() != d || t.matrix.rows() != d || t.matrix.cols() != d) {
      throw std::invalid_argument("gaussian_product: inconsistent term dimensions");
    }
    const Eigen::MatrixXd prec = t.is_precision ? t.matrix : spd_inverse_strict(t.matrix);
    prec_sum += prec;
    info_sum += prec * t.mean;
  }
  Gaussian out;
  out.cov = symmetrize(spd_inverse_strict(prec_sum));
  out.mean = out.cov * info_sum;
  return out;
}

Gaussian transform(const Gaussian& g, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.cols() != g.dim() || b.size() != A.rows()) {
    throw std::invalid_argument("transform: inconsistent dimensions");
  }
  Gaussian out;
  out.mean = A * g.mean + b;
  out.cov = symmetrize(A * g.cov * A.transpose());
  return out;
}

Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& M, double rel_floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(M));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double lmax = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  const double floor = lmax > 0.0 ? rel_floor * lmax : kAbsRegFloor;
  Eigen::VectorXd inv(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    inv(i) = 1.0 / std::max(ev(i), floor);
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd psd_truncated_inverse(const Eigen::MatrixXd& M, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(M));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double lmax = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  const double cutoff = lmax > 0.0 ? rel_cutoff * lmax : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) {
      inv(i) = 1.0 / ev(i);
    }
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double log_gaussian(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov) {
  Gaussian g{mean, cov};
  CompCache c = make_cache(g);
  if (!c.valid) {
    g.cov = cov + adaptive_reg(cov) * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    c = make_cache(g);
  }
  return log_gaussian_cached(x, g, c);
}

EmResult em_fit(const Eigen::MatrixXd& data, int K, const EmOptions& opts) {
  BlockEmResult r = em_fit_blocks({data}, K, opts);
  EmResult out;
  out.model.priors = r.priors;
  out.model.components.reserve(K);
  for (int k = 0; k < K; ++k) {
    out.model.components.push_back(std::move(r.components[k][0]));
  }
  out.loglik_trace = std::move(r.loglik_trace);
  out.converged = r.converged;
  return out;
}

BlockEmResult em_fit_blocks(const std::vector<Eigen::MatrixXd>& blocks, int K,
                            const EmOptions& opts) {
  if (blocks.empty()) {
    throw std::invalid_argument("em_fit_blocks: no data blocks");
  }
  const int n = static_cast<int>(blocks.front().rows());
  const int P = static_cast<int>(blocks.size());
  for (const auto& b : blocks) {
    if (b.rows() != n) {
      throw std::invalid_argument("em_fit_blocks: blocks disagree on datapoint count");
    }
  }
  if (K < 1 || n < K) {
    throw std::invalid_argument("em_fit_blocks: need at least K datapoints");
  }

  auto weighted_stats = [&](const Eigen::MatrixXd& block, const Eigen::VectorXd& w,
                            double wsum) -> Gaussian {
    Gaussian g;
    g.mean = block.transpose() * w / wsum;
    Eigen::MatrixXd centered = block.rowwise() - g.mean.transpose();
    g.cov = symmetrize(centered.transpose() * w.asDiagonal() * centered / wsum);
    const double reg = opts.reg >= 0.0 ? opts.reg : adaptive_reg(g.cov);
    g.cov += reg * Eigen::MatrixXd::Identity(g.dim(), g.dim());
    return g;
  };

  // Initialization: hard assignments, either equal quantile bins of the first
  // dimension (the time column of stacked demonstrations) or seeded k-means on
  // the concatenated blocks.
  std::vector<int> labels(n);
  if (opts.init == EmInit::kTimeSplit) {
    std::vector<double> sorted(n);
    for (int t = 0; t < n; ++t) sorted[t] = blocks.front()(t, 0);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges(K - 1);
    for (int k = 1; k < K; ++k) {
      edges[k - 1] = sorted[static_cast<size_t>(static_cast<long long>(k) * n / K)];
    }
    for (int t = 0; t < n; ++t) {
      const double v = blocks.front()(t, 0);
      labels[t] = static_cast<int>(
          std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    }
  } else {
    int total_dim = 0;
    for (const auto& b : blocks) total_dim += static_cast<int>(b.cols());
    Eigen::MatrixXd concat(n, total_dim);
    int at = 0;
    for (const auto& b : blocks) {
      concat.middleCols(at, b.cols()) = b;
      at += static_cast<int>(b.cols());
    }
    labels = kmeans_labels(concat, K, opts.seed);
  }

  BlockEmResult result;
  result.priors = Eigen::VectorXd::Zero(K);
  result.components.assign(K, std::vector<Gaussian>(P));
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < n; ++t) {
      if (labels[t] == k) w(t) = 1.0;
    }
    double wsum = w.sum();
    if (wsum < 1.0) {
      // k-means left this component empty; seed it from a single point.
      w(k % n) = 1.0;
      wsum = 1.0;
    }
    result.priors(k) = wsum / n;
    for (int j = 0; j < P; ++j) {
      result.components[k][j] = weighted_stats(blocks[j], w, wsum);
    }
  }
  result.priors /= result.priors.sum();

  Eigen::MatrixXd log_resp(n, K);
  double prev_ll = -std::numeric_limits<double>::infinity();
  result.converged = false;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // E step.
    std::vector<std::vector<CompCache>> caches(K, std::vector<CompCache>(P));
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < P; ++j) {
        caches[k][j] = make_cache(result.components[k][j]);
        if (!caches[k][j].valid) {
          Gaussian& g = result.components[k][j];
          g.cov += adaptive_reg(g.cov) * Eigen::MatrixXd::Identity(g.dim(), g.dim());
          caches[k][j] = make_cache(g);
        }
      }
    }
    double ll = 0.0;
    for (int t = 0; t < n; ++t) {
      double row_max = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        double lp = std::log(result.priors(k));
        for (int j = 0; j < P; ++j) {
          lp += log_gaussian_cached(blocks[j].row(t).transpose(),
                                    result.components[k][j], caches[k][j]);
        }
        log_resp(t, k) = lp;
        row_max = std::max(row_max, lp);
      }
      double sum = 0.0;
      for (int k = 0; k < K; ++k) sum += std::exp(log_resp(t, k) - row_max);
      const double lse = row_max + std::log(sum);
      ll += lse;
      for (int k = 0; k < K; ++k) {
        log_resp(t, k) = std::exp(log_resp(t, k) - lse);
      }
    }
    result.loglik_trace.push_back(ll);
    if (iter > 0 && ll - prev_ll < opts.tol * std::abs(prev_ll)) {
      result.converged = true;
      break;
    }
    prev_ll = ll;

    // M step (log_resp now holds plain responsibilities).
    for (int k = 0; k < K; ++k) {
      Eigen::VectorXd w = log_resp.col(k);
      double wsum = w.sum();
      if (wsum < 1e-10 * n) {
        // Empty component: reseed at the worst-explained datapoint.
        int worst = 0;
        double worst_resp = std::numeric_limits<double>::max();
        for (int t = 0; t < n; ++t) {
          const double best = log_resp.row(t).maxCoeff();
          if (best < worst_resp) {
            worst_resp = best;
            worst = t;
          }
        }
        w.setZero();
        w(worst) = 1.0;
        wsum = 1.0;
        for (int j = 0; j < P; ++j) {
          Gaussian g;
          g.mean = blocks[j].row(worst).transpose();
          Eigen::MatrixXd centered =
              blocks[j].rowwise() - blocks[j].colwise().mean();
          g.cov = symmetrize(centered.transpose() * centered / n);
          g.cov += adaptive_reg(g.cov) * Eigen::MatrixXd::Identity(g.dim(), g.dim());
          result.components[k][j] = g;
        }
        result.priors(k) = 1.0 / n;
        continue;
      }
      result.priors(k) = wsum / n;
      for (int j = 0; j < P; ++j) {
        result.components[k][j] = weighted_stats(blocks[j], w, wsum);
      }
    }
    result.priors /= result.priors.sum();
  }
  return result;
}

Gaussian gmr(const Gmm& model, const std::vector<int>& in_dims,
             const std::vector<int>& out_dims, const Eigen::VectorXd& x_in, double reg) {
  if (model.num_components() == 0) {
    throw std::invalid_argument("gmr: empty model");
  }
  if (static_cast<int>(in_dims.size() + out_dims.size()) != model.dim()) {
    throw std::invalid_argument("gmr: in/out dims must partition the model dimension");
  }
  const int K = model.num_components();
  const int od = static_cast<int>(out_dims.size());

  Eigen::VectorXd log_h(K);
  std::vector<Eigen::VectorXd> cond_mean(K);
  std::vector<Eigen::MatrixXd> cond_cov(K);
  for (int k = 0; k < K; ++k) {
    const Gaussian& g = model.components[k];
    const Eigen::VectorXd mu_i = slice(g.mean, in_dims);
    const Eigen::VectorXd mu_o = slice(g.mean, out_dims);
    Eigen::MatrixXd s_ii = slice(g.cov, in_dims, in_dims);
    const Eigen::MatrixXd s_oi = slice(g.cov, out_dims, in_dims);
    const Eigen::MatrixXd s_oo = slice(g.cov, out_dims, out_dims);
    if (reg > 0.0) {
      s_ii += reg * Eigen::MatrixXd::Identity(s_ii.rows(), s_ii.cols());
    }
    const Eigen::MatrixXd s_ii_inv = psd_inverse(s_ii, 1e-12);
    log_h(k) = std::log(model.priors(k)) + log_gaussian(x_in, mu_i, s_ii);
    cond_mean[k] = mu_o + s_oi * s_ii_inv * (x_in - mu_i);
    cond_cov[k] = symmetrize(s_oo - s_oi * s_ii_inv * s_oi.transpose());
  }
  const double lse_max = log_h.maxCoeff();
  Eigen::VectorXd h = (log_h.array() - lse_max).exp();
  h /= h.sum();

  Gaussian out;
  out.mean = Eigen::VectorXd::Zero(od);
  for (int k = 0; k < K; ++k) out.mean += h(k) * cond_mean[k];
  out.cov = Eigen::MatrixXd::Zero(od, od);
  for (int k = 0; k < K; ++k) {
    out.cov += h(k) * (cond_cov[k] + cond_mean[k] * cond_mean[k].transpose());
  }
  out.cov = symmetrize(out.cov - out.mean * out.mean.transpose());
  return out;
}

}  // namespace tpl
