#include "ocdesign/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocdesign/math.hpp"

namespace ocdesign {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void IntervalHypothesis::validate() const {
  if (std::isnan(lower) || std::isnan(upper) || !(lower < upper)) {
    throw ConfigError("hypothesis interval requires lower < upper");
  }
  if (std::isinf(lower) && std::isinf(upper)) {
    throw ConfigError("hypothesis interval needs at least one finite endpoint");
  }
}

Eigen::VectorXd DataGenProcess::draw(RngStream& rng) const {
  if (degenerate()) return eta;
  Eigen::VectorXd out = eta;
  out[uniform_component] =
      uniform_lo + (uniform_hi - uniform_lo) * rng.uniform_open();
  return out;
}

Eigen::VectorXd DataGenProcess::median_eta() const {
  if (degenerate()) return eta;
  Eigen::VectorXd out = eta;
  out[uniform_component] = 0.5 * (uniform_lo + uniform_hi);
  return out;
}

void DataGenProcess::validate(int expected_dim) const {
  if (eta.size() != expected_dim) {
    throw ConfigError("data generation process eta has dimension " +
                      std::to_string(eta.size()) + ", model expects " +
                      std::to_string(expected_dim));
  }
  if (!degenerate()) {
    if (uniform_component >= expected_dim) {
      throw ConfigError("uniform component index out of range");
    }
    if (!(uniform_lo < uniform_hi)) {
      throw ConfigError("uniform range requires lo < hi");
    }
  }
}

int allocation_group_a(double q, int n_b) {
  return static_cast<int>(std::nearbyint(q * static_cast<double>(n_b)));
}

namespace {

// ---------------------------------------------------------------------------
// Toy normal model

class ToyNormalModel final : public Model {
 public:
  explicit ToyNormalModel(const ToyNormalConfig& cfg) : cfg_(cfg) {
    if (!(cfg.sigma > 0.0)) throw ConfigError("toy model requires sigma > 0");
    if (!cfg.flat_prior && !(cfg.prior_sd > 0.0)) {
      throw ConfigError("toy model conjugate prior requires prior_sd > 0");
    }
  }

  std::string_view id() const override { return "normal-mean"; }
  int eta_dim() const override { return 1; }
  bool two_group() const override { return false; }

  double estimand(const Eigen::VectorXd& eta) const override { return eta[0]; }

  double fisher_info(const Eigen::VectorXd&, double) const override {
    return 1.0 / (cfg_.sigma * cfg_.sigma);
  }

  Dataset generate(const Eigen::VectorXd& eta, int n_b, double,
                   RngStream& rng) const override {
    if (n_b < 1) throw ArgumentError("sample size must be positive");
    Dataset data;
    data.n_a = 0;
    data.n_b = n_b;
    data.y.resize(n_b);
    const double theta = eta[0];
    for (int i = 0; i < n_b; ++i) {
      data.y[i] = theta + cfg_.sigma * rng.normal();
    }
    return data;
  }

  double posterior_prob(const Dataset& data,
                        const IntervalHypothesis& hyp) const override {
    const int n = data.n();
    if (n < 1) throw ArgumentError("posterior requires nonempty data");
    const double ybar = data.y.mean();
    double mean, var;
    if (cfg_.flat_prior) {
      mean = ybar;
      var = cfg_.sigma * cfg_.sigma / n;
    } else {
      const double data_prec = n / (cfg_.sigma * cfg_.sigma);
      const double prior_prec = 1.0 / (cfg_.prior_sd * cfg_.prior_sd);
      const double prec = data_prec + prior_prec;
      mean = (ybar * data_prec + cfg_.prior_mean * prior_prec) / prec;
      var = 1.0 / prec;
    }
    const double sd = std::sqrt(var);
    const double hi =
        std::isinf(hyp.upper) ? 1.0 : std_normal_cdf((hyp.upper - mean) / sd);
    const double lo =
        std::isinf(hyp.lower) ? 0.0 : std_normal_cdf((hyp.lower - mean) / sd);
    return std::clamp(hi - lo, 0.0, 1.0);
  }

 private:
  ToyNormalConfig cfg_;
};

// ---------------------------------------------------------------------------
// Gaussian regression with conjugate normal-inverse-gamma prior

class GaussianRegressionModel final : public Model {
 public:
  explicit GaussianRegressionModel(const GaussianRegressionConfig& cfg)
      : cfg_(cfg) {
    if (!(cfg.prior_precision > 0.0) || !(cfg.prior_a > 0.0) ||
        !(cfg.prior_b > 0.0)) {
      throw ConfigError("NIG prior requires positive precision, a, b");
    }
    if (!(cfg.covariate_sd > 0.0) || !(cfg.error_sd > 0.0)) {
      throw ConfigError("covariate and error scales must be positive");
    }
  }

  std::string_view id() const override { return "gaussian-regression"; }
  int eta_dim() const override { return 3; }
  bool two_group() const override { return true; }

  double estimand(const Eigen::VectorXd& eta) const override { return eta[1]; }

  // Var(b1_hat) = sigma_eps^2 (1/n_a + 1/n_b) = sigma_eps^2 (1+q)/(q n_b),
  // so the per-n_b information is q / (sigma_eps^2 (1 + q)).
  double fisher_info(const Eigen::VectorXd&, double q) const override {
    if (!(q > 0.0)) throw ArgumentError("allocation q must be positive");
    return q / (cfg_.error_sd * cfg_.error_sd * (1.0 + q));
  }

  Dataset generate(const Eigen::VectorXd& eta, int n_b, double q,
                   RngStream& rng) const override {
    if (n_b < 1) throw ArgumentError("sample size must be positive");
    Dataset data;
    data.n_a = allocation_group_a(q, n_b);
    data.n_b = n_b;
    const int n = data.n();
    data.y.resize(n);
    data.x2.resize(n);
    for (int i = 0; i < n; ++i) {
      const double x2 = cfg_.covariate_mean + cfg_.covariate_sd * rng.normal();
      const double eps = cfg_.error_sd * rng.normal();
      const double x1 = data.in_group_a(i) ? 1.0 : 0.0;
      data.x2[i] = x2;
      data.y[i] = eta[0] + eta[1] * x1 + eta[2] * x2 + eps;
    }
    return data;
  }

  double posterior_prob(const Dataset& data,
                        const IntervalHypothesis& hyp) const override {
    const int n = data.n();
    if (n < 1) throw ArgumentError("posterior requires nonempty data");
    // Sufficient statistics for X = [1, x1, x2].
    double s_x2 = 0, s_x2sq = 0, s_x2a = 0;
    double s_y = 0, s_ysq = 0, s_ya = 0, s_x2y = 0;
    for (int i = 0; i < n; ++i) {
      const double x2 = data.x2[i];
      const double y = data.y[i];
      s_x2 += x2;
      s_x2sq += x2 * x2;
      s_y += y;
      s_ysq += y * y;
      s_x2y += x2 * y;
      if (data.in_group_a(i)) {
        s_x2a += x2;
        s_ya += y;
      }
    }
    const double na = data.n_a;
    Eigen::Matrix3d xtx;
    xtx << n, na, s_x2,  //
        na, na, s_x2a,   //
        s_x2, s_x2a, s_x2sq;
    Eigen::Vector3d xty(s_y, s_ya, s_x2y);

    const Eigen::Matrix3d lambda0 =
        cfg_.prior_precision * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d lambda_n = lambda0 + xtx;
    const auto llt = lambda_n.llt();
    if (llt.info() != Eigen::Success) {
      throw NumericalError("posterior precision matrix is not positive definite");
    }
    const Eigen::Vector3d mu_n =
        llt.solve(lambda0 * cfg_.prior_mean + xty);
    const double a_n = cfg_.prior_a + 0.5 * n;
    const double b_n =
        cfg_.prior_b +
        0.5 * (s_ysq + cfg_.prior_mean.dot(lambda0 * cfg_.prior_mean) -
               mu_n.dot(lambda_n * mu_n));
    if (!(b_n > 0.0)) {
      throw NumericalError("nonpositive posterior scale in NIG update");
    }
    const double inv11 = llt.solve(Eigen::Vector3d::Unit(1))[1];
    const double loc = mu_n[1];
    const double scale = std::sqrt(b_n / a_n * inv11);
    const double dof = 2.0 * a_n;
    const double hi = std::isinf(hyp.upper)
                          ? 1.0
                          : student_t_cdf((hyp.upper - loc) / scale, dof);
    const double lo = std::isinf(hyp.lower)
                          ? 0.0
                          : student_t_cdf((hyp.lower - loc) / scale, dof);
    return std::clamp(hi - lo, 0.0, 1.0);
  }

 private:
  GaussianRegressionConfig cfg_;
};

// ---------------------------------------------------------------------------
// Logistic regression, posterior probabilities by Laplace approximation

// Gauss-Hermite rule for E[f(Z)] with Z ~ N(0,1), computed once from the
// Jacobi matrix of the probabilists' Hermite recurrence.
class GaussHermite {
 public:
  explicit GaussHermite(int k) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i + 1 < k; ++i) {
      const double b = std::sqrt(static_cast<double>(i + 1));
      jacobi(i, i + 1) = b;
      jacobi(i + 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    nodes_ = es.eigenvalues();
    weights_.resize(k);
    for (int i = 0; i < k; ++i) {
      const double v0 = es.eigenvectors()(0, i);
      weights_[i] = v0 * v0;
    }
  }
  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

class LogisticRegressionModel final : public Model {
 public:
  explicit LogisticRegressionModel(const LogisticRegressionConfig& cfg)
      : cfg_(cfg), gh_(40) {
    for (int i = 0; i < 3; ++i) {
      if (!(cfg.prior_sd[i] > 0.0)) {
        throw ConfigError("logistic prior sds must be positive");
      }
    }
    if (!(cfg.covariate_sd > 0.0)) {
      throw ConfigError("covariate scale must be positive");
    }
  }

  std::string_view id() const override { return "logistic-regression"; }
  int eta_dim() const override { return 3; }
  bool two_group() const override { return true; }

  double estimand(const Eigen::VectorXd& eta) const override {
    return std::exp(eta[1]);  // odds ratio
  }

  double analysis_scale_theta(const Eigen::VectorXd& eta) const override {
    return eta[1];
  }

  IntervalHypothesis analysis_scale_hypothesis(
      const IntervalHypothesis& hyp) const override {
    // theta = exp(b1) > 0, so endpoints <= 0 impose no constraint on b1.
    IntervalHypothesis out;
    out.lower = (std::isinf(hyp.lower) || hyp.lower <= 0.0) ? -kInf
                                                            : std::log(hyp.lower);
    out.upper = std::isinf(hyp.upper) ? kInf : std::log(hyp.upper);
    return out;
  }

  // Expected per-n_b information matrix: q observations in group A plus one
  // in group B, covariate integrated by Gauss-Hermite. Returns the inverse
  // of the b1 entry of its inverse.
  double fisher_info(const Eigen::VectorXd& eta, double q) const override {
    if (!(q > 0.0)) throw ArgumentError("allocation q must be positive");
    Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
    for (int g = 0; g < 2; ++g) {
      const double x1 = g == 0 ? 1.0 : 0.0;  // group A first
      const double mult = g == 0 ? q : 1.0;
      for (int i = 0; i < gh_.size(); ++i) {
        const double x2 = cfg_.covariate_mean + cfg_.covariate_sd * gh_.node(i);
        const double lin = eta[0] + eta[1] * x1 + eta[2] * x2;
        const double pi = inv_logit(lin);
        const double w = mult * gh_.weight(i) * pi * (1.0 - pi);
        const Eigen::Vector3d x(1.0, x1, x2);
        info += w * x * x.transpose();
      }
    }
    const double var11 = info.llt().solve(Eigen::Vector3d::Unit(1))[1];
    if (!(var11 > 0.0)) {
      throw NumericalError("singular expected information matrix");
    }
    return 1.0 / var11;
  }

  Dataset generate(const Eigen::VectorXd& eta, int n_b, double q,
                   RngStream& rng) const override {
    if (n_b < 1) throw ArgumentError("sample size must be positive");
    Dataset data;
    data.n_a = allocation_group_a(q, n_b);
    data.n_b = n_b;
    const int n = data.n();
    data.y.resize(n);
    data.x2.resize(n);
    for (int i = 0; i < n; ++i) {
      const double x2 = cfg_.covariate_mean + cfg_.covariate_sd * rng.normal();
      const double x1 = data.in_group_a(i) ? 1.0 : 0.0;
      const double pi = inv_logit(eta[0] + eta[1] * x1 + eta[2] * x2);
      data.x2[i] = x2;
      data.y[i] = rng.uniform_open() < pi ? 1.0 : 0.0;
    }
    return data;
  }

  double posterior_prob(const Dataset& data,
                        const IntervalHypothesis& hyp) const override {
    const int n = data.n();
    if (n < 1) throw ArgumentError("posterior requires nonempty data");
    const Eigen::Vector3d prior_prec(
        1.0 / (cfg_.prior_sd[0] * cfg_.prior_sd[0]),
        1.0 / (cfg_.prior_sd[1] * cfg_.prior_sd[1]),
        1.0 / (cfg_.prior_sd[2] * cfg_.prior_sd[2]));

    Eigen::Vector3d beta = cfg_.prior_mean;
    double lp = log_posterior(data, prior_prec, beta);
    Eigen::Matrix3d hess;
    bool converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
      Eigen::Vector3d grad = Eigen::Vector3d::Zero();
      hess = prior_prec.asDiagonal();
      for (int i = 0; i < n; ++i) {
        const double x1 = data.in_group_a(i) ? 1.0 : 0.0;
        const Eigen::Vector3d x(1.0, x1, data.x2[i]);
        const double pi = inv_logit(beta.dot(x));
        grad += (data.y[i] - pi) * x;
        hess += pi * (1.0 - pi) * x * x.transpose();
      }
      grad -= prior_prec.cwiseProduct(beta - cfg_.prior_mean);
      if (grad.lpNorm<Eigen::Infinity>() < kGradTol) {
        converged = true;
        break;
      }
      const Eigen::Vector3d step = hess.ldlt().solve(grad);
      const double step_size = step.lpNorm<Eigen::Infinity>();
      const double beta_size = 1.0 + beta.lpNorm<Eigen::Infinity>();
      if (step_size < 1e-6 * beta_size) {
        // Quadratic basin: take the full step; the log posterior can no
        // longer resolve changes this small, so a line search would only
        // compare rounding noise.
        beta += step;
        lp = log_posterior(data, prior_prec, beta);
        if (step_size < 1e-12 * beta_size) {
          converged = true;  // at the floating point floor of the mode
          break;
        }
        continue;
      }
      double scale = 1.0;
      Eigen::Vector3d candidate = beta + step;
      double lp_new = log_posterior(data, prior_prec, candidate);
      for (int h = 0; h < 30 && !(lp_new >= lp); ++h) {
        scale *= 0.5;
        candidate = beta + scale * step;
        lp_new = log_posterior(data, prior_prec, candidate);
      }
      beta = candidate;
      lp = lp_new;
    }
    if (!converged) {
      throw NumericalError("Laplace mode search did not converge");
    }
    const double var11 = hess.ldlt().solve(Eigen::Vector3d::Unit(1))[1];
    if (!(var11 > 0.0)) {
      throw NumericalError("nonpositive Laplace variance for b1");
    }
    const IntervalHypothesis h = analysis_scale_hypothesis(hyp);
    const double sd = std::sqrt(var11);
    const double hi =
        std::isinf(h.upper) ? 1.0 : std_normal_cdf((h.upper - beta[1]) / sd);
    const double lo =
        std::isinf(h.lower) ? 0.0 : std_normal_cdf((h.lower - beta[1]) / sd);
    return std::clamp(hi - lo, 0.0, 1.0);
  }

 private:
  static constexpr int kMaxIter = 100;
  static constexpr double kGradTol = 1e-8;

  double log_posterior(const Dataset& data, const Eigen::Vector3d& prior_prec,
                       const Eigen::Vector3d& beta) const {
    double lp = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      const double x1 = data.in_group_a(i) ? 1.0 : 0.0;
      const double lin = beta[0] + beta[1] * x1 + beta[2] * data.x2[i];
      // y*lin - log(1 + exp(lin)), stable form
      lp += data.y[i] * lin - (lin > 0 ? lin + std::log1p(std::exp(-lin))
                                       : std::log1p(std::exp(lin)));
    }
    const Eigen::Vector3d d = beta - cfg_.prior_mean;
    lp -= 0.5 * d.dot(prior_prec.cwiseProduct(d));
    return lp;
  }

  LogisticRegressionConfig cfg_;
  GaussHermite gh_;
};

}  // namespace

DrawRecord draw_eta(const Model& model, const DataGenProcess& psi,
                    RngStream& rng) {
  DrawRecord record;
  record.eta_plus = psi.draw(rng);
  record.theta = model.estimand(record.eta_plus);
  return record;
}

std::shared_ptr<const Model> make_toy_normal_model(const ToyNormalConfig& cfg) {
  return std::make_shared<ToyNormalModel>(cfg);
}

std::shared_ptr<const Model> make_gaussian_regression_model(
    const GaussianRegressionConfig& cfg) {
  return std::make_shared<GaussianRegressionModel>(cfg);
}

std::shared_ptr<const Model> make_logistic_regression_model(
    const LogisticRegressionConfig& cfg) {
  return std::make_shared<LogisticRegressionModel>(cfg);
}

}  // namespace ocdesign
