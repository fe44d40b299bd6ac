#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <memory>
#include <string>
#include <string_view>

#include "ocdesign/errors.hpp"
#include "ocdesign/rng.hpp"

namespace ocdesign {

// H1: theta in (lower, upper), with -inf <= lower < upper <= +inf and at
// least one finite endpoint.
struct IntervalHypothesis {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double theta) const { return theta > lower && theta < upper; }
  bool on_boundary(double theta) const {
    return theta == lower || theta == upper;
  }
  void validate() const;
};

// One simulated sample. Two-group models put the n_a group-A observations
// first; one-group models use n_a = 0.
struct Dataset {
  int n_a = 0;
  int n_b = 0;
  Eigen::VectorXd y;
  Eigen::VectorXd x2;  // empty for models without a covariate

  int n() const { return n_a + n_b; }
  bool in_group_a(int i) const { return i < n_a; }
};

struct DrawRecord {
  Eigen::VectorXd eta_plus;
  double theta = 0.0;  // g(eta)
};

// Data generation process Psi_j: either a point mass at `eta` or `eta`
// with one component replaced by an independent uniform draw.
struct DataGenProcess {
  Eigen::VectorXd eta;
  int uniform_component = -1;  // < 0 means degenerate
  double uniform_lo = 0.0;
  double uniform_hi = 0.0;

  bool degenerate() const { return uniform_component < 0; }
  Eigen::VectorXd draw(RngStream& rng) const;
  // eta with the varying component at its median (the midpoint for a
  // uniform); equals `eta` when degenerate.
  Eigen::VectorXd median_eta() const;
  void validate(int expected_dim) const;
};

// round(q * n_b) with ties to even, matching the banker's-rounding
// convention for the group-A allocation.
int allocation_group_a(double q, int n_b);

// Statistical model: data generation f+(w; eta+), estimand g(eta), analysis
// prior, Fisher information, and the posterior probability of H1.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string_view id() const = 0;
  virtual int eta_dim() const = 0;
  virtual bool two_group() const = 0;

  // Smallest n_b (or n for one-group models) the simulator accepts; also
  // the lower bound of every sample size search.
  int min_viable_n() const { return std::max(2 * eta_dim(), 4); }

  virtual double estimand(const Eigen::VectorXd& eta_plus) const = 0;

  // Value and hypothesis on the scale the posterior is computed on. The
  // identity unless the posterior targets a monotone transform of g
  // (logistic regression works on log theta).
  virtual double analysis_scale_theta(const Eigen::VectorXd& eta_plus) const {
    return estimand(eta_plus);
  }
  virtual IntervalHypothesis analysis_scale_hypothesis(
      const IntervalHypothesis& hyp) const {
    return hyp;
  }

  // Fisher information for the analysis-scale estimand per unit of n_b
  // (per unit of n for one-group models): Var(theta_hat) ~ 1/(info * n_b).
  virtual double fisher_info(const Eigen::VectorXd& eta_plus,
                             double q) const = 0;

  virtual Dataset generate(const Eigen::VectorXd& eta_plus, int n_b, double q,
                           RngStream& rng) const = 0;

  // Pr(delta_L < theta < delta_U | data) under the model's posterior.
  virtual double posterior_prob(const Dataset& data,
                                const IntervalHypothesis& hyp) const = 0;
};

// y ~ N(theta, sigma^2) with sigma known; flat or conjugate normal prior.
// One-group model used as the analytic test bed.
struct ToyNormalConfig {
  double sigma = 1.0;
  bool flat_prior = true;
  double prior_mean = 0.0;
  double prior_sd = 1.0;
};

// y = b0 + b1*x1 + b2*x2 + eps with a conjugate normal-inverse-gamma prior;
// theta = b1 and its marginal posterior is a location-scale Student-t.
struct GaussianRegressionConfig {
  Eigen::Vector3d prior_mean = Eigen::Vector3d::Zero();
  double prior_precision = 0.01;  // Lambda0 = prior_precision * I3
  double prior_a = 1.0;
  double prior_b = 1.0;
  double covariate_mean = 115.0;
  double covariate_sd = 14.5;
  double error_sd = 10.07;
};

// logit(pi) = b0 + b1*x1 + b2*x2 with independent normal priors;
// theta = exp(b1); posterior by Laplace approximation at the mode.
struct LogisticRegressionConfig {
  Eigen::Vector3d prior_mean = Eigen::Vector3d(-2.71, 0.0, 0.0);
  Eigen::Vector3d prior_sd = Eigen::Vector3d(1.0, 10.0, 10.0);
  double covariate_mean = 0.0;
  double covariate_sd = 1.0;
};

// One parameter draw from Psi with its estimand attached.
DrawRecord draw_eta(const Model& model, const DataGenProcess& psi,
                    RngStream& rng);

std::shared_ptr<const Model> make_toy_normal_model(const ToyNormalConfig& cfg);
std::shared_ptr<const Model> make_gaussian_regression_model(
    const GaussianRegressionConfig& cfg);
std::shared_ptr<const Model> make_logistic_regression_model(
    const LogisticRegressionConfig& cfg);

}  // namespace ocdesign
