// Shared design-input fixtures for the worked examples and the toy model.
#pragma once

#include <cmath>
#include <limits>

#include "ocdesign/design.hpp"

namespace fixtures {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Two-group weight-loss regression (conjugate NIG): H1 b1 > 5, alpha 0.05,
// beta 0.2, q = 2, Psi1 uniform on b1 over (9, 12).
inline ocdesign::DesignInputs weight_example(int m = 10000,
                                             uint64_t seed = 1) {
  ocdesign::DesignInputs in;
  in.model =
      ocdesign::make_gaussian_regression_model(
          ocdesign::GaussianRegressionConfig{});
  in.hyp = {5.0, kInf};
  in.psi0.eta = Eigen::Vector3d(-25.75, 5.0, 0.25);
  in.psi1.eta = Eigen::Vector3d(-25.75, 10.5, 0.25);
  in.psi1.uniform_component = 1;
  in.psi1.uniform_lo = 9.0;
  in.psi1.uniform_hi = 12.0;
  in.alpha = 0.05;
  in.beta = 0.2;
  in.q = 2.0;
  in.m = m;
  in.seed = seed;
  in.subgroups = 10;
  return in;
}

// Two-group SAE logistic regression (Laplace): H1 exp(b1) < 2, alpha 0.4,
// beta 0.25, q = 2.
inline ocdesign::DesignInputs sae_example(int m = 1000, uint64_t seed = 1) {
  ocdesign::DesignInputs in;
  in.model = ocdesign::make_logistic_regression_model(
      ocdesign::LogisticRegressionConfig{});
  in.hyp = {-kInf, 2.0};
  in.psi0.eta = Eigen::Vector3d(-2.71, std::log(2.0), 0.25);
  in.psi1.eta = Eigen::Vector3d(-2.71, std::log(1.25), 0.25);
  in.alpha = 0.4;
  in.beta = 0.25;
  in.q = 2.0;
  in.m = m;
  in.seed = seed;
  return in;
}

// One-group flat-prior toy model: H1 theta > 0, boundary null, effect
// `theta1` under the alternative.
inline ocdesign::DesignInputs toy_example(double theta1 = 0.5, int m = 10000,
                                          uint64_t seed = 1) {
  ocdesign::DesignInputs in;
  in.model = ocdesign::make_toy_normal_model(ocdesign::ToyNormalConfig{});
  in.hyp = {0.0, kInf};
  in.psi0.eta = Eigen::VectorXd::Constant(1, 0.0);
  in.psi1.eta = Eigen::VectorXd::Constant(1, theta1);
  in.alpha = 0.05;
  in.beta = 0.2;
  in.q = 1.0;
  in.m = m;
  in.seed = seed;
  return in;
}

}  // namespace fixtures
