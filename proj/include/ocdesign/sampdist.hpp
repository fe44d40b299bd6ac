#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ocdesign/model.hpp"

namespace ocdesign {

// Estimated sampling distribution of posterior probabilities under one
// hypothesis at one sample size: m independent repetitions of
// (draw eta+ ~ Psi_j, simulate data, compute Pr(H1 | data)).
struct SampDist {
  int hyp_index = 0;
  int n_b = 0;
  int m = 0;
  std::vector<double> probs;
  std::vector<double> logits;
  std::vector<double> thetas;     // g(eta) per repetition
  Eigen::MatrixXd etas;           // m x eta_dim, draw behind each repetition

  // seed lineage
  uint64_t seed = 0;
  uint32_t domain = 0;
  int r_offset = 0;
};

// Runs the simulation for hypothesis j at sample size n_b (total n for
// one-group models). Repetition r draws from the lane (domain, j,
// r_offset + r), so results are independent of the thread count and an
// offset run extends an earlier one draw-for-draw.
//
// Repetitions whose posterior evaluation fails numerically are redrawn on a
// fresh sub-lane; the run fails only if more than 0.1% of repetitions fail.
SampDist estimate(const Model& model, const IntervalHypothesis& hyp,
                  const DataGenProcess& psi, int hyp_index, int n_b, double q,
                  int m, uint64_t seed, uint32_t domain, int r_offset = 0,
                  int threads = 1);

// Appends `extra` repetitions (lanes continue at sd.m) to an existing run.
void extend(SampDist& sd, const Model& model, const IntervalHypothesis& hyp,
            const DataGenProcess& psi, double q, int extra, int threads);

// Order-statistic ranks for the design criteria. Estimated power >= 1-beta
// iff the rank_power-th smallest H1 probability is >= gamma; estimated type
// I error <= alpha iff gamma exceeds the rank_type1-th smallest H0
// probability. These equivalences are exact for every gamma (power side)
// and every gamma between sample values (type I side).
int power_threshold_rank(int m, double beta);   // floor(m*beta) + 1
int type1_threshold_rank(int m, double alpha);  // ceil(m*(1-alpha))

struct OCEstimate {
  double power = 0.0;
  double type1 = 0.0;
  double xi1_prob = 0.0;   // power threshold, probability scale
  double xi1_logit = 0.0;
  double xi0_prob = 0.0;   // type-I threshold, probability scale
  double xi0_logit = 0.0;
  int n_b = 0;
  double gamma = 0.0;
};

// Operating characteristics of the pair (sd1 under H1, sd0 under H0) at
// critical value gamma: power and type-I estimates count probabilities
// >= gamma; xi thresholds use the ranks above.
OCEstimate oc_estimate(const SampDist& sd1, const SampDist& sd0, double gamma,
                       double alpha, double beta);

// power >= 1-beta and type1 <= alpha.
bool criteria_met(const OCEstimate& oc, double alpha, double beta);

// True iff some gamma satisfies both criteria, i.e. xi0 <= xi1.
bool feasible(const SampDist& sd1, const SampDist& sd0, double alpha,
              double beta);

}  // namespace ocdesign
