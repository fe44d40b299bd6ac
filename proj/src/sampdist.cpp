#include "ocdesign/sampdist.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "ocdesign/math.hpp"
#include "ocdesign/parallel.hpp"

namespace ocdesign {

namespace {

constexpr int kMaxAttempts = 16;

void run_repetitions(SampDist& sd, const Model& model,
                     const IntervalHypothesis& hyp, const DataGenProcess& psi,
                     double q, int begin, int end, int threads,
                     std::atomic<long long>& failures, long long max_failures) {
  parallel_for(begin, end, threads, [&](int r) {
    StreamLane lane;
    lane.phase = StreamPhase::kRepetition;
    lane.hyp_index = static_cast<uint8_t>(sd.hyp_index);
    lane.domain = sd.domain;
    lane.repetition = static_cast<uint32_t>(sd.r_offset + r);
    for (int attempt = 0;; ++attempt) {
      lane.attempt = static_cast<uint8_t>(attempt);
      RngStream rng(sd.seed, lane);
      const Eigen::VectorXd eta = psi.draw(rng);
      try {
        const Dataset data = model.generate(eta, sd.n_b, q, rng);
        const double prob = model.posterior_prob(data, hyp);
        sd.probs[r] = prob;
        sd.logits[r] = logit(prob);
        sd.thetas[r] = model.estimand(eta);
        sd.etas.row(r) = eta;
        return;
      } catch (const NumericalError& err) {
        const long long seen = ++failures;
        if (seen > max_failures || attempt + 1 >= kMaxAttempts) {
          throw NumericalError(std::string(err.what()) + " (hypothesis " +
                               std::to_string(sd.hyp_index) + ", repetition " +
                               std::to_string(sd.r_offset + r) + ", attempt " +
                               std::to_string(attempt) + ")");
        }
      }
    }
  });
}

}  // namespace

SampDist estimate(const Model& model, const IntervalHypothesis& hyp,
                  const DataGenProcess& psi, int hyp_index, int n_b, double q,
                  int m, uint64_t seed, uint32_t domain, int r_offset,
                  int threads) {
  if (m < 1) throw ArgumentError("repetition count m must be positive");
  if (n_b < model.min_viable_n()) {
    throw ArgumentError("sample size " + std::to_string(n_b) +
                        " below the model minimum " +
                        std::to_string(model.min_viable_n()));
  }
  SampDist sd;
  sd.hyp_index = hyp_index;
  sd.n_b = n_b;
  sd.m = m;
  sd.seed = seed;
  sd.domain = domain;
  sd.r_offset = r_offset;
  sd.probs.resize(m);
  sd.logits.resize(m);
  sd.thetas.resize(m);
  sd.etas.resize(m, model.eta_dim());

  std::atomic<long long> failures{0};
  const long long max_failures = guarded_floor(0.001 * m);
  run_repetitions(sd, model, hyp, psi, q, 0, m, threads, failures,
                  max_failures);
  return sd;
}

void extend(SampDist& sd, const Model& model, const IntervalHypothesis& hyp,
            const DataGenProcess& psi, double q, int extra, int threads) {
  if (extra < 0) throw ArgumentError("extra repetition count must be >= 0");
  if (extra == 0) return;
  const int old_m = sd.m;
  sd.m += extra;
  sd.probs.resize(sd.m);
  sd.logits.resize(sd.m);
  sd.thetas.resize(sd.m);
  sd.etas.conservativeResize(sd.m, Eigen::NoChange);
  std::atomic<long long> failures{0};
  const long long max_failures = guarded_floor(0.001 * extra) + 1;
  run_repetitions(sd, model, hyp, psi, q, old_m, sd.m, threads, failures,
                  max_failures);
}

int power_threshold_rank(int m, double beta) {
  const long long k = guarded_floor(m * beta);
  if (k < 1) {
    throw ArgumentError("m too small for beta: floor(m*beta) must be >= 1");
  }
  if (k + 1 > m) {
    throw ArgumentError("m too small for beta: floor(m*beta) + 1 exceeds m");
  }
  return static_cast<int>(k) + 1;
}

int type1_threshold_rank(int m, double alpha) {
  const long long k = guarded_ceil(m * (1.0 - alpha));
  if (k < 1 || k > m) {
    throw ArgumentError("ceil(m*(1-alpha)) out of range");
  }
  return static_cast<int>(k);
}

OCEstimate oc_estimate(const SampDist& sd1, const SampDist& sd0, double gamma,
                       double alpha, double beta) {
  if (sd1.m != sd0.m) {
    throw ArgumentError("sampling distributions must share the same m");
  }
  if (!(gamma >= 0.5) || !(gamma < 1.0)) {
    throw ArgumentError("critical value gamma must lie in [0.5, 1)");
  }
  const int m = sd1.m;
  OCEstimate oc;
  oc.n_b = sd1.n_b;
  oc.gamma = gamma;
  long long hits1 = 0, hits0 = 0;
  for (double p : sd1.probs) hits1 += (p >= gamma);
  for (double p : sd0.probs) hits0 += (p >= gamma);
  oc.power = static_cast<double>(hits1) / m;
  oc.type1 = static_cast<double>(hits0) / m;
  const int k1 = power_threshold_rank(m, beta);
  const int k0 = type1_threshold_rank(m, alpha);
  oc.xi1_prob = xi(k1, sd1.probs);
  oc.xi0_prob = xi(k0, sd0.probs);
  oc.xi1_logit = logit(oc.xi1_prob);
  oc.xi0_logit = logit(oc.xi0_prob);
  return oc;
}

bool criteria_met(const OCEstimate& oc, double alpha, double beta) {
  return oc.power >= 1.0 - beta && oc.type1 <= alpha;
}

bool feasible(const SampDist& sd1, const SampDist& sd0, double alpha,
              double beta) {
  const int k1 = power_threshold_rank(sd1.m, beta);
  const int k0 = type1_threshold_rank(sd0.m, alpha);
  return xi(k0, sd0.probs) <= xi(k1, sd1.probs);
}

}  // namespace ocdesign
