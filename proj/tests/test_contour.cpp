#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ocdesign/contour.hpp"
#include "ocdesign/math.hpp"
#include "fixtures.hpp"

using namespace ocdesign;

namespace {

// Synthetic grid with explicit surfaces and per-column survival data.
ContourGrid synthetic_grid(const std::vector<double>& n_values,
                           const std::vector<double>& gamma_values,
                           double p1_value, double p0_value) {
  ContourGrid grid;
  grid.n_values = n_values;
  grid.gamma_values = gamma_values;
  grid.m = 100;
  const int rows = grid.gamma_count();
  for (int i = 0; i < grid.n_count(); ++i) {
    grid.probs1_sorted.push_back(std::vector<double>(100, p1_value));
    grid.probs0_sorted.push_back(std::vector<double>(100, p0_value));
    for (int j = 0; j < rows; ++j) {
      grid.power.push_back(gamma_values[j] <= p1_value ? 1.0 : 0.0);
      grid.type1.push_back(gamma_values[j] <= p0_value ? 1.0 : 0.0);
    }
  }
  return grid;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * i / (count - 1.0);
  }
  return out;
}

}  // namespace

TEST_CASE("extract_level on a constant surface is empty") {
  ContourGrid grid = synthetic_grid({10, 11, 12}, linspace(0.6, 0.9, 7), 0.3,
                                    0.3);
  for (auto& v : grid.power) v = 0.3;
  CHECK(extract_level(grid, SurfaceTag::kPower, 0.8).empty());
}

TEST_CASE("extract_level recovers an analytic level set") {
  // f(n, gamma) = gamma: the 0.95 level set is the horizontal line
  // gamma = 0.95.
  ContourGrid grid;
  grid.n_values = {20, 21, 22, 23, 24};
  grid.gamma_values = linspace(0.90, 0.99, 10);
  grid.m = 10;
  for (int i = 0; i < grid.n_count(); ++i) {
    grid.probs1_sorted.push_back(std::vector<double>(10, 0.5));
    grid.probs0_sorted.push_back(std::vector<double>(10, 0.5));
    for (int j = 0; j < grid.gamma_count(); ++j) {
      grid.power.push_back(grid.gamma_values[j]);
      grid.type1.push_back(grid.gamma_values[j]);
    }
  }
  const auto polylines = extract_level(grid, SurfaceTag::kPower, 0.95);
  REQUIRE(polylines.size() == 1);
  CHECK(polylines[0].vertices.size() >= grid.n_values.size());
  for (const auto& v : polylines[0].vertices) {
    CHECK(v[1] == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(v[0] >= 20.0);
    CHECK(v[0] <= 24.0);
  }
}

TEST_CASE("crossing trivial cases") {
  // feasible everywhere: smallest grid n wins
  ContourGrid everywhere =
      synthetic_grid({30, 31, 32}, linspace(0.61, 0.95, 5), 0.99, 0.01);
  const auto hit = crossing_point(everywhere, 0.8, 0.05);
  REQUIRE(hit.has_value());
  CHECK(hit->first == 30.0);
  CHECK(hit->second >= 0.5);

  // infeasible everywhere
  ContourGrid never =
      synthetic_grid({30, 31, 32}, linspace(0.61, 0.95, 5), 0.3, 0.6);
  CHECK(!crossing_point(never, 0.8, 0.05).has_value());
}

TEST_CASE("weight-example grid: columns, anchors, crossing") {
  DesignInputs in = fixtures::weight_example(10000, 6);
  auto [rec, trace] = optimize(in, 2);

  ContourRanges ranges;
  ranges.n_lo = std::min<double>(trace.anchors[trace.active_lo].n_b,
                                 std::floor(0.7 * trace.n2));
  ranges.n_hi = std::max<double>(trace.anchors[trace.active_hi].n_b,
                                 std::ceil(1.4 * trace.n2));
  ranges.gamma_steps = 201;
  ContourGrid grid =
      build_grid(trace, rec, ranges, in.model->min_viable_n(), 2);

  // monotone nonincreasing columns for both surfaces
  for (int i = 0; i < grid.n_count(); ++i) {
    for (int j = 1; j < grid.gamma_count(); ++j) {
      CHECK(grid.power_at(i, j) <= grid.power_at(i, j - 1));
      CHECK(grid.type1_at(i, j) <= grid.type1_at(i, j - 1));
    }
  }

  // anchor columns equal direct OC estimates at every grid gamma
  for (int anchor_idx : {trace.active_lo, trace.active_hi}) {
    const AnchorSim& anchor = trace.anchors[anchor_idx];
    const auto it = std::find(grid.n_values.begin(), grid.n_values.end(),
                              static_cast<double>(anchor.n_b));
    REQUIRE(it != grid.n_values.end());
    const int col = static_cast<int>(it - grid.n_values.begin());
    for (int j = 0; j < grid.gamma_count(); j += 25) {
      const double gamma = grid.gamma_values[j];
      long long c1 = 0, c0 = 0;
      for (double p : anchor.h1.probs) c1 += (p >= gamma);
      for (double p : anchor.h0.probs) c0 += (p >= gamma);
      CHECK(grid.power_at(col, j) ==
            static_cast<double>(c1) / anchor.h1.m);
      CHECK(grid.type1_at(col, j) ==
            static_cast<double>(c0) / anchor.h0.m);
    }
  }

  // the recommendation's column is feasible and gamma_rec sits inside its
  // threshold window
  const auto it = std::find(grid.n_values.begin(), grid.n_values.end(),
                            std::ceil(trace.n2));
  REQUIRE(it != grid.n_values.end());
  const int col = static_cast<int>(it - grid.n_values.begin());
  const int k1 = power_threshold_rank(grid.m, in.beta);
  const int k0 = type1_threshold_rank(grid.m, in.alpha);
  const double xi1 = grid.probs1_sorted[col][k1 - 1];
  const double xi0 = grid.probs0_sorted[col][k0 - 1];
  CHECK(xi0 <= xi1);
  CHECK(rec.gamma >= xi0 - 1e-12);
  CHECK(rec.gamma <= xi1 + 1e-12);

  // crossing point consistency with the optimizer
  const auto crossing = crossing_point(grid, 1.0 - in.beta, in.alpha);
  REQUIRE(crossing.has_value());
  CHECK(crossing->first == doctest::Approx(trace.n2));
  CHECK(crossing->first >= 34.0);
  CHECK(crossing->first <= 36.0);
}

TEST_CASE("level vertices near the recommendation match a direct oracle") {
  DesignInputs in = fixtures::weight_example(10000, 12);
  auto [rec, trace] = optimize(in, 2);
  ContourRanges ranges;
  ranges.gamma_steps = 400;
  const ContourGrid grid =
      build_grid(trace, rec, ranges, in.model->min_viable_n(), 2);

  // Direct, grid-independent simulation of the gamma that yields power
  // 1 - beta at the recommended size.
  const int n2 = static_cast<int>(trace.n2);
  SampDist direct = estimate(*in.model, in.hyp, in.psi1, 1, n2, in.q, 20000,
                             97531, 0, 0, 2);
  const double gamma_oracle =
      xi(power_threshold_rank(direct.m, in.beta), direct.probs);

  const auto polylines = extract_level(grid, SurfaceTag::kPower, 0.8);
  REQUIRE(!polylines.empty());
  double best_gamma = 0.0, best_dist = 1e9;
  for (const auto& pl : polylines) {
    for (const auto& v : pl.vertices) {
      if (std::fabs(v[0] - n2) < best_dist) {
        best_dist = std::fabs(v[0] - n2);
        best_gamma = v[1];
      }
    }
  }
  CHECK(best_dist <= 1.0);
  CHECK(std::fabs(best_gamma - gamma_oracle) <= 0.01);
  CHECK(std::fabs(best_gamma - rec.gamma) <= 0.01);
}

TEST_CASE("independent-simulation surfaces agree with the repurposed grid") {
  // Harness-only comparison: estimate the surfaces by direct simulation at
  // each size (expensive route) and compare against the rank-line grid.
  DesignInputs in = fixtures::weight_example(4000, 18);
  auto [rec, trace] = optimize(in, 2);
  ContourRanges ranges;
  ranges.gamma_steps = 5;
  ranges.gamma_lo = 0.90;
  ranges.gamma_hi = 0.98;
  const ContourGrid grid =
      build_grid(trace, rec, ranges, in.model->min_viable_n(), 2);

  for (double n : {grid.n_values.front(), std::floor(trace.n2),
                   grid.n_values.back()}) {
    const int col = static_cast<int>(
        std::find(grid.n_values.begin(), grid.n_values.end(), n) -
        grid.n_values.begin());
    REQUIRE(col < grid.n_count());
    SampDist sd1 = estimate(*in.model, in.hyp, in.psi1, 1,
                            static_cast<int>(n), in.q, 20000, 5150, 0, 0, 2);
    SampDist sd0 = estimate(*in.model, in.hyp, in.psi0, 0,
                            static_cast<int>(n), in.q, 20000, 5150, 0, 0, 2);
    for (int j = 0; j < grid.gamma_count(); ++j) {
      const double gamma = grid.gamma_values[j];
      long long c1 = 0, c0 = 0;
      for (double p : sd1.probs) c1 += (p >= gamma);
      for (double p : sd0.probs) c0 += (p >= gamma);
      // grid noise (m = 4000) plus line-approximation error at the range
      // ends: ~0.016 + ~0.02 worst case
      CHECK(std::fabs(grid.power_at(col, j) -
                      static_cast<double>(c1) / sd1.m) < 0.05);
      CHECK(std::fabs(grid.type1_at(col, j) -
                      static_cast<double>(c0) / sd0.m) < 0.05);
    }
  }
}

TEST_CASE("grid range validation") {
  DesignInputs in = fixtures::weight_example(500, 2);
  auto [rec, trace] = optimize(in, 2);
  ContourRanges bad;
  bad.n_lo = 2;  // below the regression minimum of 6
  bad.n_hi = 40;
  CHECK_THROWS_AS(build_grid(trace, rec, bad, in.model->min_viable_n(), 2),
                  ArgumentError);

  ContourRanges defaults;
  ContourGrid grid =
      build_grid(trace, rec, defaults, in.model->min_viable_n(), 2);
  CHECK(grid.n_values.front() >=
        std::max<double>(in.model->min_viable_n(),
                         std::floor(0.6 * trace.n2)));
  CHECK(grid.n_values.back() == std::ceil(1.5 * trace.n2));
  CHECK(grid.gamma_values.front() > 0.5);
  CHECK(grid.gamma_values.back() < 1.0);
  CHECK(grid.gamma_count() == 200);
}
