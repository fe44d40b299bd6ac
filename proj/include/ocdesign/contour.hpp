#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ocdesign/design.hpp"

namespace ocdesign {

// Power and type-I-error surfaces over an (n, gamma) lattice, computed from
// the optimizer's matched rank lines. Matrices are row-major by n then
// gamma. Each column of the grid is an empirical survival function, so both
// surfaces are nonincreasing in gamma.
struct ContourGrid {
  std::vector<double> n_values;      // ascending
  std::vector<double> gamma_values;  // ascending, inside (0.5, 1)
  std::vector<double> power;         // size n_values * gamma_values
  std::vector<double> type1;

  // Sorted predicted probabilities per column (exact survival functions for
  // feasibility queries at arbitrary levels).
  std::vector<std::vector<double>> probs1_sorted;
  std::vector<std::vector<double>> probs0_sorted;

  // provenance
  int anchor_lo = 0, anchor_hi = 0;
  int m = 0;
  uint64_t seed = 0;

  int n_count() const { return static_cast<int>(n_values.size()); }
  int gamma_count() const { return static_cast<int>(gamma_values.size()); }
  double power_at(int i, int j) const { return power[i * gamma_count() + j]; }
  double type1_at(int i, int j) const { return type1[i * gamma_count() + j]; }
};

struct ContourRanges {
  // Zeroed fields are filled with the defaults derived from the
  // recommendation: n in [0.6 n2, 1.5 n2], gamma in [rec - 0.15, rec + 0.04].
  double n_lo = 0.0, n_hi = 0.0;
  double gamma_lo = 0.0, gamma_hi = 0.0;
  int gamma_steps = 200;
};

ContourGrid build_grid(const OptimizerTrace& trace,
                       const DesignRecommendation& rec,
                       const ContourRanges& ranges, int min_viable_n,
                       int threads);

enum class SurfaceTag { kPower, kType1 };

struct LevelPolyline {
  SurfaceTag surface = SurfaceTag::kPower;
  double level = 0.0;
  std::vector<std::array<double, 2>> vertices;  // (n, gamma)
};

// Marching squares with linear edge interpolation; saddle cells resolved by
// the cell-center average. Returns stitched, ordered polylines (empty when
// the level is never crossed).
std::vector<LevelPolyline> extract_level(const ContourGrid& grid,
                                         SurfaceTag surface, double level);

// Smallest integer grid column that satisfies both criteria at/right of the
// rightmost intersection of the two level contours. Returns (n, gamma with
// type-I exactly at its threshold there), or nothing if no column qualifies.
std::optional<std::pair<double, double>> crossing_point(const ContourGrid& grid,
                                                        double level_power,
                                                        double level_type1);

}  // namespace ocdesign
