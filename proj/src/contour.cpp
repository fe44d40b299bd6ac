#include "ocdesign/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "ocdesign/math.hpp"
#include "ocdesign/parallel.hpp"

namespace ocdesign {

ContourGrid build_grid(const OptimizerTrace& trace,
                       const DesignRecommendation& rec,
                       const ContourRanges& ranges, int min_viable_n,
                       int threads) {
  if (trace.anchors.size() < 2) {
    throw ArgumentError("contour grid requires a trace with anchor simulations");
  }
  if (trace.lines_stale) {
    throw ArgumentError("rank lines are stale; finalize the trace first");
  }
  double n_lo = ranges.n_lo > 0.0
                    ? ranges.n_lo
                    : std::max(static_cast<double>(min_viable_n),
                               std::ceil(0.6 * trace.n2));
  double n_hi = ranges.n_hi > 0.0 ? ranges.n_hi : std::ceil(1.5 * trace.n2);
  if (n_lo < min_viable_n) {
    throw ArgumentError("contour n range extends below the model minimum " +
                        std::to_string(min_viable_n));
  }
  if (!(n_lo <= n_hi)) throw ArgumentError("contour n range is empty");
  double gamma_lo = ranges.gamma_lo > 0.0 ? ranges.gamma_lo
                                          : std::max(0.5 + 1e-9,
                                                     rec.gamma - 0.15);
  double gamma_hi = ranges.gamma_hi > 0.0 ? ranges.gamma_hi
                                          : std::min(0.999, rec.gamma + 0.04);
  if (!(gamma_lo > 0.5 - 1e-12) || !(gamma_hi < 1.0) ||
      !(gamma_lo < gamma_hi)) {
    throw ArgumentError("contour gamma range must lie inside (0.5, 1)");
  }
  const int steps = std::max(2, ranges.gamma_steps);

  ContourGrid grid;
  grid.anchor_lo = trace.anchors[trace.active_lo].n_b;
  grid.anchor_hi = trace.anchors[trace.active_hi].n_b;
  grid.m = trace.matched_h1.m();
  grid.seed = trace.seed;
  for (long long n = guarded_ceil(n_lo); n <= guarded_floor(n_hi); ++n) {
    grid.n_values.push_back(static_cast<double>(n));
  }
  if (grid.n_values.empty()) {
    throw ArgumentError("contour n range contains no integer sample size");
  }
  grid.gamma_values.resize(steps);
  for (int j = 0; j < steps; ++j) {
    grid.gamma_values[j] =
        gamma_lo + (gamma_hi - gamma_lo) * j / (steps - 1.0);
  }

  const int cols = grid.n_count();
  const int rows = grid.gamma_count();
  grid.power.assign(static_cast<size_t>(cols) * rows, 0.0);
  grid.type1.assign(static_cast<size_t>(cols) * rows, 0.0);
  grid.probs1_sorted.resize(cols);
  grid.probs0_sorted.resize(cols);

  parallel_for(0, cols, threads, [&](int i) {
    const double n = grid.n_values[i];
    auto to_sorted_probs = [&](const RankLines& lines) {
      std::vector<double> v = predict_dist(lines, n);
      for (double& l : v) l = inv_logit(l);
      std::sort(v.begin(), v.end());
      return v;
    };
    grid.probs1_sorted[i] = to_sorted_probs(trace.matched_h1);
    grid.probs0_sorted[i] = to_sorted_probs(trace.matched_h0);
    const auto& p1 = grid.probs1_sorted[i];
    const auto& p0 = grid.probs0_sorted[i];
    for (int j = 0; j < rows; ++j) {
      const double gamma = grid.gamma_values[j];
      const auto tail = [gamma](const std::vector<double>& sorted) {
        const auto it =
            std::lower_bound(sorted.begin(), sorted.end(), gamma);
        return static_cast<double>(sorted.end() - it) / sorted.size();
      };
      grid.power[static_cast<size_t>(i) * rows + j] = tail(p1);
      grid.type1[static_cast<size_t>(i) * rows + j] = tail(p0);
    }
  });
  return grid;
}

namespace {

// Global edge id: orientation 0 = along n between (i,j)-(i+1,j),
// orientation 1 = along gamma between (i,j)-(i,j+1).
struct EdgeKey {
  int orientation;
  int i;
  int j;
  auto operator<=>(const EdgeKey&) const = default;
};

struct Segment {
  EdgeKey a, b;
};

}  // namespace

std::vector<LevelPolyline> extract_level(const ContourGrid& grid,
                                         SurfaceTag surface, double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ArgumentError("contour level must lie in (0, 1)");
  }
  const int cols = grid.n_count();
  const int rows = grid.gamma_count();
  const std::vector<double>& f =
      surface == SurfaceTag::kPower ? grid.power : grid.type1;
  auto value = [&](int i, int j) { return f[static_cast<size_t>(i) * rows + j]; };

  auto vertex = [&](const EdgeKey& e) -> std::array<double, 2> {
    const double fa = value(e.i, e.j);
    if (e.orientation == 0) {
      const double fb = value(e.i + 1, e.j);
      const double t = (level - fa) / (fb - fa);
      const double n = grid.n_values[e.i] +
                       t * (grid.n_values[e.i + 1] - grid.n_values[e.i]);
      return {n, grid.gamma_values[e.j]};
    }
    const double fb = value(e.i, e.j + 1);
    const double t = (level - fa) / (fb - fa);
    const double g = grid.gamma_values[e.j] +
                     t * (grid.gamma_values[e.j + 1] - grid.gamma_values[e.j]);
    return {grid.n_values[e.i], g};
  };

  std::vector<Segment> segments;
  for (int i = 0; i + 1 < cols; ++i) {
    for (int j = 0; j + 1 < rows; ++j) {
      const bool bl = value(i, j) >= level;
      const bool br = value(i + 1, j) >= level;
      const bool tr = value(i + 1, j + 1) >= level;
      const bool tl = value(i, j + 1) >= level;
      const int mask = (bl ? 1 : 0) | (br ? 2 : 0) | (tr ? 4 : 0) | (tl ? 8 : 0);
      if (mask == 0 || mask == 15) continue;
      const EdgeKey bottom{0, i, j};
      const EdgeKey top{0, i, j + 1};
      const EdgeKey left{1, i, j};
      const EdgeKey right{1, i + 1, j};
      auto emit = [&](EdgeKey a, EdgeKey b) { segments.push_back({a, b}); };
      switch (mask) {
        case 1:
        case 14:
          emit(left, bottom);
          break;
        case 2:
        case 13:
          emit(bottom, right);
          break;
        case 3:
        case 12:
          emit(left, right);
          break;
        case 4:
        case 11:
          emit(right, top);
          break;
        case 6:
        case 9:
          emit(bottom, top);
          break;
        case 7:
        case 8:
          emit(left, top);
          break;
        case 5: {
          const double center = 0.25 * (value(i, j) + value(i + 1, j) +
                                        value(i + 1, j + 1) + value(i, j + 1));
          if (center >= level) {
            emit(left, top);
            emit(bottom, right);
          } else {
            emit(left, bottom);
            emit(right, top);
          }
          break;
        }
        case 10: {
          const double center = 0.25 * (value(i, j) + value(i + 1, j) +
                                        value(i + 1, j + 1) + value(i, j + 1));
          if (center >= level) {
            emit(left, bottom);
            emit(right, top);
          } else {
            emit(left, top);
            emit(bottom, right);
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // Stitch segments into chains via shared edges.
  std::map<EdgeKey, std::vector<int>> incident;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    incident[segments[s].a].push_back(s);
    incident[segments[s].b].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<LevelPolyline> out;

  auto walk = [&](int start_seg, EdgeKey from) {
    std::vector<EdgeKey> chain{from};
    int seg = start_seg;
    EdgeKey at = from;
    while (true) {
      used[seg] = true;
      at = segments[seg].a == at ? segments[seg].b : segments[seg].a;
      chain.push_back(at);
      int next = -1;
      for (int cand : incident[at]) {
        if (!used[cand]) {
          next = cand;
          break;
        }
      }
      if (next < 0) break;
      seg = next;
    }
    return chain;
  };

  auto emit_chain = [&](const std::vector<EdgeKey>& chain) {
    LevelPolyline pl;
    pl.surface = surface;
    pl.level = level;
    pl.vertices.reserve(chain.size());
    for (const EdgeKey& e : chain) pl.vertices.push_back(vertex(e));
    out.push_back(std::move(pl));
  };

  // Open chains first (endpoints of degree one), then remaining loops.
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (used[s]) continue;
    if (incident[segments[s].a].size() == 1) {
      emit_chain(walk(s, segments[s].a));
    } else if (incident[segments[s].b].size() == 1) {
      emit_chain(walk(s, segments[s].b));
    }
  }
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (!used[s]) emit_chain(walk(s, segments[s].a));
  }
  return out;
}

namespace {

// Intersection of segments p1-p2 and p3-p4 in (n, gamma) coordinates.
std::optional<std::array<double, 2>> segment_intersection(
    const std::array<double, 2>& p1, const std::array<double, 2>& p2,
    const std::array<double, 2>& p3, const std::array<double, 2>& p4) {
  const double d1x = p2[0] - p1[0], d1y = p2[1] - p1[1];
  const double d2x = p4[0] - p3[0], d2y = p4[1] - p3[1];
  const double denom = d1x * d2y - d1y * d2x;
  if (denom == 0.0) return std::nullopt;
  const double sx = p3[0] - p1[0], sy = p3[1] - p1[1];
  const double t = (sx * d2y - sy * d2x) / denom;
  const double u = (sx * d1y - sy * d1x) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return std::array<double, 2>{p1[0] + t * d1x, p1[1] + t * d1y};
}

}  // namespace

std::optional<std::pair<double, double>> crossing_point(const ContourGrid& grid,
                                                        double level_power,
                                                        double level_type1) {
  const auto power_lines = extract_level(grid, SurfaceTag::kPower, level_power);
  const auto type1_lines = extract_level(grid, SurfaceTag::kType1, level_type1);

  double rightmost = -1.0;
  bool crossed = false;
  for (const auto& pa : power_lines) {
    for (size_t i = 0; i + 1 < pa.vertices.size(); ++i) {
      for (const auto& pb : type1_lines) {
        for (size_t k = 0; k + 1 < pb.vertices.size(); ++k) {
          const auto hit =
              segment_intersection(pa.vertices[i], pa.vertices[i + 1],
                                   pb.vertices[k], pb.vertices[k + 1]);
          if (hit) {
            crossed = true;
            rightmost = std::max(rightmost, (*hit)[0]);
          }
        }
      }
    }
  }

  const int m = grid.m;
  const int k1 = power_threshold_rank(m, 1.0 - level_power);
  const int k0 = type1_threshold_rank(m, level_type1);
  const double scan_from = crossed ? std::floor(rightmost) - 1e-9
                                   : grid.n_values.front() - 1e-9;
  for (int i = 0; i < grid.n_count(); ++i) {
    if (grid.n_values[i] < scan_from) continue;
    const double xi1 = grid.probs1_sorted[i][k1 - 1];
    const double xi0 = grid.probs0_sorted[i][k0 - 1];
    if (xi0 < xi1 && xi1 >= 0.5) {
      const double gamma =
          std::clamp(xi0, 0.5, std::nextafter(1.0, 0.0));
      return std::make_pair(grid.n_values[i], gamma);
    }
  }
  return std::nullopt;
}

}  // namespace ocdesign
