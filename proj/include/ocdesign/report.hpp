#pragma once

#include <json.hpp>
#include <string>

#include "ocdesign/contour.hpp"
#include "ocdesign/design.hpp"

namespace ocdesign {

inline constexpr const char* kToolName = "ocdesign";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit hash of the raw config text, hex-encoded.
std::string fnv1a64_hex(const std::string& text);

nlohmann::json recommendation_json(const DesignRecommendation& rec);
nlohmann::json trace_json(const OptimizerTrace& trace);
nlohmann::json bootstrap_json(const BootstrapResult& boot);

void write_sampdist_csv(const std::string& path, const SampDist& sd);
void write_grid_csv(const std::string& path, const ContourGrid& grid);
void write_polylines_json(const std::string& path,
                          const std::vector<LevelPolyline>& polylines);
void write_bootstrap_csv(const std::string& path, const BootstrapResult& boot);

}  // namespace ocdesign
