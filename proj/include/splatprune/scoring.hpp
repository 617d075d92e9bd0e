#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/rasterizer.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace splatprune {

// Importance kernels: four published baselines and eighteen per-ray variants.
enum class ScoreFunctionId : std::uint8_t {
    LG, MS, RS, EG,
    V1, V2, V3, V4, V5, V6, V7, V8, V9,
    V10, V11, V12, V13, V14, V15, V16, V17, V18,
};

enum class Aggregation : std::uint8_t { Sum, Max, PerRay };

inline constexpr int kScoreFunctionCount = 22;

[[nodiscard]] std::span<const ScoreFunctionId> all_score_functions() noexcept;
[[nodiscard]] std::string_view to_string(ScoreFunctionId fn) noexcept;
[[nodiscard]] std::string_view to_string(Aggregation agg) noexcept;
// Case-insensitive; throws ValidationError on unknown names.
[[nodiscard]] ScoreFunctionId parse_score_function(std::string_view name);
[[nodiscard]] Aggregation parse_aggregation(std::string_view name);

// LG/MS sum, RS max, everything else per-ray.
[[nodiscard]] Aggregation default_aggregation(ScoreFunctionId fn) noexcept;
[[nodiscard]] bool needs_ground_truth(ScoreFunctionId fn) noexcept;

// Everything a per-ray kernel may look at besides the record itself.
struct ScoreContext {
    std::optional<Color> gt_color;  // C_GT for the record's ray
    Vec2 pixel_center = Vec2::Zero(); // X_P
    Vec2 projected_mean = Vec2::Zero(); // X_i
    double dist_scale = 1.0;        // lambda: distance is divided by this before exp
    double gamma = 1.0;             // LG volume factor
    double delta_t = 0.0;           // transmittance drop T_i - T_{i+1} = alpha * T
    double opacity = 0.0;           // activated sigma_i
};

struct ScoreTable {
    std::vector<double> per_primitive;
    Aggregation aggregation = Aggregation::Sum;
    ScoreFunctionId function = ScoreFunctionId::MS;
    std::size_t views_used = 0;
};

struct RankedEntry {
    PrimitiveId primitive_id = 0;
    double score = 0.0;
    std::uint32_t position = 0; // front-to-back index along the ray
};

struct RankedRay {
    RayId ray;
    std::vector<RankedEntry> entries; // best first
};

struct RankedRays {
    ScoreFunctionId function = ScoreFunctionId::EG;
    std::size_t primitive_count = 0;
    std::size_t views_used = 0;
    std::vector<RankedRay> rays;
};

struct ScoringOptions {
    double dist_scale = 1.0;
    unsigned workers = 0;
};

// Volume product of the exponentiated scales.
[[nodiscard]] double primitive_volume(const GaussianPrimitive& prim) noexcept;
// (clamp(volume / reference, 0, 1))^0.1
[[nodiscard]] double normalized_volume(double volume, double reference) noexcept;
// Nearest-rank 90th percentile of primitive volumes.
[[nodiscard]] double volume_percentile90(const Scene& scene);
[[nodiscard]] std::vector<double> gamma_volume(const Scene& scene);

[[nodiscard]] double per_ray_score(ScoreFunctionId fn, const ContributionRecord& rec, const ScoreContext& ctx);

// Sum or max of per_ray_score over all records of each primitive. `views[i]`
// supplies the ground truth for `streams[i]`. Unrecorded primitives score 0.
[[nodiscard]] ScoreTable aggregate_cross_view(ScoreFunctionId fn, const Scene& scene,
                                              std::span<const ContributionStream> streams,
                                              std::span<const CameraView> views, Aggregation mode,
                                              const ScoringOptions& opts = {});

// Per ray: records sorted by score descending, then id ascending, then position.
[[nodiscard]] RankedRays rank_per_ray(ScoreFunctionId fn, const Scene& scene,
                                      std::span<const ContributionStream> streams,
                                      std::span<const CameraView> views, const ScoringOptions& opts = {});

// Sort helper shared with the file reader.
void sort_ranked_entries(std::vector<RankedEntry>& entries);

} // namespace splatprune
