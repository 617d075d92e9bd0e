#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/scoring.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace splatprune {

enum class PruneTechnique : std::uint8_t { CrossRatio, CrossThreshold, CrossStochastic, PixelwiseTopK };

[[nodiscard]] std::string_view to_string(PruneTechnique t) noexcept;
[[nodiscard]] PruneTechnique parse_prune_technique(std::string_view name);
[[nodiscard]] bool is_cross_view(PruneTechnique t) noexcept;

struct PruneSpec {
    PruneTechnique technique = PruneTechnique::CrossRatio;
    double value = 0.0; // ratio p, threshold tau, or ranking threshold n
    std::uint64_t seed = 0;
    ScoreFunctionId score_function = ScoreFunctionId::MS;
};

// Throws ValidationError when `value` is out of range for the technique.
void validate_prune_spec(const PruneSpec& spec);

struct PruneMask {
    std::vector<bool> retain;
    PruneSpec spec;
    std::size_t retained_count = 0;
};

struct PrunedScene {
    Scene scene;
    std::vector<std::int64_t> old_to_new; // -1 for discarded primitives
};

// floor(p * N), guarded against representation error in p (0.29 * 100 -> 29).
[[nodiscard]] std::size_t pruned_count(double ratio, std::size_t n);

// Prunes the floor(p*N) lowest scores; among equal scores the higher id goes first.
[[nodiscard]] PruneMask prune_cross_ratio(const ScoreTable& table, double ratio);
// Retains score >= tau.
[[nodiscard]] PruneMask prune_cross_threshold(const ScoreTable& table, double tau);
// Retains N - floor(p*N) primitives drawn without replacement with probability
// proportional to score (exponential keys). Zero scores fill up last, by id.
[[nodiscard]] PruneMask prune_cross_stochastic(const ScoreTable& table, double ratio, std::uint64_t seed);
// Union over rays of each ray's top-min(n, hits) entries.
[[nodiscard]] PruneMask prune_pixelwise(const RankedRays& ranked, std::size_t n);

[[nodiscard]] PrunedScene apply_mask(const Scene& scene, const PruneMask& mask);

} // namespace splatprune
