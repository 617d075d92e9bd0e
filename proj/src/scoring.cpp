#include "splatprune/scoring.hpp"

#include "splatprune/errors.hpp"
#include "splatprune/parallel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace splatprune {

namespace {

using F = ScoreFunctionId;

constexpr std::array<ScoreFunctionId, kScoreFunctionCount> kAllFunctions = {
    F::LG, F::MS, F::RS, F::EG, F::V1, F::V2, F::V3, F::V4, F::V5, F::V6, F::V7,
    F::V8, F::V9, F::V10, F::V11, F::V12, F::V13, F::V14, F::V15, F::V16, F::V17, F::V18,
};

constexpr std::array<std::string_view, kScoreFunctionCount> kNames = {
    "lg", "ms", "rs", "eg", "v1", "v2", "v3", "v4", "v5", "v6", "v7",
    "v8", "v9", "v10", "v11", "v12", "v13", "v14", "v15", "v16", "v17", "v18",
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Rays per scoring work item. Fixed so reductions never depend on worker count.
constexpr std::size_t kRaysPerChunk = 256;

struct RayRef {
    std::size_t stream = 0;
    std::size_t span = 0;
};

std::vector<RayRef> collect_rays(std::span<const ContributionStream> streams) {
    std::vector<RayRef> rays;
    for (std::size_t s = 0; s < streams.size(); ++s) {
        for (std::size_t r = 0; r < streams[s].rays.size(); ++r) {
            rays.push_back({s, r});
        }
    }
    return rays;
}

void check_inputs(ScoreFunctionId fn, const Scene& scene, std::span<const ContributionStream> streams,
                  std::span<const CameraView> views) {
    if (views.size() != streams.size()) {
        throw DimensionMismatchError("scoring needs one camera per contribution stream");
    }
    for (std::size_t v = 0; v < streams.size(); ++v) {
        if (streams[v].projected_means.size() != scene.size()) {
            throw DimensionMismatchError("contribution stream was recorded for a different scene");
        }
        if (needs_ground_truth(fn) && !views[v].ground_truth) {
            throw MissingGroundTruthError("score function " + std::string(to_string(fn)) +
                                          " needs a ground-truth image for view '" + views[v].name + "'");
        }
    }
}

// Precomputed per-scene inputs for building ScoreContexts.
class ContextBuilder {
public:
    ContextBuilder(ScoreFunctionId fn, const Scene& scene, std::span<const CameraView> views, double dist_scale)
        : views_(views), dist_scale_(dist_scale) {
        if (!(dist_scale > 0.0)) {
            throw ValidationError("distance scale must be positive");
        }
        opacity_.reserve(scene.size());
        for (const GaussianPrimitive& p : scene.primitives) {
            opacity_.push_back(activate_opacity(p.opacity_logit));
        }
        if (fn == ScoreFunctionId::LG) {
            gamma_ = gamma_volume(scene);
        }
    }

    [[nodiscard]] ScoreContext build(std::size_t stream_index, const ContributionStream& stream,
                                     const ContributionRecord& rec) const {
        ScoreContext ctx;
        const CameraView& view = views_[stream_index];
        if (view.ground_truth) {
            ctx.gt_color = view.ground_truth->color(static_cast<int>(rec.ray.row), static_cast<int>(rec.ray.col));
        }
        ctx.pixel_center = {static_cast<double>(rec.ray.col), static_cast<double>(rec.ray.row)};
        ctx.projected_mean = stream.projected_means[rec.primitive_id];
        ctx.dist_scale = dist_scale_;
        ctx.gamma = gamma_.empty() ? 1.0 : gamma_[rec.primitive_id];
        ctx.delta_t = rec.weight;
        ctx.opacity = opacity_[rec.primitive_id];
        return ctx;
    }

private:
    std::span<const CameraView> views_;
    double dist_scale_;
    std::vector<double> opacity_;
    std::vector<double> gamma_;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

std::span<const ScoreFunctionId> all_score_functions() noexcept { return kAllFunctions; }

std::string_view to_string(ScoreFunctionId fn) noexcept { return kNames[static_cast<std::size_t>(fn)]; }

std::string_view to_string(Aggregation agg) noexcept {
    switch (agg) {
    case Aggregation::Sum:
        return "sum";
    case Aggregation::Max:
        return "max";
    case Aggregation::PerRay:
        return "perray";
    }
    return "sum";
}

ScoreFunctionId parse_score_function(std::string_view name) {
    const std::string key = lower(name);
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == key) {
            return kAllFunctions[i];
        }
    }
    throw ValidationError("unknown score function '" + std::string(name) + "'");
}

Aggregation parse_aggregation(std::string_view name) {
    const std::string key = lower(name);
    if (key == "sum") {
        return Aggregation::Sum;
    }
    if (key == "max") {
        return Aggregation::Max;
    }
    if (key == "perray" || key == "per-ray" || key == "per_ray") {
        return Aggregation::PerRay;
    }
    throw ValidationError("unknown aggregation '" + std::string(name) + "'");
}

Aggregation default_aggregation(ScoreFunctionId fn) noexcept {
    switch (fn) {
    case F::LG:
    case F::MS:
        return Aggregation::Sum;
    case F::RS:
        return Aggregation::Max;
    default:
        return Aggregation::PerRay;
    }
}

bool needs_ground_truth(ScoreFunctionId fn) noexcept {
    return fn == F::V8 || (fn >= F::V9 && fn <= F::V18);
}

double primitive_volume(const GaussianPrimitive& prim) noexcept {
    return std::exp(prim.log_scale.x()) * std::exp(prim.log_scale.y()) * std::exp(prim.log_scale.z());
}

double normalized_volume(double volume, double reference) noexcept {
    const double ratio = reference > 0.0 ? volume / reference : 1.0;
    return std::pow(std::clamp(ratio, 0.0, 1.0), 0.1);
}

double volume_percentile90(const Scene& scene) {
    if (scene.empty()) {
        return 0.0;
    }
    std::vector<double> volumes;
    volumes.reserve(scene.size());
    for (const GaussianPrimitive& p : scene.primitives) {
        volumes.push_back(primitive_volume(p));
    }
    // Nearest rank: ceil(0.9 N), 1-based. Integer arithmetic avoids 0.9*N rounding.
    const std::size_t rank = (9 * volumes.size() + 9) / 10;
    const auto nth = volumes.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(volumes.begin(), nth, volumes.end());
    return *nth;
}

std::vector<double> gamma_volume(const Scene& scene) {
    const double reference = volume_percentile90(scene);
    std::vector<double> gamma;
    gamma.reserve(scene.size());
    for (const GaussianPrimitive& p : scene.primitives) {
        gamma.push_back(normalized_volume(primitive_volume(p), reference));
    }
    return gamma;
}

double per_ray_score(ScoreFunctionId fn, const ContributionRecord& rec, const ScoreContext& ctx) {
    const double alpha = rec.alpha;
    const double t = rec.transmittance_before;
    const double dt = ctx.delta_t;
    const double proximity = std::exp(-(ctx.pixel_center - ctx.projected_mean).norm() / ctx.dist_scale);

    auto gt = [&]() -> const Color& {
        if (!ctx.gt_color) {
            throw MissingGroundTruthError("score function " + std::string(to_string(fn)) +
                                          " needs a ground-truth pixel");
        }
        return *ctx.gt_color;
    };
    auto mean_l1 = [&] { return (gt() - rec.color.cwiseMax(0.0).cwiseMin(1.0)).cwiseAbs().mean(); };
    auto agreement = [&] { return clamp01(1.0 - mean_l1()); };

    switch (fn) {
    case F::LG:
        return ctx.opacity * ctx.gamma;
    case F::MS:
    case F::RS:
    case F::EG:
        return alpha * t;
    case F::V1:
        return ctx.opacity;
    case F::V2:
        return alpha;
    case F::V3:
        return dt;
    case F::V4:
        return proximity;
    case F::V5:
        return proximity * alpha;
    case F::V6:
        return proximity * alpha * t;
    case F::V7:
        return proximity * alpha * dt;
    case F::V8: {
        const Color& a = gt();
        const Color b = rec.color.cwiseMax(0.0).cwiseMin(1.0);
        const double na = a.norm();
        const double nb = b.norm();
        if (na == 0.0 || nb == 0.0) {
            return na == nb ? 1.0 : 0.0;
        }
        return clamp01(a.dot(b) / (na * nb));
    }
    case F::V9:
        return agreement();
    case F::V10:
        return std::exp(-mean_l1());
    case F::V11:
        return std::exp(-mean_l1()) * alpha;
    case F::V12:
        return agreement() * alpha;
    case F::V13:
        return agreement() * alpha * t;
    case F::V14:
        return agreement() * dt;
    case F::V15:
        return agreement() * proximity;
    case F::V16:
        return agreement() * proximity * alpha;
    case F::V17:
        return agreement() * proximity * alpha * t;
    case F::V18:
        return agreement() * proximity * dt;
    }
    return 0.0;
}

ScoreTable aggregate_cross_view(ScoreFunctionId fn, const Scene& scene, std::span<const ContributionStream> streams,
                                std::span<const CameraView> views, Aggregation mode, const ScoringOptions& opts) {
    check_inputs(fn, scene, streams, views);
    if (mode == Aggregation::PerRay) {
        throw ValidationError("cross-view aggregation must be sum or max");
    }
    const ContextBuilder contexts(fn, scene, views, opts.dist_scale);
    const std::vector<RayRef> rays = collect_rays(streams);
    const std::size_t chunks = (rays.size() + kRaysPerChunk - 1) / kRaysPerChunk;

    // Kernel evaluation runs in parallel; the reduction below walks chunks and
    // records in canonical order, so sums are identical for any worker count.
    std::vector<std::vector<std::pair<PrimitiveId, double>>> partial(chunks);
    parallel_for(chunks, opts.workers, [&](std::size_t c) {
        const std::size_t end = std::min(rays.size(), (c + 1) * kRaysPerChunk);
        auto& out = partial[c];
        for (std::size_t r = c * kRaysPerChunk; r < end; ++r) {
            const ContributionStream& stream = streams[rays[r].stream];
            for (const ContributionRecord& rec : stream.ray_records(stream.rays[rays[r].span])) {
                out.emplace_back(rec.primitive_id, per_ray_score(fn, rec, contexts.build(rays[r].stream, stream, rec)));
            }
        }
    });

    ScoreTable table;
    table.function = fn;
    table.aggregation = mode;
    table.views_used = streams.size();
    table.per_primitive.assign(scene.size(), 0.0);
    for (const auto& chunk : partial) {
        for (const auto& [id, score] : chunk) {
            double& slot = table.per_primitive[id];
            slot = mode == Aggregation::Sum ? slot + score : std::max(slot, score);
        }
    }
    return table;
}

void sort_ranked_entries(std::vector<RankedEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.primitive_id != b.primitive_id) {
            return a.primitive_id < b.primitive_id;
        }
        return a.position < b.position;
    });
}

RankedRays rank_per_ray(ScoreFunctionId fn, const Scene& scene, std::span<const ContributionStream> streams,
                        std::span<const CameraView> views, const ScoringOptions& opts) {
    check_inputs(fn, scene, streams, views);
    const ContextBuilder contexts(fn, scene, views, opts.dist_scale);
    const std::vector<RayRef> rays = collect_rays(streams);

    RankedRays ranked;
    ranked.function = fn;
    ranked.primitive_count = scene.size();
    ranked.views_used = streams.size();
    ranked.rays.resize(rays.size());

    const std::size_t chunks = (rays.size() + kRaysPerChunk - 1) / kRaysPerChunk;
    parallel_for(chunks, opts.workers, [&](std::size_t c) {
        const std::size_t end = std::min(rays.size(), (c + 1) * kRaysPerChunk);
        for (std::size_t r = c * kRaysPerChunk; r < end; ++r) {
            const ContributionStream& stream = streams[rays[r].stream];
            const RaySpan& span = stream.rays[rays[r].span];
            RankedRay& out = ranked.rays[r];
            out.ray = span.ray;
            out.entries.reserve(span.count);
            std::uint32_t position = 0;
            for (const ContributionRecord& rec : stream.ray_records(span)) {
                out.entries.push_back({rec.primitive_id, per_ray_score(fn, rec, contexts.build(rays[r].stream, stream, rec)), position++});
            }
            sort_ranked_entries(out.entries);
        }
    });
    return ranked;
}

} // namespace splatprune
