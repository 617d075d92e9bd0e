#include "splatprune/pruning.hpp"

#include "splatprune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace splatprune {

namespace {

PruneMask make_mask(std::vector<bool> retain, PruneSpec spec) {
    PruneMask mask;
    mask.retained_count = static_cast<std::size_t>(std::count(retain.begin(), retain.end(), true));
    mask.retain = std::move(retain);
    mask.spec = spec;
    return mask;
}

// 53 random bits mapped into the open interval (0, 1).
double open_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

std::string_view to_string(PruneTechnique t) noexcept {
    switch (t) {
    case PruneTechnique::CrossRatio:
        return "cross_ratio";
    case PruneTechnique::CrossThreshold:
        return "cross_threshold";
    case PruneTechnique::CrossStochastic:
        return "cross_stochastic";
    case PruneTechnique::PixelwiseTopK:
        return "pixelwise_topk";
    }
    return "cross_ratio";
}

PruneTechnique parse_prune_technique(std::string_view name) {
    for (PruneTechnique t : {PruneTechnique::CrossRatio, PruneTechnique::CrossThreshold,
                             PruneTechnique::CrossStochastic, PruneTechnique::PixelwiseTopK}) {
        if (to_string(t) == name) {
            return t;
        }
    }
    throw ValidationError("unknown pruning technique '" + std::string(name) + "'");
}

bool is_cross_view(PruneTechnique t) noexcept { return t != PruneTechnique::PixelwiseTopK; }

void validate_prune_spec(const PruneSpec& spec) {
    const double v = spec.value;
    switch (spec.technique) {
    case PruneTechnique::CrossRatio:
    case PruneTechnique::CrossStochastic:
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("pruning ratio must lie in [0, 1], got " + std::to_string(v));
        }
        break;
    case PruneTechnique::CrossThreshold:
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ValidationError("score threshold must be finite and >= 0, got " + std::to_string(v));
        }
        break;
    case PruneTechnique::PixelwiseTopK:
        if (!(v >= 1.0) || !std::isfinite(v) || std::floor(v) != v) {
            throw ValidationError("ranking threshold must be an integer >= 1, got " + std::to_string(v));
        }
        break;
    }
}

std::size_t pruned_count(double ratio, std::size_t n) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
        throw ValidationError("pruning ratio must lie in [0, 1]");
    }
    const double exact = ratio * static_cast<double>(n);
    return std::min(n, static_cast<std::size_t>(std::floor(exact + 1e-9 * std::max(1.0, exact))));
}

PruneMask prune_cross_ratio(const ScoreTable& table, double ratio) {
    const std::size_t n = table.per_primitive.size();
    const std::size_t drop = pruned_count(ratio, n);

    // Pruning order: lowest score first, higher id first among ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = table.per_primitive[a];
        const double sb = table.per_primitive[b];
        if (sa != sb) {
            return sa < sb;
        }
        return a > b;
    });

    std::vector<bool> retain(n, true);
    for (std::size_t i = 0; i < drop; ++i) {
        retain[order[i]] = false;
    }
    return make_mask(std::move(retain), {PruneTechnique::CrossRatio, ratio, 0, table.function});
}

PruneMask prune_cross_threshold(const ScoreTable& table, double tau) {
    validate_prune_spec({PruneTechnique::CrossThreshold, tau, 0, table.function});
    std::vector<bool> retain(table.per_primitive.size());
    for (std::size_t i = 0; i < retain.size(); ++i) {
        retain[i] = table.per_primitive[i] >= tau;
    }
    return make_mask(std::move(retain), {PruneTechnique::CrossThreshold, tau, 0, table.function});
}

PruneMask prune_cross_stochastic(const ScoreTable& table, double ratio, std::uint64_t seed) {
    const std::size_t n = table.per_primitive.size();
    const std::size_t keep = n - pruned_count(ratio, n);

    // Efraimidis-Spirakis: key = log(u) / w, keep the largest keys. One draw per
    // primitive in id order so the stream position never depends on scores.
    std::mt19937_64 rng(seed);
    struct Keyed {
        double key;
        std::size_t id;
    };
    std::vector<Keyed> positive;
    std::vector<std::size_t> zero;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = open_unit(rng);
        const double w = table.per_primitive[i];
        if (w > 0.0) {
            positive.push_back({std::log(u) / w, i});
        } else {
            zero.push_back(i);
        }
    }
    std::sort(positive.begin(), positive.end(), [](const Keyed& a, const Keyed& b) {
        if (a.key != b.key) {
            return a.key > b.key;
        }
        return a.id < b.id;
    });

    std::vector<bool> retain(n, false);
    std::size_t taken = 0;
    for (std::size_t i = 0; i < positive.size() && taken < keep; ++i, ++taken) {
        retain[positive[i].id] = true;
    }
    for (std::size_t i = 0; i < zero.size() && taken < keep; ++i, ++taken) {
        retain[zero[i]] = true;
    }
    return make_mask(std::move(retain), {PruneTechnique::CrossStochastic, ratio, seed, table.function});
}

PruneMask prune_pixelwise(const RankedRays& ranked, std::size_t n) {
    if (n < 1) {
        throw ValidationError("ranking threshold must be at least 1");
    }
    std::vector<bool> retain(ranked.primitive_count, false);
    for (const RankedRay& ray : ranked.rays) {
        const std::size_t top = std::min(n, ray.entries.size());
        for (std::size_t k = 0; k < top; ++k) {
            const PrimitiveId id = ray.entries[k].primitive_id;
            if (id >= retain.size()) {
                throw DimensionMismatchError("ranked ray names primitive " + std::to_string(id) +
                                             " outside the scene");
            }
            retain[id] = true;
        }
    }
    return make_mask(std::move(retain),
                     {PruneTechnique::PixelwiseTopK, static_cast<double>(n), 0, ranked.function});
}

PrunedScene apply_mask(const Scene& scene, const PruneMask& mask) {
    if (mask.retain.size() != scene.size()) {
        throw DimensionMismatchError("mask has " + std::to_string(mask.retain.size()) + " entries but scene has " +
                                     std::to_string(scene.size()) + " primitives");
    }
    PrunedScene out;
    out.scene.source_tag = scene.source_tag;
    out.old_to_new.assign(scene.size(), -1);
    for (std::size_t i = 0; i < scene.size(); ++i) {
        if (mask.retain[i]) {
            out.old_to_new[i] = static_cast<std::int64_t>(out.scene.primitives.size());
            out.scene.primitives.push_back(scene.primitives[i]);
        }
    }
    return out;
}

} // namespace splatprune
