#include "splatprune/rasterizer.hpp"

#include "splatprune/errors.hpp"
#include "splatprune/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace splatprune {

namespace {

bool depth_order(const Projected2DGaussian* a, const Projected2DGaussian* b) {
    if (a->depth != b->depth) {
        return a->depth < b->depth;
    }
    return a->primitive_id < b->primitive_id;
}

// Front-to-back compositing for one pixel over an already depth-sorted candidate list.
// Appends records when `records` is non-null and returns the hit count.
std::uint32_t composite_pixel(std::span<const Projected2DGaussian* const> sorted, int row, int col,
                              const RenderOptions& opts, std::uint32_t view, Image& image,
                              std::vector<ContributionRecord>* records) {
    const Vec2 pixel{static_cast<double>(col), static_cast<double>(row)};
    double transmittance = 1.0;
    Color accum = Color::Zero();
    std::uint32_t hits = 0;

    for (const Projected2DGaussian* g : sorted) {
        if (!g->support.contains(row, col)) {
            continue;
        }
        double alpha = g->sigma * evaluate_2d_gaussian(*g, pixel);
        if (alpha < opts.alpha_threshold) {
            continue;
        }
        alpha = std::min(alpha, opts.alpha_cap);
        const double weight = alpha * transmittance;
        accum += g->color * weight;
        if (records != nullptr) {
            records->push_back({RayId{view, static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col)},
                                g->primitive_id, alpha, transmittance, weight, g->color});
        }
        ++hits;
        transmittance *= 1.0 - alpha;
        if (transmittance < opts.transmittance_floor) {
            break;
        }
    }

    accum += transmittance * opts.background;
    image.set_color(row, col, accum.cwiseMax(0.0).cwiseMin(1.0));
    return hits;
}

RenderOutput make_output(const CameraView& cam, const RenderOptions& opts, std::uint32_t view_index,
                         const std::vector<std::optional<Projected2DGaussian>>& projected) {
    RenderOutput out;
    out.image = Image(cam.width, cam.height);
    out.per_ray_hit_count.assign(static_cast<std::size_t>(cam.width) * cam.height, 0);
    if (opts.record_contributions) {
        ContributionStream stream;
        stream.view = view_index;
        stream.width = cam.width;
        stream.height = cam.height;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        stream.projected_means.assign(projected.size(), Vec2{nan, nan});
        for (const auto& g : projected) {
            if (g) {
                stream.projected_means[g->primitive_id] = g->mean2d;
            }
        }
        out.contributions = std::move(stream);
    }
    return out;
}

// Appends one pixel's records to the stream-in-progress and its RaySpan.
void push_ray(std::vector<ContributionRecord>& pixel_records, std::vector<ContributionRecord>& records,
              std::vector<RaySpan>& rays) {
    if (pixel_records.empty()) {
        return;
    }
    rays.push_back({pixel_records.front().ray, records.size(), pixel_records.size()});
    records.insert(records.end(), pixel_records.begin(), pixel_records.end());
    pixel_records.clear();
}

} // namespace

void validate_render_options(const RenderOptions& opts) {
    if (!(opts.alpha_threshold > 0.0 && opts.alpha_threshold < opts.alpha_cap && opts.alpha_cap <= 1.0)) {
        throw ValidationError("render options require 0 < alpha_threshold < alpha_cap <= 1");
    }
    if (!(opts.transmittance_floor >= 0.0 && opts.transmittance_floor < 1.0)) {
        throw ValidationError("render options require 0 <= transmittance_floor < 1");
    }
    if (opts.tile_size < 1) {
        throw ValidationError("tile size must be at least 1 pixel");
    }
    if (!opts.background.array().isFinite().all()) {
        throw ValidationError("background color must be finite");
    }
}

std::vector<std::optional<Projected2DGaussian>> project_scene(const Scene& scene, const CameraView& cam,
                                                              unsigned workers) {
    std::vector<std::optional<Projected2DGaussian>> projected(scene.size());
    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (scene.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(scene.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            projected[i] = project_gaussian(scene.primitives[i], static_cast<PrimitiveId>(i), cam);
        }
    });
    return projected;
}

TileLists assign_tiles(std::span<const Projected2DGaussian> projected, const CameraView& cam, int tile_size) {
    TileLists tiles;
    tiles.tile_size = tile_size;
    tiles.tiles_x = (cam.width + tile_size - 1) / tile_size;
    tiles.tiles_y = (cam.height + tile_size - 1) / tile_size;
    tiles.ids.resize(static_cast<std::size_t>(tiles.tiles_x) * tiles.tiles_y);

    std::vector<std::vector<const Projected2DGaussian*>> buckets(tiles.ids.size());
    for (const Projected2DGaussian& g : projected) {
        if (g.support.empty()) {
            continue;
        }
        for (int ty = g.support.row_min / tile_size; ty <= g.support.row_max / tile_size; ++ty) {
            for (int tx = g.support.col_min / tile_size; tx <= g.support.col_max / tile_size; ++tx) {
                buckets[static_cast<std::size_t>(ty) * tiles.tiles_x + tx].push_back(&g);
            }
        }
    }
    for (std::size_t t = 0; t < buckets.size(); ++t) {
        std::sort(buckets[t].begin(), buckets[t].end(), depth_order);
        tiles.ids[t].reserve(buckets[t].size());
        for (const Projected2DGaussian* g : buckets[t]) {
            tiles.ids[t].push_back(g->primitive_id);
        }
    }
    return tiles;
}

RenderOutput render(const Scene& scene, const CameraView& cam, const RenderOptions& opts,
                    std::uint32_t view_index) {
    validate_render_options(opts);
    const auto projected = project_scene(scene, cam, opts.workers);
    RenderOutput out = make_output(cam, opts, view_index, projected);

    std::vector<Projected2DGaussian> visible;
    visible.reserve(projected.size());
    for (const auto& g : projected) {
        if (g) {
            visible.push_back(*g);
        }
    }
    std::vector<const Projected2DGaussian*> by_id(scene.size(), nullptr);
    for (const Projected2DGaussian& g : visible) {
        by_id[g.primitive_id] = &g;
    }
    const TileLists tiles = assign_tiles(visible, cam, opts.tile_size);

    struct TileBuffer {
        std::vector<ContributionRecord> records;
        std::vector<RaySpan> rays;
    };
    std::vector<TileBuffer> buffers(opts.record_contributions ? tiles.ids.size() : 0);

    parallel_for(tiles.ids.size(), opts.workers, [&](std::size_t t) {
        std::vector<const Projected2DGaussian*> list;
        list.reserve(tiles.ids[t].size());
        for (PrimitiveId id : tiles.ids[t]) {
            list.push_back(by_id[id]);
        }
        const int tx = static_cast<int>(t % tiles.tiles_x);
        const int ty = static_cast<int>(t / tiles.tiles_x);
        const int row_end = std::min(cam.height, (ty + 1) * opts.tile_size);
        const int col_end = std::min(cam.width, (tx + 1) * opts.tile_size);

        std::vector<ContributionRecord> pixel_records;
        std::vector<ContributionRecord>* sink = opts.record_contributions ? &pixel_records : nullptr;
        for (int row = ty * opts.tile_size; row < row_end; ++row) {
            for (int col = tx * opts.tile_size; col < col_end; ++col) {
                out.per_ray_hit_count[static_cast<std::size_t>(row) * cam.width + col] =
                    composite_pixel(list, row, col, opts, view_index, out.image, sink);
                if (sink != nullptr) {
                    // Ray offsets are tile-local here and rebased when tiles are concatenated.
                    push_ray(pixel_records, buffers[t].records, buffers[t].rays);
                }
            }
        }
    });

    if (opts.record_contributions) {
        ContributionStream& stream = *out.contributions;
        std::size_t total = 0;
        for (const TileBuffer& b : buffers) {
            total += b.records.size();
        }
        stream.records.reserve(total);
        for (TileBuffer& b : buffers) {
            const std::size_t base = stream.records.size();
            for (RaySpan span : b.rays) {
                span.begin += base;
                stream.rays.push_back(span);
            }
            stream.records.insert(stream.records.end(), b.records.begin(), b.records.end());
        }
    }
    return out;
}

RenderOutput render_oracle(const Scene& scene, const CameraView& cam, const RenderOptions& opts,
                           std::uint32_t view_index) {
    validate_render_options(opts);
    const auto projected = project_scene(scene, cam, 1);
    RenderOutput out = make_output(cam, opts, view_index, projected);

    std::vector<const Projected2DGaussian*> candidates;
    std::vector<ContributionRecord> pixel_records;
    std::vector<ContributionRecord>* sink = opts.record_contributions ? &pixel_records : nullptr;
    std::vector<ContributionRecord> all_records;
    std::vector<RaySpan> all_rays;
    std::vector<std::vector<ContributionRecord>> per_pixel;
    if (opts.record_contributions) {
        per_pixel.resize(static_cast<std::size_t>(cam.width) * cam.height);
    }

    for (int row = 0; row < cam.height; ++row) {
        for (int col = 0; col < cam.width; ++col) {
            candidates.clear();
            for (const auto& g : projected) {
                if (g && g->support.contains(row, col)) {
                    candidates.push_back(&*g);
                }
            }
            std::sort(candidates.begin(), candidates.end(), depth_order);
            const std::size_t pix = static_cast<std::size_t>(row) * cam.width + col;
            out.per_ray_hit_count[pix] = composite_pixel(candidates, row, col, opts, view_index, out.image, sink);
            if (sink != nullptr) {
                per_pixel[pix] = std::move(pixel_records);
                pixel_records.clear();
            }
        }
    }

    if (opts.record_contributions) {
        // Reorder rays into the canonical tile-row-major layout used by render().
        const int ts = opts.tile_size;
        const int tiles_x = (cam.width + ts - 1) / ts;
        const int tiles_y = (cam.height + ts - 1) / ts;
        for (int ty = 0; ty < tiles_y; ++ty) {
            for (int tx = 0; tx < tiles_x; ++tx) {
                for (int row = ty * ts; row < std::min(cam.height, (ty + 1) * ts); ++row) {
                    for (int col = tx * ts; col < std::min(cam.width, (tx + 1) * ts); ++col) {
                        push_ray(per_pixel[static_cast<std::size_t>(row) * cam.width + col], all_records,
                                 all_rays);
                    }
                }
            }
        }
        out.contributions->records = std::move(all_records);
        out.contributions->rays = std::move(all_rays);
    }
    return out;
}

std::vector<ContributionStream> record_streams(const Scene& scene, std::span<const CameraView> cams,
                                               RenderOptions opts) {
    opts.record_contributions = true;
    std::vector<ContributionStream> streams;
    streams.reserve(cams.size());
    for (std::size_t v = 0; v < cams.size(); ++v) {
        streams.push_back(std::move(*render(scene, cams[v], opts, static_cast<std::uint32_t>(v)).contributions));
    }
    return streams;
}

} // namespace splatprune
