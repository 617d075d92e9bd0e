#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/projection.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace splatprune {

struct RenderOptions {
    double alpha_threshold = 1.0 / 255.0;
    double alpha_cap = 0.99;
    double transmittance_floor = 1e-4;
    Color background = Color::Zero();
    bool record_contributions = false;
    int tile_size = 16;
    unsigned workers = 0; // 0 = hardware concurrency; output does not depend on it
};

// Throws ValidationError when thresholds or tile size are out of range.
void validate_render_options(const RenderOptions& opts);

struct RayId {
    std::uint32_t view = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    friend bool operator==(const RayId&, const RayId&) = default;
};

// One (ray, primitive) blending event. A record exists iff the primitive
// passed the alpha threshold on this ray before the ray terminated.
struct ContributionRecord {
    RayId ray;
    PrimitiveId primitive_id = 0;
    double alpha = 0.0;
    double transmittance_before = 1.0;
    double weight = 0.0; // alpha * transmittance_before
    Color color = Color::Zero();
};

// Records of one ray occupy [begin, begin + count) of ContributionStream::records.
struct RaySpan {
    RayId ray;
    std::size_t begin = 0;
    std::size_t count = 0;
};

// All records of one view, front to back within each ray. Rays appear in
// tile-row-major order, row-major inside a tile; rays without hits are omitted.
struct ContributionStream {
    std::uint32_t view = 0;
    int width = 0;
    int height = 0;
    std::vector<ContributionRecord> records;
    std::vector<RaySpan> rays;
    // Projected 2D mean per primitive id; NaN when the primitive was culled.
    std::vector<Vec2> projected_means;

    [[nodiscard]] std::span<const ContributionRecord> ray_records(const RaySpan& span) const {
        return {records.data() + span.begin, span.count};
    }
};

struct RenderOutput {
    Image image;
    std::optional<ContributionStream> contributions;
    std::vector<std::uint32_t> per_ray_hit_count; // H x W, row-major
};

struct TileLists {
    int tile_size = 16;
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<std::vector<PrimitiveId>> ids; // tile-row-major; each list sorted by (depth, id)
};

// Projects every primitive; culled entries are std::nullopt. Indexed by primitive id.
[[nodiscard]] std::vector<std::optional<Projected2DGaussian>> project_scene(const Scene& scene,
                                                                            const CameraView& cam,
                                                                            unsigned workers = 0);

[[nodiscard]] TileLists assign_tiles(std::span<const Projected2DGaussian> projected, const CameraView& cam,
                                     int tile_size);

// Tile-based front-to-back compositing.
[[nodiscard]] RenderOutput render(const Scene& scene, const CameraView& cam, const RenderOptions& opts,
                                  std::uint32_t view_index = 0);

// Reference renderer: every pixel scans all projected primitives. Same contract
// as render(), meant for small scenes.
[[nodiscard]] RenderOutput render_oracle(const Scene& scene, const CameraView& cam, const RenderOptions& opts,
                                         std::uint32_t view_index = 0);

// Renders every view with recording on; view index = position in `cams`.
[[nodiscard]] std::vector<ContributionStream> record_streams(const Scene& scene,
                                                             std::span<const CameraView> cams,
                                                             RenderOptions opts);

} // namespace splatprune
