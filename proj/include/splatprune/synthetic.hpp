#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/rasterizer.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace splatprune {

enum class ShMode : std::uint8_t { Band0Only, FullRandom };

struct SynthSpec {
    std::uint64_t seed = 0;
    std::size_t n_primitives = 0;
    Vec3 bounds_min{-1.0, -1.0, -1.0};
    Vec3 bounds_max{1.0, 1.0, 1.0};
    double log_scale_min = -3.5; // exp -> ~0.03
    double log_scale_max = -2.0; // exp -> ~0.14
    double opacity_logit_min = -1.0;
    double opacity_logit_max = 3.0;
    ShMode sh_mode = ShMode::Band0Only;
};

void validate_synth_spec(const SynthSpec& spec);
[[nodiscard]] ShMode parse_sh_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(ShMode mode) noexcept;

// Deterministic in `spec`. Primitive i draws from its own counter-seeded
// generator; every field is representable in float32.
[[nodiscard]] Scene gen_scene(const SynthSpec& spec);

// k cameras evenly spaced on a horizontal (z-up) circle around look_at, all aimed
// at it. Square images of `resolution` pixels; principal point at the center.
[[nodiscard]] std::vector<CameraView> gen_camera_ring(int k, double radius, const Vec3& look_at, int resolution,
                                                      double fov_degrees = 60.0);

// Installs render(scene, cam, opts).image as each camera's ground truth.
[[nodiscard]] std::vector<CameraView> gen_ground_truth(const Scene& scene, std::vector<CameraView> cams,
                                                       const RenderOptions& opts = {});

} // namespace splatprune
