#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/rasterizer.hpp"

#include <span>
#include <string>
#include <vector>

namespace splatprune {

inline constexpr double kPsnrCap = 100.0;

struct ViewMetrics {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct MetricsReport {
    std::string scene_name;
    double psnr = 0.0; // mean over views
    double ssim = 0.0; // mean over views
    double fps = 0.0;
    std::size_t primitive_count = 0;
    double render_wall_time = 0.0; // seconds
    std::vector<ViewMetrics> per_view;
};

[[nodiscard]] double mse(const Image& a, const Image& b);
// 10 log10(1 / MSE), capped at 100 dB. Throws DimensionMismatchError.
[[nodiscard]] double psnr(const Image& a, const Image& b);
// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 0.01, K2 0.03, data range 1,
// valid-region mean per channel, then averaged over channels. Needs both sides >= 11.
[[nodiscard]] double ssim(const Image& a, const Image& b);

// Median over `repeats` of frames / second for rendering all `cams`, after one
// untimed warm-up frame. Recording is forced off.
[[nodiscard]] double benchmark_fps(const Scene& scene, std::span<const CameraView> cams, RenderOptions opts,
                                   int repeats);

struct EvalOptions {
    int fps_repeats = 1;
    // Snap renders to 8-bit levels first, as if saved to PNG; use when the
    // ground truth itself came from 8-bit files.
    bool quantize_render = false;
};

// Renders every camera, compares against its ground truth and times the renders.
// Throws MissingGroundTruthError if any camera lacks ground truth.
[[nodiscard]] MetricsReport evaluate_scene(const Scene& scene, std::span<const CameraView> cams,
                                           const RenderOptions& opts, const EvalOptions& eval = {});

} // namespace splatprune
