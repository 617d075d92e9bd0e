#include "splatprune/metrics.hpp"

#include "splatprune/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace splatprune {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kSsimC2 = (0.03 * 1.0) * (0.03 * 1.0);

void require_same_shape(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw DimensionMismatchError("image sizes differ: " + std::to_string(a.width) + "x" +
                                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                     std::to_string(b.height));
    }
}

std::array<double, kSsimWindow> gaussian_window() {
    std::array<double, kSsimWindow> w{};
    double total = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
        total += w[i];
    }
    for (double& v : w) {
        v /= total;
    }
    return w;
}

// Separable valid-mode filtering of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int width, int height,
                                 const std::array<double, kSsimWindow>& w) {
    const int out_w = width - kSsimWindow + 1;
    const int out_h = height - kSsimWindow + 1;
    std::vector<double> horiz(static_cast<std::size_t>(out_w) * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                acc += w[k] * plane[static_cast<std::size_t>(r) * width + c + k];
            }
            horiz[static_cast<std::size_t>(r) * out_w + c] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
    for (int r = 0; r < out_h; ++r) {
        for (int c = 0; c < out_w; ++c) {
            double acc = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                acc += w[k] * horiz[static_cast<std::size_t>(r + k) * out_w + c];
            }
            out[static_cast<std::size_t>(r) * out_w + c] = acc;
        }
    }
    return out;
}

double ssim_channel(const Image& a, const Image& b, int ch, const std::array<double, kSsimWindow>& w) {
    const std::size_t n = static_cast<std::size_t>(a.width) * a.height;
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double va = a.pixels[i * 3 + ch];
        const double vb = b.pixels[i * 3 + ch];
        pa[i] = va;
        pb[i] = vb;
        paa[i] = va * va;
        pbb[i] = vb * vb;
        pab[i] = va * vb;
    }
    const auto mu_a = filter_valid(pa, a.width, a.height, w);
    const auto mu_b = filter_valid(pb, a.width, a.height, w);
    const auto e_aa = filter_valid(paa, a.width, a.height, w);
    const auto e_bb = filter_valid(pbb, a.width, a.height, w);
    const auto e_ab = filter_valid(pab, a.width, a.height, w);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double var_a = e_aa[i] - ma * ma;
        const double var_b = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
                 ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
    }
    return total / static_cast<double>(mu_a.size());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

double mse(const Image& a, const Image& b) {
    require_same_shape(a, b);
    if (a.pixels.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        total += d * d;
    }
    return total / static_cast<double>(a.pixels.size());
}

double psnr(const Image& a, const Image& b) {
    const double err = mse(a, b);
    if (err <= 0.0) {
        return kPsnrCap;
    }
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / err));
}

double ssim(const Image& a, const Image& b) {
    require_same_shape(a, b);
    if (a.width < kSsimWindow || a.height < kSsimWindow) {
        throw ValidationError("SSIM needs images of at least 11x11 pixels");
    }
    const auto w = gaussian_window();
    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        total += ssim_channel(a, b, ch, w);
    }
    return total / 3.0;
}

double benchmark_fps(const Scene& scene, std::span<const CameraView> cams, RenderOptions opts, int repeats) {
    if (repeats < 1) {
        throw ValidationError("benchmark needs at least one repeat");
    }
    if (cams.empty()) {
        throw ValidationError("benchmark needs at least one camera");
    }
    opts.record_contributions = false;
    (void)render(scene, cams.front(), opts);

    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(repeats));
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        for (const CameraView& cam : cams) {
            (void)render(scene, cam, opts);
        }
        const double secs = std::max(seconds_since(start), 1e-9);
        rates.push_back(static_cast<double>(cams.size()) / secs);
    }
    std::sort(rates.begin(), rates.end());
    const std::size_t mid = rates.size() / 2;
    return rates.size() % 2 == 1 ? rates[mid] : 0.5 * (rates[mid - 1] + rates[mid]);
}

MetricsReport evaluate_scene(const Scene& scene, std::span<const CameraView> cams, const RenderOptions& opts,
                             const EvalOptions& eval) {
    MetricsReport report;
    report.scene_name = scene.source_tag;
    report.primitive_count = scene.size();
    RenderOptions plain = opts;
    plain.record_contributions = false;

    for (std::size_t v = 0; v < cams.size(); ++v) {
        const CameraView& cam = cams[v];
        if (!cam.ground_truth) {
            throw MissingGroundTruthError("view '" + cam.name + "' has no ground-truth image");
        }
        const auto start = std::chrono::steady_clock::now();
        RenderOutput out = render(scene, cam, plain, static_cast<std::uint32_t>(v));
        report.render_wall_time += seconds_since(start);
        if (eval.quantize_render) {
            out.image = quantize_8bit(out.image);
        }
        ViewMetrics vm;
        vm.name = cam.name;
        vm.psnr = psnr(out.image, *cam.ground_truth);
        vm.ssim = (cam.width >= 11 && cam.height >= 11) ? ssim(out.image, *cam.ground_truth) : 0.0;
        report.per_view.push_back(std::move(vm));
    }
    if (!report.per_view.empty()) {
        for (const ViewMetrics& vm : report.per_view) {
            report.psnr += vm.psnr;
            report.ssim += vm.ssim;
        }
        report.psnr /= static_cast<double>(report.per_view.size());
        report.ssim /= static_cast<double>(report.per_view.size());
        report.fps = benchmark_fps(scene, cams, plain, eval.fps_repeats);
    }
    return report;
}

} // namespace splatprune
