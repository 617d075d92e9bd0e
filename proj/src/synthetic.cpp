#include "splatprune/synthetic.hpp"

#include "splatprune/errors.hpp"
#include "splatprune/parallel.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace splatprune {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// [0, 1) from the top 53 bits; independent of the standard library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

GaussianPrimitive make_primitive(const SynthSpec& spec, std::size_t index) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index)));
    GaussianPrimitive p;
    for (int k = 0; k < 3; ++k) {
        p.position[k] = f32(uniform(rng, spec.bounds_min[k], spec.bounds_max[k]));
    }
    for (int k = 0; k < 3; ++k) {
        p.log_scale[k] = f32(uniform(rng, spec.log_scale_min, spec.log_scale_max));
    }

    // Shoemake's uniform random rotation.
    const double u1 = unit(rng);
    const double u2 = 2.0 * std::numbers::pi * unit(rng);
    const double u3 = 2.0 * std::numbers::pi * unit(rng);
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    Vec4 q{a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)};
    for (int k = 0; k < 4; ++k) {
        q[k] = f32(q[k]);
    }
    if (q.norm() < 1e-6) {
        q = Vec4{1.0, 0.0, 0.0, 0.0};
    }
    p.rotation = q;

    p.opacity_logit = f32(uniform(rng, spec.opacity_logit_min, spec.opacity_logit_max));

    // Band 0 chosen so the base color lands in [0.05, 0.95].
    for (int c = 0; c < 3; ++c) {
        p.sh_coeffs(0, c) = f32((uniform(rng, 0.05, 0.95) - 0.5) / kShC0);
    }
    if (spec.sh_mode == ShMode::FullRandom) {
        for (int k = 1; k < kShCoeffCount; ++k) {
            for (int c = 0; c < 3; ++c) {
                p.sh_coeffs(k, c) = f32(uniform(rng, -0.15, 0.15));
            }
        }
    }
    return p;
}

} // namespace

void validate_synth_spec(const SynthSpec& spec) {
    if (!(spec.bounds_min.array() < spec.bounds_max.array()).all()) {
        throw ValidationError("synthetic bounds must be a non-empty box");
    }
    if (!(spec.log_scale_min <= spec.log_scale_max) || !(spec.opacity_logit_min <= spec.opacity_logit_max)) {
        throw ValidationError("synthetic ranges must satisfy min <= max");
    }
}

ShMode parse_sh_mode(std::string_view name) {
    if (name == "band0" || name == "band0-only") {
        return ShMode::Band0Only;
    }
    if (name == "full" || name == "full-random") {
        return ShMode::FullRandom;
    }
    throw ValidationError("unknown sh_mode '" + std::string(name) + "'");
}

std::string_view to_string(ShMode mode) noexcept { return mode == ShMode::Band0Only ? "band0-only" : "full-random"; }

Scene gen_scene(const SynthSpec& spec) {
    validate_synth_spec(spec);
    Scene scene;
    scene.source_tag = "synthetic seed=" + std::to_string(spec.seed) + " n=" + std::to_string(spec.n_primitives);
    scene.primitives.resize(spec.n_primitives);
    parallel_for(spec.n_primitives, 1, [&](std::size_t i) { scene.primitives[i] = make_primitive(spec, i); });
    return scene;
}

std::vector<CameraView> gen_camera_ring(int k, double radius, const Vec3& look_at, int resolution,
                                        double fov_degrees) {
    if (k < 1 || !(radius > 0.0) || resolution < 1 || !(fov_degrees > 0.0 && fov_degrees < 180.0)) {
        throw ValidationError("camera ring needs k >= 1, radius > 0, resolution >= 1 and 0 < fov < 180");
    }
    const Vec3 up = Vec3::UnitZ();
    const double focal = 0.5 * resolution / std::tan(0.5 * fov_degrees * std::numbers::pi / 180.0);

    std::vector<CameraView> cams;
    cams.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / k;
        const Vec3 center = look_at + radius * Vec3{std::cos(theta), std::sin(theta), 0.0};
        const Vec3 forward = (look_at - center).normalized();
        const Vec3 right = forward.cross(up).normalized();
        const Vec3 down = forward.cross(right);

        CameraView cam;
        cam.width = resolution;
        cam.height = resolution;
        cam.fx = focal;
        cam.fy = focal;
        cam.cx = resolution / 2.0;
        cam.cy = resolution / 2.0;
        cam.rotation.row(0) = right.transpose();
        cam.rotation.row(1) = down.transpose();
        cam.rotation.row(2) = forward.transpose();
        cam.translation = -cam.rotation * center;
        cam.name = "view_" + std::to_string(j);
        cams.push_back(std::move(cam));
    }
    return cams;
}

std::vector<CameraView> gen_ground_truth(const Scene& scene, std::vector<CameraView> cams, const RenderOptions& opts) {
    RenderOptions plain = opts;
    plain.record_contributions = false;
    for (std::size_t v = 0; v < cams.size(); ++v) {
        cams[v].ground_truth = render(scene, cams[v], plain, static_cast<std::uint32_t>(v)).image;
    }
    return cams;
}

} // namespace splatprune
