#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/rasterizer.hpp"
#include "splatprune/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace splatprune::testing_support {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// Identity pose looking down +z, principal point at the image center.
inline CameraView pinhole(int width, int height, double focal, std::string name = "cam") {
    CameraView cam;
    cam.width = width;
    cam.height = height;
    cam.fx = focal;
    cam.fy = focal;
    cam.cx = width / 2.0;
    cam.cy = height / 2.0;
    cam.name = std::move(name);
    return cam;
}

// Isotropic splat whose view-independent color is exactly `rgb`.
inline GaussianPrimitive splat(const Vec3& pos, double scale, double opacity, const Color& rgb) {
    GaussianPrimitive p;
    p.position = pos;
    p.log_scale = Vec3::Constant(std::log(scale));
    p.opacity_logit = logit(opacity);
    p.sh_coeffs.row(0) = ((rgb.array() - 0.5) / kShC0).matrix().transpose();
    return p;
}

// Hand-rolled generator for property tests; every draw comes from one seeded stream.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::uint64_t bits() { return rng_(); }

    Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    Vec4 quaternion() {
        std::normal_distribution<double> n;
        Vec4 q{n(rng_), n(rng_), n(rng_), n(rng_)};
        return q.norm() < 1e-6 ? Vec4{1, 0, 0, 0} : q;
    }

    GaussianPrimitive primitive() {
        GaussianPrimitive p;
        p.position = vec3(-1.0, 1.0);
        p.log_scale = vec3(-3.5, -1.5);
        p.rotation = quaternion();
        p.opacity_logit = uniform(-2.0, 4.0);
        for (int k = 0; k < kShCoeffCount; ++k) {
            for (int c = 0; c < 3; ++c) {
                p.sh_coeffs(k, c) = uniform(-0.6, 0.6) / (k == 0 ? 1.0 : 2.0);
            }
        }
        return p;
    }

    Scene scene(std::size_t n) {
        SynthSpec spec;
        spec.seed = bits();
        spec.n_primitives = n;
        spec.sh_mode = integer(0, 1) == 0 ? ShMode::Band0Only : ShMode::FullRandom;
        return gen_scene(spec);
    }

    // Camera on a random point of a sphere around the origin, aimed at it.
    std::vector<CameraView> cameras(int count, int resolution) {
        std::vector<CameraView> cams;
        for (int i = 0; i < count; ++i) {
            auto ring = gen_camera_ring(integer(3, 9), uniform(2.5, 4.5), vec3(-0.2, 0.2), resolution,
                                        uniform(45.0, 75.0));
            CameraView cam = ring[static_cast<std::size_t>(integer(0, static_cast<int>(ring.size()) - 1))];
            cam.name = "view_" + std::to_string(i);
            cams.push_back(std::move(cam));
        }
        return cams;
    }

private:
    std::mt19937_64 rng_;
};

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("splatprune_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace splatprune::testing_support
