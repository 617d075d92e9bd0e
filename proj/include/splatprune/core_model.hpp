#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace splatprune {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Linear RGB, nominally in [0,1]. SH evaluation may exceed 1 before blending.
using Color = Eigen::Vector3d;

inline constexpr int kShCoeffCount = 16; // degree 3: (3+1)^2
inline constexpr int kParamsPerPrimitive = 59;

using ShCoeffs = Eigen::Matrix<double, kShCoeffCount, 3>;

using PrimitiveId = std::uint32_t;

// One anisotropic 3D Gaussian, stored in checkpoint conventions: log-scales,
// opacity logit and an unnormalized (w,x,y,z) quaternion.
struct GaussianPrimitive {
    Vec3 position = Vec3::Zero();
    Vec3 log_scale = Vec3::Zero();
    Vec4 rotation{1.0, 0.0, 0.0, 0.0};
    double opacity_logit = 0.0;
    ShCoeffs sh_coeffs = ShCoeffs::Zero();
};

// Primitive ids are indices into `primitives`.
struct Scene {
    std::vector<GaussianPrimitive> primitives;
    std::string source_tag;

    [[nodiscard]] std::size_t size() const noexcept { return primitives.size(); }
    [[nodiscard]] bool empty() const noexcept { return primitives.empty(); }
};

// H x W x 3, row-major, interleaved channels.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    [[nodiscard]] std::size_t index(int row, int col, int ch = 0) const noexcept {
        return (static_cast<std::size_t>(row) * width + col) * 3 + ch;
    }
    double& at(int row, int col, int ch) noexcept { return pixels[index(row, col, ch)]; }
    [[nodiscard]] double at(int row, int col, int ch) const noexcept { return pixels[index(row, col, ch)]; }
    [[nodiscard]] Color color(int row, int col) const noexcept {
        const std::size_t i = index(row, col);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    void set_color(int row, int col, const Color& c) noexcept {
        const std::size_t i = index(row, col);
        pixels[i] = c.x();
        pixels[i + 1] = c.y();
        pixels[i + 2] = c.z();
    }
    [[nodiscard]] bool same_shape(const Image& other) const noexcept {
        return width == other.width && height == other.height;
    }
};

// 8-bit storage code: clamp to [0,1], then round half up of v * 255.
[[nodiscard]] std::uint8_t quantize_channel(double v) noexcept;
// Snaps every channel to the nearest 8-bit level (k / 255).
[[nodiscard]] Image quantize_8bit(const Image& image);

// Pinhole camera. Pixel centers sit at integer coordinates: pixel (row, col)
// is the point (col, row) in the image plane.
struct CameraView {
    int width = 1;
    int height = 1;
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    Mat3 rotation = Mat3::Identity(); // world -> camera
    Vec3 translation = Vec3::Zero();  // world -> camera
    std::string name;
    std::optional<Image> ground_truth;

    [[nodiscard]] Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
    [[nodiscard]] Vec3 center() const { return -rotation.transpose() * translation; }
};

// Throws ValidationError when a field is non-finite or the rotation is zero.
void validate_primitive(const GaussianPrimitive& prim);
// Throws ValidationError on bad size/focal/rotation or a mis-sized ground truth.
void validate_camera(const CameraView& cam, double orthonormal_tol = 1e-6);

[[nodiscard]] double activate_opacity(double opacity_logit) noexcept;

// Unit quaternion (w,x,y,z) -> rotation matrix. Throws DegenerateRotationError
// when the norm is below 1e-12.
[[nodiscard]] Mat3 quaternion_to_matrix(const Vec4& q);

// Sigma = R S S^T R^T with S = diag(exp(log_scale)); quaternion normalized first.
[[nodiscard]] Mat3 build_covariance_3d(const GaussianPrimitive& prim);

// Real SH up to degree 3 plus the +0.5 offset, clamped below at 0.
[[nodiscard]] Color evaluate_sh(const ShCoeffs& coeffs, const Vec3& view_dir);

inline constexpr double kShC0 = 0.28209479177387814;

} // namespace splatprune
