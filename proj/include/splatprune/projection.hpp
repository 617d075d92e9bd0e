#pragma once

#include "splatprune/core_model.hpp"

#include <Eigen/Core>
#include <optional>

namespace splatprune {

inline constexpr double kNearPlane = 0.01;
// Added to the screen-space covariance diagonal (px^2).
inline constexpr double kLowPassDilation = 0.3;
inline constexpr double kExtentSigmas = 3.0;

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Inclusive range of pixel centers covered by a primitive's 3-sigma box,
// already clipped to the image.
struct PixelRect {
    int col_min = 0;
    int col_max = -1;
    int row_min = 0;
    int row_max = -1;

    [[nodiscard]] bool empty() const noexcept { return col_min > col_max || row_min > row_max; }
    [[nodiscard]] bool contains(int row, int col) const noexcept {
        return col >= col_min && col <= col_max && row >= row_min && row <= row_max;
    }
};

struct Projected2DGaussian {
    PrimitiveId primitive_id = 0;
    Vec2 mean2d = Vec2::Zero();
    Mat2 cov2d = Mat2::Identity();
    Mat2 conic = Mat2::Identity(); // cov2d^{-1}
    double depth = 0.0;
    Color color = Color::Zero();
    double sigma = 0.0;
    PixelRect support;
};

// d(pixel)/d(point_cam) of the pinhole projection. Throws BehindCameraError when
// z <= near.
[[nodiscard]] Mat23 perspective_jacobian(const Vec3& point_cam, double fx, double fy,
                                         double near = kNearPlane);

// std::nullopt means CULLED: behind the near plane, or the 3-sigma box covers no
// pixel center of the image.
[[nodiscard]] std::optional<Projected2DGaussian> project_gaussian(const GaussianPrimitive& prim,
                                                                  PrimitiveId id, const CameraView& cam);

// exp(-1/2 d^T cov2d^-1 d), d = pixel - mean2d.
[[nodiscard]] double evaluate_2d_gaussian(const Projected2DGaussian& g, const Vec2& pixel) noexcept;

} // namespace splatprune
