#include "splatprune/projection.hpp"

#include "splatprune/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace splatprune {

namespace {

// Pixel-center index range [ceil(lo), floor(hi)] clipped to [0, size-1]; done in
// double so far-off-screen primitives cannot overflow int.
void clip_span(double center, double half, int size, int& lo, int& hi) {
    const double first = std::max(0.0, std::ceil(center - half));
    const double last = std::min(static_cast<double>(size - 1), std::floor(center + half));
    if (!(first <= last)) {
        lo = 0;
        hi = -1;
        return;
    }
    lo = static_cast<int>(first);
    hi = static_cast<int>(last);
}

} // namespace

Mat23 perspective_jacobian(const Vec3& p, double fx, double fy, double near) {
    const double z = p.z();
    if (!(z > near)) {
        throw BehindCameraError("point is behind the near plane");
    }
    const double inv_z = 1.0 / z;
    const double inv_z2 = inv_z * inv_z;
    Mat23 j;
    j << fx * inv_z, 0.0, -fx * p.x() * inv_z2, 0.0, fy * inv_z, -fy * p.y() * inv_z2;
    return j;
}

std::optional<Projected2DGaussian> project_gaussian(const GaussianPrimitive& prim, PrimitiveId id,
                                                    const CameraView& cam) {
    const Vec3 p_cam = cam.to_camera(prim.position);
    if (!(p_cam.z() > kNearPlane)) {
        return std::nullopt;
    }

    const Mat23 j = perspective_jacobian(p_cam, cam.fx, cam.fy);
    const Mat3 cov_cam = cam.rotation * build_covariance_3d(prim) * cam.rotation.transpose();
    Mat2 cov2d = j * cov_cam * j.transpose();
    cov2d = 0.5 * (cov2d + cov2d.transpose()).eval();
    cov2d.diagonal().array() += kLowPassDilation;

    Projected2DGaussian g;
    g.primitive_id = id;
    g.mean2d = {cam.fx * p_cam.x() / p_cam.z() + cam.cx, cam.fy * p_cam.y() / p_cam.z() + cam.cy};
    g.cov2d = cov2d;

    const double half_w = kExtentSigmas * std::sqrt(cov2d(0, 0));
    const double half_h = kExtentSigmas * std::sqrt(cov2d(1, 1));
    clip_span(g.mean2d.x(), half_w, cam.width, g.support.col_min, g.support.col_max);
    clip_span(g.mean2d.y(), half_h, cam.height, g.support.row_min, g.support.row_max);
    if (g.support.empty()) {
        return std::nullopt;
    }

    const double det = cov2d.determinant();
    g.conic << cov2d(1, 1) / det, -cov2d(0, 1) / det, -cov2d(1, 0) / det, cov2d(0, 0) / det;
    g.depth = p_cam.z();
    g.sigma = activate_opacity(prim.opacity_logit);
    g.color = evaluate_sh(prim.sh_coeffs, (prim.position - cam.center()).normalized());
    return g;
}

double evaluate_2d_gaussian(const Projected2DGaussian& g, const Vec2& pixel) noexcept {
    const double dx = pixel.x() - g.mean2d.x();
    const double dy = pixel.y() - g.mean2d.y();
    const double power =
        -0.5 * (g.conic(0, 0) * dx * dx + 2.0 * g.conic(0, 1) * dx * dy + g.conic(1, 1) * dy * dy);
    return std::exp(power);
}

} // namespace splatprune
