#include "splatprune/core_model.hpp"

#include "splatprune/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace splatprune {

namespace {

constexpr double kShC1 = 0.4886025119029199;
constexpr double kShC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kShC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

bool all_finite(const auto& m) { return m.array().isFinite().all(); }

} // namespace

void validate_primitive(const GaussianPrimitive& prim) {
    if (!all_finite(prim.position) || !all_finite(prim.log_scale) || !all_finite(prim.rotation) ||
        !std::isfinite(prim.opacity_logit) || !all_finite(prim.sh_coeffs)) {
        throw ValidationError("primitive has a non-finite field");
    }
    if (!(prim.rotation.norm() > 0.0)) {
        throw ValidationError("primitive rotation quaternion has zero norm");
    }
}

void validate_camera(const CameraView& cam, double orthonormal_tol) {
    if (cam.width < 1 || cam.height < 1) {
        throw ValidationError("camera '" + cam.name + "' has non-positive image size");
    }
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) {
        throw ValidationError("camera '" + cam.name + "' has non-positive focal length");
    }
    if (!all_finite(cam.rotation) || !all_finite(cam.translation) || !std::isfinite(cam.cx) ||
        !std::isfinite(cam.cy)) {
        throw ValidationError("camera '" + cam.name + "' has a non-finite field");
    }
    const double dev = (cam.rotation.transpose() * cam.rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (dev > orthonormal_tol || cam.rotation.determinant() < 0.0) {
        throw ValidationError("camera '" + cam.name + "' rotation is not orthonormal (deviation " +
                              std::to_string(dev) + ")");
    }
    if (cam.ground_truth && (cam.ground_truth->width != cam.width || cam.ground_truth->height != cam.height)) {
        throw ValidationError("camera '" + cam.name + "' ground truth size does not match the camera");
    }
}

std::uint8_t quantize_channel(double v) noexcept {
    const double clamped = std::isnan(v) ? 0.0 : std::min(1.0, std::max(0.0, v));
    return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

Image quantize_8bit(const Image& image) {
    Image out = image;
    for (double& v : out.pixels) {
        v = quantize_channel(v) / 255.0;
    }
    return out;
}

double activate_opacity(double opacity_logit) noexcept { return 1.0 / (1.0 + std::exp(-opacity_logit)); }

Mat3 quaternion_to_matrix(const Vec4& q) {
    const double norm = q.norm();
    if (!(norm >= 1e-12)) {
        throw DegenerateRotationError("quaternion norm below 1e-12");
    }
    const Vec4 u = q / norm;
    const double w = u[0], x = u[1], y = u[2], z = u[3];
    Mat3 r;
    r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return r;
}

Mat3 build_covariance_3d(const GaussianPrimitive& prim) {
    const Mat3 r = quaternion_to_matrix(prim.rotation);
    const Mat3 m = r * prim.log_scale.array().exp().matrix().asDiagonal();
    Mat3 sigma = m * m.transpose();
    // Force exact symmetry; the product is symmetric only up to rounding.
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return sigma;
}

Color evaluate_sh(const ShCoeffs& sh, const Vec3& dir) {
    const double x = dir.x(), y = dir.y(), z = dir.z();
    Eigen::RowVector3d result = kShC0 * sh.row(0);

    result += -kShC1 * y * sh.row(1) + kShC1 * z * sh.row(2) - kShC1 * x * sh.row(3);

    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, yz = y * z, xz = x * z;
    result += kShC2[0] * xy * sh.row(4) + kShC2[1] * yz * sh.row(5) +
              kShC2[2] * (2.0 * zz - xx - yy) * sh.row(6) + kShC2[3] * xz * sh.row(7) +
              kShC2[4] * (xx - yy) * sh.row(8);

    result += kShC3[0] * y * (3.0 * xx - yy) * sh.row(9) + kShC3[1] * xy * z * sh.row(10) +
              kShC3[2] * y * (4.0 * zz - xx - yy) * sh.row(11) +
              kShC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * sh.row(12) +
              kShC3[4] * x * (4.0 * zz - xx - yy) * sh.row(13) + kShC3[5] * z * (xx - yy) * sh.row(14) +
              kShC3[6] * x * (xx - 3.0 * yy) * sh.row(15);

    Color c = result.transpose();
    c.array() += 0.5;
    return c.cwiseMax(0.0);
}

} // namespace splatprune
