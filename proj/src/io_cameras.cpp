#include "splatprune/io.hpp"

#include <json.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>

namespace splatprune {

namespace {

using json = nlohmann::json;

constexpr double kFileOrthonormalTol = 1e-4;

[[noreturn]] void fail(const fs::path& path, std::size_t entry, const std::string& msg) {
    throw ValidationError(path.string() + ": camera entry #" + std::to_string(entry) + ": " + msg);
}

// Nearest rotation in the Frobenius sense; fixes float noise from exporters.
Mat3 orthonormalize(const Mat3& m) {
    const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

template <typename T>
T require(const json& entry, const char* key, const fs::path& path, std::size_t idx) {
    if (!entry.contains(key)) {
        fail(path, idx, std::string("missing key '") + key + "'");
    }
    try {
        return entry.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(path, idx, std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace

std::vector<CameraView> read_cameras(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
    if (!doc.is_array()) {
        throw ValidationError(path.string() + ": expected a JSON array of cameras");
    }

    std::vector<CameraView> cams;
    cams.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& e = doc[i];
        if (!e.is_object()) {
            fail(path, i, "expected an object");
        }
        CameraView cam;
        cam.width = require<int>(e, "width", path, i);
        cam.height = require<int>(e, "height", path, i);
        cam.fx = require<double>(e, "fx", path, i);
        cam.fy = require<double>(e, "fy", path, i);
        cam.cx = e.contains("cx") ? require<double>(e, "cx", path, i) : cam.width / 2.0;
        cam.cy = e.contains("cy") ? require<double>(e, "cy", path, i) : cam.height / 2.0;
        cam.name = e.contains("img_name") ? require<std::string>(e, "img_name", path, i)
                                          : "view_" + std::to_string(i);

        const auto position = require<std::vector<double>>(e, "position", path, i);
        const auto rotation = require<std::vector<std::vector<double>>>(e, "rotation", path, i);
        if (position.size() != 3) {
            fail(path, i, "position must have 3 entries");
        }
        if (rotation.size() != 3 || rotation[0].size() != 3 || rotation[1].size() != 3 || rotation[2].size() != 3) {
            fail(path, i, "rotation must be a 3x3 array");
        }
        Mat3 cam_to_world;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                cam_to_world(r, c) = rotation[r][c];
            }
        }
        const Vec3 center{position[0], position[1], position[2]};
        if (!cam_to_world.array().isFinite().all() || !center.array().isFinite().all()) {
            fail(path, i, "non-finite pose");
        }
        const double dev = (cam_to_world.transpose() * cam_to_world - Mat3::Identity()).cwiseAbs().maxCoeff();
        if (dev > kFileOrthonormalTol || cam_to_world.determinant() < 0.0) {
            fail(path, i, "rotation is not orthonormal (deviation " + std::to_string(dev) + ")");
        }
        if (dev > 1e-6) {
            cam_to_world = orthonormalize(cam_to_world);
        }
        cam.rotation = cam_to_world.transpose();
        cam.translation = -cam.rotation * center;
        try {
            validate_camera(cam);
        } catch (const ValidationError& err) {
            fail(path, i, err.what());
        }
        cams.push_back(std::move(cam));
    }
    return cams;
}

void write_cameras(const std::vector<CameraView>& cams, const fs::path& path) {
    json doc = json::array();
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const CameraView& cam = cams[i];
        const Mat3 cam_to_world = cam.rotation.transpose();
        const Vec3 center = cam.center();
        json rot = json::array();
        for (int r = 0; r < 3; ++r) {
            rot.push_back({cam_to_world(r, 0), cam_to_world(r, 1), cam_to_world(r, 2)});
        }
        doc.push_back({{"id", i},
                       {"img_name", cam.name},
                       {"width", cam.width},
                       {"height", cam.height},
                       {"position", {center.x(), center.y(), center.z()}},
                       {"rotation", rot},
                       {"fx", cam.fx},
                       {"fy", cam.fy},
                       {"cx", cam.cx},
                       {"cy", cam.cy}});
    }
    write_text(path, doc.dump(2) + "\n");
}

void load_ground_truth(std::vector<CameraView>& cams, const fs::path& dir, bool required) {
    for (CameraView& cam : cams) {
        const fs::path file = dir / (cam.name + ".png");
        if (!fs::exists(file)) {
            if (required) {
                throw MissingGroundTruthError("missing ground-truth image " + file.string());
            }
            continue;
        }
        Image img = read_image(file);
        if (img.width != cam.width || img.height != cam.height) {
            throw ValidationError(file.string() + ": image is " + std::to_string(img.width) + "x" +
                                  std::to_string(img.height) + " but camera expects " + std::to_string(cam.width) +
                                  "x" + std::to_string(cam.height));
        }
        cam.ground_truth = std::move(img);
    }
}

} // namespace splatprune
