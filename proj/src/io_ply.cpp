#include "splatprune/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace splatprune {

namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
}

void put_float(std::vector<char>& buf, std::size_t& off, double value) {
    const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(value)));
    std::memcpy(buf.data() + off, &bits, 4);
    off += 4;
}

double get_float(const char* data, std::size_t& off) {
    std::uint32_t bits;
    std::memcpy(&bits, data + off, 4);
    off += 4;
    return static_cast<double>(std::bit_cast<float>(to_little_endian(bits)));
}

std::string header_for(std::size_t count) {
    std::ostringstream h;
    h << "ply\nformat binary_little_endian 1.0\nelement vertex " << count << "\n";
    for (const std::string& name : ply_property_names()) {
        h << "property float " << name << "\n";
    }
    h << "end_header\n";
    return h.str();
}

[[noreturn]] void fail(PlyErrorKind kind, const fs::path& path, const std::string& msg) {
    throw PlyError(kind, path.string() + ": " + msg);
}

} // namespace

std::vector<std::string> ply_property_names() {
    std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz"};
    for (int i = 0; i < 3; ++i) {
        names.push_back("f_dc_" + std::to_string(i));
    }
    for (int i = 0; i < 45; ++i) {
        names.push_back("f_rest_" + std::to_string(i));
    }
    names.emplace_back("opacity");
    for (int i = 0; i < 3; ++i) {
        names.push_back("scale_" + std::to_string(i));
    }
    for (int i = 0; i < 4; ++i) {
        names.push_back("rot_" + std::to_string(i));
    }
    return names;
}

Scene read_ply(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open PLY file " + path.string());
    }
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    std::size_t pos = 0;
    int line_no = 0;
    auto next_line = [&]() -> std::string {
        const std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) {
            fail(PlyErrorKind::MalformedHeader, path, "header ends before end_header");
        }
        std::string line = bytes.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        pos = nl + 1;
        ++line_no;
        return line;
    };

    if (next_line() != "ply") {
        fail(PlyErrorKind::MalformedHeader, path, "missing 'ply' magic");
    }

    const std::vector<std::string> expected = ply_property_names();
    std::size_t vertex_count = 0;
    bool have_format = false;
    bool have_vertex = false;
    std::size_t prop_index = 0;
    for (;;) {
        const std::string line = next_line();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) {
            continue;
        }
        if (keyword == "end_header") {
            break;
        }
        const std::string where = " (header line " + std::to_string(line_no) + ")";
        if (keyword == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt != "binary_little_endian") {
                fail(PlyErrorKind::PropertyOrderMismatch, path, "unsupported encoding '" + fmt + "'" + where);
            }
            if (version != "1.0") {
                fail(PlyErrorKind::MalformedHeader, path, "unsupported PLY version '" + version + "'" + where);
            }
            have_format = true;
        } else if (keyword == "element") {
            std::string name;
            long long count = -1;
            ls >> name >> count;
            if (name != "vertex" || have_vertex) {
                fail(PlyErrorKind::PropertyOrderMismatch, path, "unexpected element '" + name + "'" + where);
            }
            if (!ls || count < 0) {
                fail(PlyErrorKind::MalformedHeader, path, "bad vertex count" + where);
            }
            vertex_count = static_cast<std::size_t>(count);
            have_vertex = true;
        } else if (keyword == "property") {
            std::string type, name;
            ls >> type >> name;
            if (!have_vertex) {
                fail(PlyErrorKind::MalformedHeader, path, "property before element" + where);
            }
            if (type != "float" && type != "float32") {
                fail(PlyErrorKind::PropertyOrderMismatch, path,
                     "property '" + name + "' has type '" + type + "', expected float" + where);
            }
            if (prop_index >= expected.size() || name != expected[prop_index]) {
                fail(PlyErrorKind::PropertyOrderMismatch, path,
                     "property #" + std::to_string(prop_index) + " is '" + name + "', expected '" +
                         (prop_index < expected.size() ? expected[prop_index] : std::string("<none>")) + "'" + where);
            }
            ++prop_index;
        } else {
            fail(PlyErrorKind::MalformedHeader, path, "unknown header keyword '" + keyword + "'" + where);
        }
    }
    if (!have_format || !have_vertex) {
        fail(PlyErrorKind::MalformedHeader, path, "header lacks format or vertex element");
    }
    if (prop_index != expected.size()) {
        fail(PlyErrorKind::PropertyOrderMismatch, path,
             "expected " + std::to_string(expected.size()) + " vertex properties, found " +
                 std::to_string(prop_index));
    }

    const std::size_t stride = kPlyFloatsPerVertex * 4;
    if ((bytes.size() - pos) / stride < vertex_count) {
        fail(PlyErrorKind::TruncatedPayload, path,
             "payload holds " + std::to_string(bytes.size() - pos) + " bytes, need " +
                 std::to_string(vertex_count * stride));
    }

    Scene scene;
    scene.source_tag = path.filename().string();
    scene.primitives.resize(vertex_count);
    const char* data = bytes.data() + pos;
    std::size_t off = 0;
    for (std::size_t i = 0; i < vertex_count; ++i) {
        GaussianPrimitive& p = scene.primitives[i];
        for (int k = 0; k < 3; ++k) {
            p.position[k] = get_float(data, off);
        }
        off += 12; // normals
        for (int c = 0; c < 3; ++c) {
            p.sh_coeffs(0, c) = get_float(data, off);
        }
        for (int c = 0; c < 3; ++c) {
            for (int k = 1; k < kShCoeffCount; ++k) {
                p.sh_coeffs(k, c) = get_float(data, off);
            }
        }
        p.opacity_logit = get_float(data, off);
        for (int k = 0; k < 3; ++k) {
            p.log_scale[k] = get_float(data, off);
        }
        for (int k = 0; k < 4; ++k) {
            p.rotation[k] = get_float(data, off);
        }
        try {
            validate_primitive(p);
        } catch (const ValidationError& e) {
            fail(PlyErrorKind::NonFiniteValue, path, "vertex " + std::to_string(i) + ": " + e.what());
        }
    }
    return scene;
}

void write_ply(const Scene& scene, const fs::path& path) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
        try {
            validate_primitive(scene.primitives[i]);
        } catch (const ValidationError& e) {
            throw PlyError(PlyErrorKind::NonFiniteValue,
                           "refusing to write primitive " + std::to_string(i) + ": " + e.what());
        }
    }

    const std::string header = header_for(scene.size());
    std::vector<char> payload(scene.size() * kPlyFloatsPerVertex * 4);
    std::size_t off = 0;
    for (const GaussianPrimitive& p : scene.primitives) {
        for (int k = 0; k < 3; ++k) {
            put_float(payload, off, p.position[k]);
        }
        for (int k = 0; k < 3; ++k) {
            put_float(payload, off, 0.0);
        }
        for (int c = 0; c < 3; ++c) {
            put_float(payload, off, p.sh_coeffs(0, c));
        }
        for (int c = 0; c < 3; ++c) {
            for (int k = 1; k < kShCoeffCount; ++k) {
                put_float(payload, off, p.sh_coeffs(k, c));
            }
        }
        put_float(payload, off, p.opacity_logit);
        for (int k = 0; k < 3; ++k) {
            put_float(payload, off, p.log_scale[k]);
        }
        for (int k = 0; k < 4; ++k) {
            put_float(payload, off, p.rotation[k]);
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace splatprune
