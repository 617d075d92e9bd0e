#pragma once

#include "splatprune/core_model.hpp"
#include "splatprune/errors.hpp"
#include "splatprune/metrics.hpp"
#include "splatprune/pruning.hpp"
#include "splatprune/rasterizer.hpp"
#include "splatprune/scoring.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace splatprune {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PLY checkpoints
//
// Binary little-endian PLY 1.0, one `vertex` element with 62 float32 properties
// in this exact order:
//
//   x y z  nx ny nz  f_dc_0..2  f_rest_0..44  opacity  scale_0..2  rot_0..3
//
// f_rest is channel-major: f_rest_0..14 are SH coefficients 1..15 of red,
// f_rest_15..29 green, f_rest_30..44 blue. Normals are ignored on read and
// written as zeros. opacity is the logit, scale_* natural logs, rot_* (w,x,y,z).
// ---------------------------------------------------------------------------

inline constexpr int kPlyFloatsPerVertex = 62;

enum class PlyErrorKind { MalformedHeader, PropertyOrderMismatch, TruncatedPayload, NonFiniteValue };

class PlyError : public IoError {
public:
    PlyError(PlyErrorKind kind, const std::string& what) : IoError(what), kind_(kind) {}
    [[nodiscard]] PlyErrorKind kind() const noexcept { return kind_; }

private:
    PlyErrorKind kind_;
};

[[nodiscard]] std::vector<std::string> ply_property_names();
[[nodiscard]] Scene read_ply(const fs::path& path);
// Fields are narrowed to float32. Throws PlyError(NonFiniteValue) before
// touching the file if any field is NaN/Inf.
void write_ply(const Scene& scene, const fs::path& path);

// ---------------------------------------------------------------------------
// Cameras: JSON array of {id, img_name, width, height, position[3],
// rotation[3][3] (camera-to-world, row-major), fx, fy, [cx], [cy]}.
// `position` is the camera center in world space.
// ---------------------------------------------------------------------------

[[nodiscard]] std::vector<CameraView> read_cameras(const fs::path& path);
void write_cameras(const std::vector<CameraView>& cams, const fs::path& path);

// Attaches <dir>/<name>.png as ground truth to every camera. Missing files are
// an error (MissingGroundTruthError) when `required` is set, otherwise skipped.
void load_ground_truth(std::vector<CameraView>& cams, const fs::path& dir, bool required = true);

// ---------------------------------------------------------------------------
// Images: 8-bit RGB PNG. Read divides by 255; write rounds half up after
// clamping to [0, 1].
// ---------------------------------------------------------------------------

[[nodiscard]] Image read_image(const fs::path& path);
void write_image(const Image& image, const fs::path& path);

// ---------------------------------------------------------------------------
// Reports and tables
// ---------------------------------------------------------------------------

enum class ReportFormat { Csv, Json };

// Shortest decimal that parses back to the same double.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] std::string csv_escape(std::string_view field);
// RFC 4180 records; quoted fields may contain separators, quotes and newlines.
[[nodiscard]] std::vector<std::vector<std::string>> parse_csv(std::string_view text);
[[nodiscard]] fs::path sidecar_path(const fs::path& csv_path);

void write_report(const MetricsReport& report, const fs::path& path, ReportFormat format);
[[nodiscard]] MetricsReport read_report(const fs::path& path, ReportFormat format);

// primitive_id,score  + sidecar {function, aggregation, views_used}
void write_score_table(const ScoreTable& table, const fs::path& csv_path);
[[nodiscard]] ScoreTable read_score_table(const fs::path& csv_path);

// primitive_id,retained + sidecar {technique, value, seed, score_function, retained_count, primitive_count}
void write_mask(const PruneMask& mask, const fs::path& csv_path);
[[nodiscard]] PruneMask read_mask(const fs::path& csv_path);

// view,row,col,rank,primitive_id,score,position + sidecar {function, primitive_count, views_used, rays}
void write_ranked(const RankedRays& ranked, const fs::path& csv_path);
[[nodiscard]] RankedRays read_ranked(const fs::path& csv_path);

// view,row,col,primitive_id,alpha,transmittance_before,weight,r,g,b
void write_contributions(const ContributionStream& stream, const fs::path& csv_path);

[[nodiscard]] std::string read_text(const fs::path& path);
void write_text(const fs::path& path, std::string_view text);

} // namespace splatprune
