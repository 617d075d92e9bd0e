#include "splatprune/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace splatprune {

namespace {

using json = nlohmann::json;

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

// Rows of a CSV file after checking the header matches exactly.
std::vector<std::vector<std::string>> read_table(const fs::path& path, const std::vector<std::string>& header) {
    auto rows = parse_csv(read_text(path));
    if (rows.empty() || rows.front() != header) {
        std::string expected;
        for (const auto& h : header) {
            expected += (expected.empty() ? "" : ",") + h;
        }
        throw ValidationError(path.string() + ": line 1: expected header '" + expected + "'");
    }
    rows.erase(rows.begin());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw ValidationError(path.string() + ": line " + std::to_string(r + 2) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " + std::to_string(rows[r].size()));
        }
    }
    return rows;
}

std::uint64_t parse_uint(std::string_view text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("expected an unsigned integer, got '" + std::string(text) + "'");
    }
    return v;
}

// Prefixes field-level parse errors with the file position.
template <typename Fn>
auto at_line(const fs::path& path, std::size_t row, Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": line " + std::to_string(row + 2) + ": " + e.what());
    }
}

json report_to_json(const MetricsReport& r) {
    json views = json::array();
    for (const ViewMetrics& v : r.per_view) {
        views.push_back({{"name", v.name}, {"psnr", v.psnr}, {"ssim", v.ssim}});
    }
    return {{"scene", r.scene_name},         {"psnr", r.psnr},
            {"ssim", r.ssim},                {"fps", r.fps},
            {"primitive_count", r.primitive_count}, {"render_wall_time", r.render_wall_time},
            {"per_view", views}};
}

const std::vector<std::string> kReportHeader = {"scene", "psnr", "ssim", "fps", "primitive_count",
                                                "render_wall_time"};

} // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started) {
                throw ValidationError("line " + std::to_string(line) + ": stray quote inside unquoted field");
            }
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw ValidationError("line " + std::to_string(line) + ": unterminated quoted field");
    }
    if (field_started || !row.empty()) {
        end_row();
    }
    return rows;
}

fs::path sidecar_path(const fs::path& csv_path) {
    fs::path p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_report(const MetricsReport& report, const fs::path& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_json(path, report_to_json(report));
        return;
    }
    std::string out;
    for (std::size_t i = 0; i < kReportHeader.size(); ++i) {
        out += (i ? "," : "") + kReportHeader[i];
    }
    out += "\n" + csv_escape(report.scene_name) + "," + format_double(report.psnr) + "," +
           format_double(report.ssim) + "," + format_double(report.fps) + "," +
           std::to_string(report.primitive_count) + "," + format_double(report.render_wall_time) + "\n";
    write_text(path, out);
}

MetricsReport read_report(const fs::path& path, ReportFormat format) {
    MetricsReport r;
    if (format == ReportFormat::Json) {
        const json doc = read_json(path);
        try {
            r.scene_name = doc.at("scene").get<std::string>();
            r.psnr = doc.at("psnr").get<double>();
            r.ssim = doc.at("ssim").get<double>();
            r.fps = doc.at("fps").get<double>();
            r.primitive_count = doc.at("primitive_count").get<std::size_t>();
            r.render_wall_time = doc.at("render_wall_time").get<double>();
            for (const json& v : doc.at("per_view")) {
                r.per_view.push_back({v.at("name").get<std::string>(), v.at("psnr").get<double>(),
                                      v.at("ssim").get<double>()});
            }
        } catch (const json::exception& e) {
            throw ValidationError(path.string() + ": " + e.what());
        }
        return r;
    }
    const auto rows = read_table(path, kReportHeader);
    if (rows.size() != 1) {
        throw ValidationError(path.string() + ": expected exactly one summary row");
    }
    at_line(path, 0, [&] {
        r.scene_name = rows[0][0];
        r.psnr = parse_double(rows[0][1]);
        r.ssim = parse_double(rows[0][2]);
        r.fps = parse_double(rows[0][3]);
        r.primitive_count = parse_uint(rows[0][4]);
        r.render_wall_time = parse_double(rows[0][5]);
        return 0;
    });
    return r;
}

void write_score_table(const ScoreTable& table, const fs::path& csv_path) {
    std::string out = "primitive_id,score\n";
    for (std::size_t i = 0; i < table.per_primitive.size(); ++i) {
        out += std::to_string(i) + "," + format_double(table.per_primitive[i]) + "\n";
    }
    write_text(csv_path, out);
    write_json(sidecar_path(csv_path), {{"function", std::string(to_string(table.function))},
                                        {"aggregation", std::string(to_string(table.aggregation))},
                                        {"views_used", table.views_used}});
}

ScoreTable read_score_table(const fs::path& csv_path) {
    ScoreTable table;
    const auto rows = read_table(csv_path, {"primitive_id", "score"});
    table.per_primitive.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        at_line(csv_path, r, [&] {
            if (parse_uint(rows[r][0]) != r) {
                throw ValidationError("primitive ids must be 0..N-1 in order");
            }
            table.per_primitive[r] = parse_double(rows[r][1]);
            return 0;
        });
    }
    const fs::path side = sidecar_path(csv_path);
    if (fs::exists(side)) {
        const json doc = read_json(side);
        try {
            table.function = parse_score_function(doc.at("function").get<std::string>());
            table.aggregation = parse_aggregation(doc.at("aggregation").get<std::string>());
            table.views_used = doc.at("views_used").get<std::size_t>();
        } catch (const json::exception& e) {
            throw ValidationError(side.string() + ": " + e.what());
        }
    }
    return table;
}

void write_mask(const PruneMask& mask, const fs::path& csv_path) {
    std::string out = "primitive_id,retained\n";
    for (std::size_t i = 0; i < mask.retain.size(); ++i) {
        out += std::to_string(i) + (mask.retain[i] ? ",1\n" : ",0\n");
    }
    write_text(csv_path, out);
    write_json(sidecar_path(csv_path), {{"technique", std::string(to_string(mask.spec.technique))},
                                        {"value", mask.spec.value},
                                        {"seed", mask.spec.seed},
                                        {"score_function", std::string(to_string(mask.spec.score_function))},
                                        {"retained_count", mask.retained_count},
                                        {"primitive_count", mask.retain.size()}});
}

PruneMask read_mask(const fs::path& csv_path) {
    PruneMask mask;
    const auto rows = read_table(csv_path, {"primitive_id", "retained"});
    mask.retain.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        at_line(csv_path, r, [&] {
            if (parse_uint(rows[r][0]) != r) {
                throw ValidationError("primitive ids must be 0..N-1 in order");
            }
            const std::uint64_t flag = parse_uint(rows[r][1]);
            if (flag > 1) {
                throw ValidationError("retained must be 0 or 1");
            }
            mask.retain[r] = flag == 1;
            return 0;
        });
        mask.retained_count += mask.retain[r] ? 1 : 0;
    }
    const fs::path side = sidecar_path(csv_path);
    if (fs::exists(side)) {
        const json doc = read_json(side);
        try {
            mask.spec.technique = parse_prune_technique(doc.at("technique").get<std::string>());
            mask.spec.value = doc.at("value").get<double>();
            mask.spec.seed = doc.at("seed").get<std::uint64_t>();
            mask.spec.score_function = parse_score_function(doc.at("score_function").get<std::string>());
        } catch (const json::exception& e) {
            throw ValidationError(side.string() + ": " + e.what());
        }
    }
    return mask;
}

void write_ranked(const RankedRays& ranked, const fs::path& csv_path) {
    std::string out = "view,row,col,rank,primitive_id,score,position\n";
    for (const RankedRay& ray : ranked.rays) {
        const std::string prefix =
            std::to_string(ray.ray.view) + "," + std::to_string(ray.ray.row) + "," + std::to_string(ray.ray.col) + ",";
        for (std::size_t k = 0; k < ray.entries.size(); ++k) {
            const RankedEntry& e = ray.entries[k];
            out += prefix + std::to_string(k) + "," + std::to_string(e.primitive_id) + "," + format_double(e.score) +
                   "," + std::to_string(e.position) + "\n";
        }
    }
    write_text(csv_path, out);
    write_json(sidecar_path(csv_path), {{"function", std::string(to_string(ranked.function))},
                                        {"primitive_count", ranked.primitive_count},
                                        {"views_used", ranked.views_used},
                                        {"rays", ranked.rays.size()}});
}

RankedRays read_ranked(const fs::path& csv_path) {
    const fs::path side = sidecar_path(csv_path);
    if (!fs::exists(side)) {
        throw ValidationError(csv_path.string() + ": ranked archive needs its JSON sidecar " + side.string());
    }
    RankedRays ranked;
    const json doc = read_json(side);
    try {
        ranked.function = parse_score_function(doc.at("function").get<std::string>());
        ranked.primitive_count = doc.at("primitive_count").get<std::size_t>();
        ranked.views_used = doc.at("views_used").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ValidationError(side.string() + ": " + e.what());
    }

    const auto rows = read_table(csv_path, {"view", "row", "col", "rank", "primitive_id", "score", "position"});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        at_line(csv_path, r, [&] {
            const RayId ray{static_cast<std::uint32_t>(parse_uint(rows[r][0])),
                            static_cast<std::uint32_t>(parse_uint(rows[r][1])),
                            static_cast<std::uint32_t>(parse_uint(rows[r][2]))};
            const std::uint64_t rank = parse_uint(rows[r][3]);
            if (rank == 0) {
                ranked.rays.push_back({ray, {}});
            } else if (ranked.rays.empty() || !(ranked.rays.back().ray == ray) ||
                       ranked.rays.back().entries.size() != rank) {
                throw ValidationError("ranks must start at 0 and increase by one within a ray");
            }
            const std::uint64_t id = parse_uint(rows[r][4]);
            if (id >= ranked.primitive_count) {
                throw ValidationError("primitive id " + std::to_string(id) + " outside the scene");
            }
            ranked.rays.back().entries.push_back({static_cast<PrimitiveId>(id), parse_double(rows[r][5]),
                                                  static_cast<std::uint32_t>(parse_uint(rows[r][6]))});
            return 0;
        });
    }
    return ranked;
}

void write_contributions(const ContributionStream& stream, const fs::path& csv_path) {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + csv_path.string() + " for writing");
    }
    out << "view,row,col,primitive_id,alpha,transmittance_before,weight,r,g,b\n";
    for (const ContributionRecord& rec : stream.records) {
        out << rec.ray.view << ',' << rec.ray.row << ',' << rec.ray.col << ',' << rec.primitive_id << ','
            << format_double(rec.alpha) << ',' << format_double(rec.transmittance_before) << ','
            << format_double(rec.weight) << ',' << format_double(rec.color.x()) << ','
            << format_double(rec.color.y()) << ',' << format_double(rec.color.z()) << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + csv_path.string());
    }
}

} // namespace splatprune
