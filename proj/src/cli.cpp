#include "splatprune/cli.hpp"

#include "splatprune/errors.hpp"
#include "splatprune/io.hpp"
#include "splatprune/metrics.hpp"
#include "splatprune/pruning.hpp"
#include "splatprune/rasterizer.hpp"
#include "splatprune/scoring.hpp"
#include "splatprune/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace splatprune {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kCurveHeader = {"setting", "retained_count", "psnr", "ssim", "fps"};

struct CommonArgs {
    unsigned threads = 0;
    int tile_size = 16;
};

void add_common(CLI::App* sub, CommonArgs& common) {
    sub->add_option("--threads", common.threads, "Worker threads, 0 = all cores")
        ->envname("SPLATPRUNE_THREADS")
        ->capture_default_str();
    sub->add_option("--tile-size", common.tile_size, "Rasterizer tile edge in pixels")
        ->envname("SPLATPRUNE_TILE_SIZE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

RenderOptions render_options(const CommonArgs& common) {
    RenderOptions opts;
    opts.workers = common.threads;
    opts.tile_size = common.tile_size;
    validate_render_options(opts);
    return opts;
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::is_regular_file(path)) {
        throw ValidationError(std::string(what) + " not found: " + path.string());
    }
}

void require_dir(const fs::path& path, const char* what) {
    if (!fs::is_directory(path)) {
        throw ValidationError(std::string(what) + " not found: " + path.string());
    }
}

void make_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

Scene load_scene(const fs::path& path) {
    require_file(path, "scene file");
    Scene scene = read_ply(path);
    scene.source_tag = path.stem().string();
    return scene;
}

std::vector<CameraView> load_cameras(const fs::path& path, const std::optional<fs::path>& images) {
    require_file(path, "cameras file");
    std::vector<CameraView> cams = read_cameras(path);
    if (images) {
        require_dir(*images, "image directory");
        load_ground_truth(cams, *images, true);
    }
    return cams;
}

Color parse_background(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        parts.push_back(parse_double(item));
    }
    if (parts.size() != 3) {
        throw ValidationError("--background expects r,g,b");
    }
    for (double v : parts) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("--background components must lie in [0, 1]");
        }
    }
    return {parts[0], parts[1], parts[2]};
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
    std::string scene, cameras, out, background;
    bool record = false;
};

void cmd_render(const RenderArgs& a, const CommonArgs& common, std::ostream& out) {
    RenderOptions opts = render_options(common);
    if (!a.background.empty()) {
        opts.background = parse_background(a.background);
    }
    opts.record_contributions = a.record;
    const Scene scene = load_scene(a.scene);
    const std::vector<CameraView> cams = load_cameras(a.cameras, std::nullopt);
    const fs::path dir(a.out);
    make_out_dir(dir);

    json views = json::array();
    for (std::size_t v = 0; v < cams.size(); ++v) {
        const RenderOutput r = render(scene, cams[v], opts, static_cast<std::uint32_t>(v));
        const std::string image_name = cams[v].name + ".png";
        write_image(r.image, dir / image_name);
        json entry = {{"name", cams[v].name},
                      {"image", image_name},
                      {"width", cams[v].width},
                      {"height", cams[v].height}};
        if (r.contributions) {
            const std::string contrib_name = cams[v].name + ".contrib.csv";
            write_contributions(*r.contributions, dir / contrib_name);
            entry["contributions"] = contrib_name;
            entry["records"] = r.contributions->records.size();
        }
        views.push_back(std::move(entry));
    }
    const json manifest = {{"scene", a.scene},
                           {"primitive_count", scene.size()},
                           {"tile_size", opts.tile_size},
                           {"background", {opts.background.x(), opts.background.y(), opts.background.z()}},
                           {"views", std::move(views)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "rendered " << cams.size() << " view(s) to " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
    std::string scene, cameras, images, fn, agg, out;
    double dist_scale = 1.0;
};

void check_ground_truth(ScoreFunctionId fn, const std::vector<CameraView>& cams) {
    if (!needs_ground_truth(fn)) {
        return;
    }
    for (const CameraView& cam : cams) {
        if (!cam.ground_truth) {
            throw MissingGroundTruthError("score function " + std::string(to_string(fn)) +
                                          " needs ground-truth images; pass --images");
        }
    }
}

void cmd_score(const ScoreArgs& a, const CommonArgs& common, std::ostream& out) {
    const ScoreFunctionId fn = parse_score_function(a.fn);
    const Aggregation agg = a.agg.empty() ? default_aggregation(fn) : parse_aggregation(a.agg);
    if (!(a.dist_scale > 0.0) || !std::isfinite(a.dist_scale)) {
        throw ValidationError("--dist-scale must be positive");
    }
    const RenderOptions opts = render_options(common);
    const Scene scene = load_scene(a.scene);
    const std::vector<CameraView> cams =
        load_cameras(a.cameras, a.images.empty() ? std::nullopt : std::optional<fs::path>(a.images));
    check_ground_truth(fn, cams);

    const fs::path dir(a.out);
    make_out_dir(dir);
    const std::vector<ContributionStream> streams = record_streams(scene, cams, opts);
    const ScoringOptions sopts{a.dist_scale, common.threads};
    if (agg == Aggregation::PerRay) {
        const RankedRays ranked = rank_per_ray(fn, scene, streams, cams, sopts);
        write_ranked(ranked, dir / "ranked.csv");
        out << "ranked " << ranked.rays.size() << " ray(s) with " << to_string(fn) << "\n";
    } else {
        const ScoreTable table = aggregate_cross_view(fn, scene, streams, cams, agg, sopts);
        write_score_table(table, dir / "scores.csv");
        out << "scored " << table.per_primitive.size() << " primitive(s) with " << to_string(fn) << " ("
            << to_string(agg) << ")\n";
    }
}

// ---------------------------------------------------------------------------
// prune

struct PruneArgs {
    std::string scores, ranked, technique, scene, out;
    double value = 0.0;
    std::optional<std::uint64_t> seed;
};

PruneMask build_mask(PruneTechnique technique, double value, std::uint64_t seed, const ScoreTable* table,
                     const RankedRays* ranked) {
    PruneSpec spec;
    spec.technique = technique;
    spec.value = value;
    spec.seed = seed;
    validate_prune_spec(spec);
    switch (technique) {
    case PruneTechnique::CrossRatio:
        return prune_cross_ratio(*table, value);
    case PruneTechnique::CrossThreshold:
        return prune_cross_threshold(*table, value);
    case PruneTechnique::CrossStochastic:
        return prune_cross_stochastic(*table, value, seed);
    case PruneTechnique::PixelwiseTopK:
        return prune_pixelwise(*ranked, static_cast<std::size_t>(value));
    }
    throw ValidationError("unknown pruning technique");
}

void cmd_prune(const PruneArgs& a, std::ostream& out) {
    const PruneTechnique technique = parse_prune_technique(a.technique);
    if (is_cross_view(technique) && a.scores.empty()) {
        throw ValidationError(std::string(to_string(technique)) + " needs --scores");
    }
    if (!is_cross_view(technique) && a.ranked.empty()) {
        throw ValidationError(std::string(to_string(technique)) + " needs --ranked");
    }
    if (technique == PruneTechnique::CrossStochastic && !a.seed) {
        throw ValidationError("cross_stochastic needs --seed");
    }
    const Scene scene = load_scene(a.scene);

    PruneMask mask;
    if (is_cross_view(technique)) {
        require_file(a.scores, "score table");
        const ScoreTable table = read_score_table(a.scores);
        if (table.per_primitive.size() != scene.size()) {
            throw DimensionMismatchError("score table has " + std::to_string(table.per_primitive.size()) +
                                         " entries but the scene has " + std::to_string(scene.size()));
        }
        mask = build_mask(technique, a.value, a.seed.value_or(0), &table, nullptr);
    } else {
        require_file(a.ranked, "ranked archive");
        const RankedRays ranked = read_ranked(a.ranked);
        if (ranked.primitive_count != scene.size()) {
            throw DimensionMismatchError("ranked archive covers " + std::to_string(ranked.primitive_count) +
                                         " primitives but the scene has " + std::to_string(scene.size()));
        }
        mask = build_mask(technique, a.value, a.seed.value_or(0), nullptr, &ranked);
    }

    const PrunedScene pruned = apply_mask(scene, mask);
    const fs::path dir(a.out);
    make_out_dir(dir);
    write_ply(pruned.scene, dir / "pruned.ply");
    write_mask(mask, dir / "mask.csv");
    out << "retained " << mask.retained_count << " of " << scene.size() << " primitive(s)\n";
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string scene, cameras, gt_images, out;
    int fps_repeats = 1;
};

void cmd_eval(const EvalArgs& a, const CommonArgs& common, std::ostream& out) {
    const RenderOptions opts = render_options(common);
    const Scene scene = load_scene(a.scene);
    const std::vector<CameraView> cams = load_cameras(a.cameras, fs::path(a.gt_images));
    const MetricsReport report = evaluate_scene(scene, cams, opts, {a.fps_repeats, true});
    const fs::path dir(a.out);
    make_out_dir(dir);
    write_report(report, dir / "metrics.json", ReportFormat::Json);
    write_report(report, dir / "metrics.csv", ReportFormat::Csv);
    out << "psnr " << format_double(report.psnr) << " ssim " << format_double(report.ssim) << " fps "
        << format_double(report.fps) << "\n";
}

// ---------------------------------------------------------------------------
// sweep

json read_json_file(const fs::path& path, const char* what) {
    require_file(path, what);
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": invalid JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
    if (!doc.is_object()) {
        throw ValidationError(where + ": expected a JSON object");
    }
    for (const auto& item : doc.items()) {
        if (!allowed.contains(item.key())) {
            throw ValidationError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
T field(const json& doc, const char* key, const std::string& where) {
    if (!doc.contains(key)) {
        throw ValidationError(where + ": missing key '" + key + "'");
    }
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(where + ": bad value for '" + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& doc, const char* key, T fallback, const std::string& where) {
    return doc.contains(key) ? field<T>(doc, key, where) : fallback;
}

struct SweepSpec {
    fs::path scene, cameras, images;
    ScoreFunctionId function = ScoreFunctionId::MS;
    Aggregation aggregation = Aggregation::Sum;
    PruneTechnique technique = PruneTechnique::CrossRatio;
    std::vector<double> values;
    std::uint64_t seed = 0;
    double dist_scale = 1.0;
    int fps_repeats = 1;
};

SweepSpec parse_sweep_spec(const fs::path& path) {
    const json doc = read_json_file(path, "sweep spec");
    const std::string where = path.string();
    reject_unknown_keys(doc,
                        {"scene", "cameras", "images", "score_function", "technique", "values", "seed",
                         "aggregation", "dist_scale", "fps_repeats"},
                        where);
    const fs::path base = path.parent_path();
    SweepSpec s;
    s.scene = base / field<std::string>(doc, "scene", where);
    s.cameras = base / field<std::string>(doc, "cameras", where);
    s.images = base / field<std::string>(doc, "images", where);
    s.function = parse_score_function(field<std::string>(doc, "score_function", where));
    s.technique = parse_prune_technique(field<std::string>(doc, "technique", where));
    s.values = field<std::vector<double>>(doc, "values", where);
    s.seed = field_or<std::uint64_t>(doc, "seed", 0, where);
    s.dist_scale = field_or<double>(doc, "dist_scale", 1.0, where);
    s.fps_repeats = field_or<int>(doc, "fps_repeats", 1, where);

    if (s.values.empty()) {
        throw ValidationError(where + ": 'values' must not be empty");
    }
    if (s.technique == PruneTechnique::CrossStochastic && !doc.contains("seed")) {
        throw ValidationError(where + ": cross_stochastic needs 'seed'");
    }
    if (!(s.dist_scale > 0.0) || !std::isfinite(s.dist_scale)) {
        throw ValidationError(where + ": 'dist_scale' must be positive");
    }
    if (s.fps_repeats < 1) {
        throw ValidationError(where + ": 'fps_repeats' must be at least 1");
    }
    if (is_cross_view(s.technique)) {
        s.aggregation = doc.contains("aggregation")
                            ? parse_aggregation(field<std::string>(doc, "aggregation", where))
                            : default_aggregation(s.function);
        if (s.aggregation == Aggregation::PerRay) {
            s.aggregation = Aggregation::Sum;
            if (doc.contains("aggregation")) {
                throw ValidationError(where + ": cross-view techniques need sum or max aggregation");
            }
        }
    } else {
        s.aggregation = Aggregation::PerRay;
        if (doc.contains("aggregation") &&
            parse_aggregation(field<std::string>(doc, "aggregation", where)) != Aggregation::PerRay) {
            throw ValidationError(where + ": pixelwise_topk needs per-ray aggregation");
        }
    }
    for (double v : s.values) {
        PruneSpec ps;
        ps.technique = s.technique;
        ps.value = v;
        validate_prune_spec(ps);
    }
    return s;
}

// Settings already present in an existing curve file.
std::set<std::string> completed_settings(const fs::path& curve) {
    std::set<std::string> done;
    if (!fs::exists(curve)) {
        return done;
    }
    const auto rows = parse_csv(read_text(curve));
    if (rows.empty()) {
        return done;
    }
    if (rows.front() != kCurveHeader) {
        throw ValidationError(curve.string() + ": existing file has an unexpected header");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != kCurveHeader.size()) {
            throw ValidationError(curve.string() + ": line " + std::to_string(i + 1) + ": expected " +
                                  std::to_string(kCurveHeader.size()) + " fields");
        }
        done.insert(format_double(parse_double(rows[i][0])));
    }
    return done;
}

void append_line(const fs::path& path, const std::string& line) {
    std::ofstream f(path, std::ios::app | std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for appending");
    }
    f << line << '\n';
    f.flush();
    if (!f) {
        throw IoError("failed writing " + path.string());
    }
}

void cmd_sweep(const std::string& spec_path, const std::string& out_dir, const CommonArgs& common,
               std::ostream& out) {
    const SweepSpec spec = parse_sweep_spec(spec_path);
    const RenderOptions opts = render_options(common);
    const Scene scene = load_scene(spec.scene);
    const std::vector<CameraView> cams = load_cameras(spec.cameras, spec.images);
    check_ground_truth(spec.function, cams);

    const fs::path dir(out_dir);
    make_out_dir(dir);
    const fs::path curve = dir / "curve.csv";
    const std::set<std::string> done = completed_settings(curve);
    if (!fs::exists(curve) || fs::file_size(curve) == 0) {
        std::string header;
        for (std::size_t i = 0; i < kCurveHeader.size(); ++i) {
            header += (i ? "," : "") + kCurveHeader[i];
        }
        append_line(curve, header);
    }

    const std::vector<ContributionStream> streams = record_streams(scene, cams, opts);
    const ScoringOptions sopts{spec.dist_scale, common.threads};
    std::optional<ScoreTable> table;
    std::optional<RankedRays> ranked;
    if (spec.aggregation == Aggregation::PerRay) {
        ranked = rank_per_ray(spec.function, scene, streams, cams, sopts);
    } else {
        table = aggregate_cross_view(spec.function, scene, streams, cams, spec.aggregation, sopts);
    }

    std::size_t ran = 0;
    for (double value : spec.values) {
        const std::string key = format_double(value);
        if (done.contains(key)) {
            continue;
        }
        const PruneMask mask = build_mask(spec.technique, value, spec.seed, table ? &*table : nullptr,
                                          ranked ? &*ranked : nullptr);
        const PrunedScene pruned = apply_mask(scene, mask);
        const MetricsReport report = evaluate_scene(pruned.scene, cams, opts, {spec.fps_repeats, true});
        append_line(curve, key + "," + std::to_string(mask.retained_count) + "," + format_double(report.psnr) +
                               "," + format_double(report.ssim) + "," + format_double(report.fps));
        ++ran;
    }
    out << "sweep: " << ran << " new setting(s), " << (spec.values.size() - ran) << " already done\n";
}

// ---------------------------------------------------------------------------
// gen

Vec3 vec3_field(const json& doc, const char* key, const Vec3& fallback, const std::string& where) {
    if (!doc.contains(key)) {
        return fallback;
    }
    const auto v = field<std::vector<double>>(doc, key, where);
    if (v.size() != 3) {
        throw ValidationError(where + ": '" + key + "' must have 3 entries");
    }
    return {v[0], v[1], v[2]};
}

void cmd_gen(const std::string& spec_path, const std::string& out_dir, const CommonArgs& common,
             std::ostream& out) {
    const fs::path path(spec_path);
    const json doc = read_json_file(path, "synth spec");
    const std::string where = path.string();
    reject_unknown_keys(doc,
                        {"seed", "n_primitives", "bounds_min", "bounds_max", "log_scale_min", "log_scale_max",
                         "opacity_logit_min", "opacity_logit_max", "sh_mode", "cameras"},
                        where);
    SynthSpec spec;
    spec.seed = field<std::uint64_t>(doc, "seed", where);
    spec.n_primitives = field<std::size_t>(doc, "n_primitives", where);
    spec.bounds_min = vec3_field(doc, "bounds_min", spec.bounds_min, where);
    spec.bounds_max = vec3_field(doc, "bounds_max", spec.bounds_max, where);
    spec.log_scale_min = field_or(doc, "log_scale_min", spec.log_scale_min, where);
    spec.log_scale_max = field_or(doc, "log_scale_max", spec.log_scale_max, where);
    spec.opacity_logit_min = field_or(doc, "opacity_logit_min", spec.opacity_logit_min, where);
    spec.opacity_logit_max = field_or(doc, "opacity_logit_max", spec.opacity_logit_max, where);
    if (doc.contains("sh_mode")) {
        spec.sh_mode = parse_sh_mode(field<std::string>(doc, "sh_mode", where));
    }
    validate_synth_spec(spec);

    const json ring = doc.contains("cameras") ? doc.at("cameras") : json::object();
    const std::string ring_where = where + ": cameras";
    reject_unknown_keys(ring, {"count", "radius", "look_at", "resolution", "fov_degrees"}, ring_where);
    const int count = field_or(ring, "count", 4, ring_where);
    const double radius = field_or(ring, "radius", 4.0, ring_where);
    const Vec3 look_at = vec3_field(ring, "look_at", Vec3::Zero(), ring_where);
    const int resolution = field_or(ring, "resolution", 64, ring_where);
    const double fov = field_or(ring, "fov_degrees", 60.0, ring_where);

    const RenderOptions opts = render_options(common);
    Scene scene = gen_scene(spec);
    const fs::path dir(out_dir);
    make_out_dir(dir);
    make_out_dir(dir / "images");
    write_ply(scene, dir / "scene.ply");
    write_cameras(gen_camera_ring(count, radius, look_at, resolution, fov), dir / "cameras.json");

    // Render from the cameras as they will be read back, so later evals match bit for bit.
    const std::vector<CameraView> cams = read_cameras(dir / "cameras.json");
    for (std::size_t v = 0; v < cams.size(); ++v) {
        const RenderOutput r = render(scene, cams[v], opts, static_cast<std::uint32_t>(v));
        write_image(r.image, dir / "images" / (cams[v].name + ".png"));
    }
    out << "generated " << scene.size() << " primitive(s) and " << cams.size() << " view(s) in "
        << dir.string() << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian splatting renderer and pruning toolkit", "splatprune"};
    app.require_subcommand(1);

    CommonArgs common;

    RenderArgs render_args;
    CLI::App* render_cmd = app.add_subcommand("render", "Render every camera to PNG");
    render_cmd->add_option("--scene", render_args.scene, "Checkpoint PLY")->required();
    render_cmd->add_option("--cameras", render_args.cameras, "Camera JSON")->required();
    render_cmd->add_option("--out", render_args.out, "Output directory")->required();
    render_cmd->add_option("--background", render_args.background, "Background color r,g,b (default 0,0,0)");
    render_cmd->add_flag("--record", render_args.record, "Also write per-view contribution CSVs");
    add_common(render_cmd, common);

    ScoreArgs score_args;
    CLI::App* score_cmd = app.add_subcommand("score", "Score primitives from recorded renders");
    score_cmd->add_option("--scene", score_args.scene, "Checkpoint PLY")->required();
    score_cmd->add_option("--cameras", score_args.cameras, "Camera JSON")->required();
    score_cmd->add_option("--images", score_args.images, "Ground-truth image directory");
    score_cmd->add_option("--fn", score_args.fn, "lg, ms, rs, eg or v1..v18")->required();
    score_cmd->add_option("--agg", score_args.agg, "sum, max or perray (default depends on --fn)");
    score_cmd->add_option("--dist-scale", score_args.dist_scale, "Pixel distance scale for distance kernels")
        ->envname("SPLATPRUNE_DIST_SCALE")
        ->capture_default_str();
    score_cmd->add_option("--out", score_args.out, "Output directory")->required();
    add_common(score_cmd, common);

    PruneArgs prune_args;
    CLI::App* prune_cmd = app.add_subcommand("prune", "Prune a checkpoint from scores or rankings");
    auto* scores_opt = prune_cmd->add_option("--scores", prune_args.scores, "Score table CSV");
    auto* ranked_opt = prune_cmd->add_option("--ranked", prune_args.ranked, "Ranked archive CSV");
    scores_opt->excludes(ranked_opt);
    prune_cmd->add_option("--technique", prune_args.technique,
                          "cross_ratio, cross_threshold, cross_stochastic or pixelwise_topk")
        ->required();
    prune_cmd->add_option("--value", prune_args.value, "Ratio, threshold or per-ray rank")->required();
    prune_cmd->add_option("--seed", prune_args.seed, "Seed for cross_stochastic");
    prune_cmd->add_option("--scene", prune_args.scene, "Checkpoint PLY")->required();
    prune_cmd->add_option("--out", prune_args.out, "Output directory")->required();

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "PSNR, SSIM and FPS against ground truth");
    eval_cmd->add_option("--scene", eval_args.scene, "Checkpoint PLY")->required();
    eval_cmd->add_option("--cameras", eval_args.cameras, "Camera JSON")->required();
    eval_cmd->add_option("--gt-images", eval_args.gt_images, "Ground-truth image directory")->required();
    eval_cmd->add_option("--fps-repeats", eval_args.fps_repeats, "Timed passes for the FPS median")
        ->envname("SPLATPRUNE_FPS_REPEATS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "Output directory")->required();
    add_common(eval_cmd, common);

    std::string sweep_spec, sweep_out;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Score, prune and evaluate over a grid of settings");
    sweep_cmd->add_option("--sweep-spec", sweep_spec, "Sweep JSON")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output directory (curve.csv is appended)")->required();
    add_common(sweep_cmd, common);

    std::string gen_spec, gen_out;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic scene, cameras and ground truth");
    gen_cmd->add_option("--synth-spec", gen_spec, "Synthetic scene JSON")->required();
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    add_common(gen_cmd, common);

    std::vector<const char*> argv{"splatprune"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (render_cmd->parsed()) {
            cmd_render(render_args, common, out);
        } else if (score_cmd->parsed()) {
            cmd_score(score_args, common, out);
        } else if (prune_cmd->parsed()) {
            cmd_prune(prune_args, out);
        } else if (eval_cmd->parsed()) {
            cmd_eval(eval_args, common, out);
        } else if (sweep_cmd->parsed()) {
            cmd_sweep(sweep_spec, sweep_out, common, out);
        } else if (gen_cmd->parsed()) {
            cmd_gen(gen_spec, gen_out, common, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PlyError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace splatprune
