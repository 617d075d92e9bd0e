#include "splatprune/cli.hpp"
#include "splatprune/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

namespace splatprune {
namespace {

using testing_support::scratch_dir;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Synthetic dataset shared by the tests in this file.
class CliTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root_ = scratch_dir("cli");
        write_text(root_ / "synth.json",
                   R"({"seed": 11, "n_primitives": 1000, "sh_mode": "full",
                       "cameras": {"count": 3, "radius": 3.5, "resolution": 40}})");
        const CliResult r = cli({"gen", "--synth-spec", (root_ / "synth.json").string(), "--out", (root_ / "data").string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }

    static std::string data(const std::string& name) { return (root_ / "data" / name).string(); }
    static std::string out(const std::string& name) { return (root_ / name).string(); }

    static inline fs::path root_;
};

TEST_F(CliTest, GenProducesSceneCamerasImages) {
    EXPECT_EQ(read_ply(data("scene.ply")).size(), 1000u);
    const auto cams = read_cameras(data("cameras.json"));
    ASSERT_EQ(cams.size(), 3u);
    for (const auto& cam : cams) {
        EXPECT_TRUE(fs::exists(root_ / "data" / "images" / (cam.name + ".png")));
    }
}

TEST_F(CliTest, EvalOfUnprunedSceneHitsCap) {
    const CliResult r = cli({"eval", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--gt-images",
                       data("images"), "--out", out("eval")});
    ASSERT_EQ(r.code, 0) << r.err;
    const MetricsReport csv = read_report(out("eval") + "/metrics.csv", ReportFormat::Csv);
    const MetricsReport json = read_report(out("eval") + "/metrics.json", ReportFormat::Json);
    EXPECT_EQ(csv.psnr, 100.0);
    EXPECT_EQ(json.psnr, 100.0);
    EXPECT_EQ(json.per_view.size(), 3u);
    for (const auto& v : json.per_view) {
        EXPECT_EQ(v.psnr, 100.0);
    }
}

TEST_F(CliTest, RenderWritesImagesManifestAndRecords) {
    const CliResult r = cli({"render", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--out",
                       out("render"), "--record", "--background", "0,0.5,1"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (int v = 0; v < 3; ++v) {
        const std::string stem = out("render") + "/view_" + std::to_string(v);
        EXPECT_TRUE(fs::exists(stem + ".png"));
        EXPECT_TRUE(fs::exists(stem + ".contrib.csv"));
    }
    EXPECT_NE(read_text(out("render") + "/manifest.json").find("view_2.png"), std::string::npos);
}

TEST_F(CliTest, RenderMissingSceneIsUsageError) {
    const CliResult r = cli({"render", "--scene", out("nope.ply"), "--cameras", data("cameras.json"), "--out", out("r")});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error:", 0), 0u);
    EXPECT_NE(r.err.find("nope.ply"), std::string::npos);
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
    write_text(root_ / "blocker", "x");
    const CliResult r = cli({"render", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--out",
                       (root_ / "blocker" / "sub").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(r.err.rfind("error:", 0), 0u);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({"render", "--scene", data("scene.ply")}).code, 2);
    EXPECT_EQ(cli({"--help"}).code, 0);
    const CliResult bad_fn = cli({"score", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--fn", "v42",
                            "--out", out("s")});
    EXPECT_EQ(bad_fn.code, 2);
    EXPECT_EQ(bad_fn.err.rfind("error:", 0), 0u);
}

TEST_F(CliTest, ScoreTablesAndGroundTruthRequirement) {
    const std::vector<std::string> base = {"--scene", data("scene.ply"), "--cameras", data("cameras.json")};
    auto score = [&](std::vector<std::string> extra) {
        std::vector<std::string> args = {"score"};
        args.insert(args.end(), base.begin(), base.end());
        args.insert(args.end(), extra.begin(), extra.end());
        return cli(args);
    };
    ASSERT_EQ(score({"--fn", "ms", "--agg", "sum", "--out", out("ms")}).code, 0);
    ASSERT_EQ(score({"--fn", "rs", "--out", out("rs")}).code, 0);
    const ScoreTable ms = read_score_table(out("ms") + "/scores.csv");
    const ScoreTable rs = read_score_table(out("rs") + "/scores.csv");
    EXPECT_EQ(rs.aggregation, Aggregation::Max);
    ASSERT_EQ(ms.per_primitive.size(), 1000u);
    for (std::size_t i = 0; i < ms.per_primitive.size(); ++i) {
        EXPECT_GE(ms.per_primitive[i], 0.0);
        EXPECT_LE(rs.per_primitive[i], ms.per_primitive[i]);
    }

    const CliResult no_gt = score({"--fn", "v13", "--out", out("v13")});
    EXPECT_EQ(no_gt.code, 2);
    EXPECT_EQ(no_gt.err.rfind("error:", 0), 0u);
    ASSERT_EQ(score({"--fn", "v13", "--images", data("images"), "--out", out("v13")}).code, 0);
    EXPECT_EQ(read_ranked(out("v13") + "/ranked.csv").function, ScoreFunctionId::V13);

    // Deterministic output: a second run writes identical bytes.
    ASSERT_EQ(score({"--fn", "ms", "--agg", "sum", "--out", out("ms2"), "--threads", "1"}).code, 0);
    EXPECT_EQ(read_text(out("ms") + "/scores.csv"), read_text(out("ms2") + "/scores.csv"));
}

TEST_F(CliTest, PruneCountsAndArgumentChecks) {
    ASSERT_EQ(cli({"score", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--fn", "ms", "--out",
                   out("pms")})
                  .code,
              0);
    ASSERT_EQ(cli({"score", "--scene", data("scene.ply"), "--cameras", data("cameras.json"), "--fn", "eg", "--out",
                   out("peg")})
                  .code,
              0);
    const std::string scores = out("pms") + "/scores.csv";
    const std::string ranked = out("peg") + "/ranked.csv";

    CliResult r = cli({"prune", "--scores", scores, "--technique", "cross_ratio", "--value", "0.6", "--scene",
                 data("scene.ply"), "--out", out("p60")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_ply(out("p60") + "/pruned.ply").size(), 400u);
    EXPECT_EQ(read_mask(out("p60") + "/mask.csv").retained_count, 400u);
    EXPECT_TRUE(fs::exists(out("p60") + "/mask.json"));

    r = cli({"prune", "--ranked", ranked, "--technique", "pixelwise_topk", "--value", "1", "--scene",
             data("scene.ply"), "--out", out("pk1")});
    ASSERT_EQ(r.code, 0) << r.err;
    const Scene full = read_ply(data("scene.ply"));
    const Scene pruned = read_ply(out("pk1") + "/pruned.ply");
    EXPECT_LT(pruned.size(), full.size());
    for (const CameraView& cam : read_cameras(data("cameras.json"))) {
        const auto before = render(full, cam, {}).per_ray_hit_count;
        const auto after = render(pruned, cam, {}).per_ray_hit_count;
        for (std::size_t px = 0; px < before.size(); ++px) {
            if (before[px] > 0) {
                EXPECT_GT(after[px], 0u);
            }
        }
    }

    r = cli({"prune", "--scores", scores, "--technique", "cross_stochastic", "--value", "0.5", "--scene",
             data("scene.ply"), "--out", out("pst")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--seed"), std::string::npos);
    r = cli({"prune", "--scores", scores, "--technique", "cross_stochastic", "--value", "0.5", "--seed", "7",
             "--scene", data("scene.ply"), "--out", out("pst")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_mask(out("pst") + "/mask.csv").spec.seed, 7u);

    EXPECT_EQ(cli({"prune", "--ranked", ranked, "--technique", "pixelwise_topk", "--value", "0.5", "--scene",
                   data("scene.ply"), "--out", out("bad")})
                  .code,
              2);
    EXPECT_EQ(cli({"prune", "--scores", scores, "--technique", "cross_ratio", "--value", "1.5", "--scene",
                   data("scene.ply"), "--out", out("bad")})
                  .code,
              2);
    EXPECT_EQ(cli({"prune", "--scores", scores, "--technique", "pixelwise_topk", "--value", "1", "--scene",
                   data("scene.ply"), "--out", out("bad")})
                  .code,
              2);
}

std::vector<std::vector<std::string>> curve_rows(const std::string& path) {
    auto rows = parse_csv(read_text(path));
    rows.erase(rows.begin());
    return rows;
}

TEST_F(CliTest, SweepPixelwiseNests) {
    write_text(root_ / "sweep_pk.json",
               R"({"scene": "data/scene.ply", "cameras": "data/cameras.json", "images": "data/images",
                   "score_function": "v13", "technique": "pixelwise_topk", "values": [1, 5, 10, 30]})");
    const CliResult r = cli({"sweep", "--sweep-spec", out("sweep_pk.json"), "--out", out("sweep_pk")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = curve_rows(out("sweep_pk") + "/curve.csv");
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GE(std::stoul(rows[i][1]), std::stoul(rows[i - 1][1]));
    }
    EXPECT_EQ(rows[0][0], "1");
}

TEST_F(CliTest, SweepThresholdReachesZeroAndResumes) {
    write_text(root_ / "sweep_th.json",
               R"({"scene": "data/scene.ply", "cameras": "data/cameras.json", "images": "data/images",
                   "score_function": "rs", "technique": "cross_threshold", "values": [0, 0.3, 1.01]})");
    const std::string curve = out("sweep_th") + "/curve.csv";
    ASSERT_EQ(cli({"sweep", "--sweep-spec", out("sweep_th.json"), "--out", out("sweep_th")}).code, 0);
    auto rows = curve_rows(curve);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0][1], "1000");
    EXPECT_EQ(rows[0][2], "100");
    EXPECT_EQ(rows[2][1], "0");

    // Drop the last point as if interrupted; a rerun recomputes only that point.
    const std::string text = read_text(curve);
    const auto cut = text.rfind('\n', text.size() - 2);
    write_text(curve, text.substr(0, cut + 1));
    const CliResult again = cli({"sweep", "--sweep-spec", out("sweep_th.json"), "--out", out("sweep_th")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_NE(again.out.find("1 new setting"), std::string::npos);
    rows = curve_rows(curve);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[2][0], "1.01");
    EXPECT_EQ(rows[2][1], "0");
}

TEST_F(CliTest, SweepSpecValidation) {
    write_text(root_ / "sweep_bad.json",
               R"({"scene": "data/scene.ply", "cameras": "data/cameras.json", "images": "data/images",
                   "score_function": "rs", "technique": "cross_ratio", "values": []})");
    EXPECT_EQ(cli({"sweep", "--sweep-spec", out("sweep_bad.json"), "--out", out("sb")}).code, 2);
    write_text(root_ / "sweep_bad2.json",
               R"({"scene": "data/scene.ply", "cameras": "data/cameras.json", "images": "data/images",
                   "score_function": "rs", "technique": "cross_ratio", "values": [0.5, 2.0]})");
    EXPECT_EQ(cli({"sweep", "--sweep-spec", out("sweep_bad2.json"), "--out", out("sb")}).code, 2);
    write_text(root_ / "sweep_bad3.json", R"({"scene": "x", "typo": 1})");
    EXPECT_EQ(cli({"sweep", "--sweep-spec", out("sweep_bad3.json"), "--out", out("sb")}).code, 2);
}

TEST_F(CliTest, ThreadsFromEnvironmentWithFlagPrecedence) {
    const std::vector<std::string> args = {"render", "--scene", data("scene.ply"), "--cameras",
                                           data("cameras.json"), "--out", out("env")};
    ::setenv("SPLATPRUNE_THREADS", "not-a-number", 1);
    EXPECT_EQ(cli(args).code, 2);
    std::vector<std::string> with_flag = args;
    with_flag.insert(with_flag.end(), {"--threads", "2"});
    EXPECT_EQ(cli(with_flag).code, 0);
    ::setenv("SPLATPRUNE_THREADS", "3", 1);
    EXPECT_EQ(cli(args).code, 0);
    ::unsetenv("SPLATPRUNE_THREADS");
}

} // namespace
} // namespace splatprune
