#include "splatprune/errors.hpp"
#include "splatprune/rasterizer.hpp"

#include "oracle_values.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace splatprune {
namespace {

using testing_support::Gen;
using testing_support::pinhole;
using testing_support::splat;

const Color kRed{1, 0, 0};
const Color kBlue{0, 0, 1};

double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        m = std::max(m, std::abs(a.pixels[i] - b.pixels[i]));
    }
    return m;
}

TEST(Render, EmptySceneIsBackground) {
    const CameraView cam = pinhole(20, 12, 10.0);
    const RenderOutput out = render(Scene{}, cam, {});
    EXPECT_TRUE(std::all_of(out.image.pixels.begin(), out.image.pixels.end(), [](double v) { return v == 0.0; }));

    RenderOptions grey;
    grey.background = Color(0.25, 0.5, 0.75);
    const RenderOutput bg = render(Scene{}, cam, grey);
    EXPECT_EQ(bg.image.color(3, 4), grey.background);
    EXPECT_EQ(render_oracle(Scene{}, cam, grey).image.pixels, bg.image.pixels);
}

TEST(Render, SinglePrimitiveHalfAlpha) {
    Scene scene;
    scene.primitives.push_back(splat({0, 0, 1}, 0.05, 0.5, kRed));
    const RenderOutput out = render(scene, pinhole(16, 16, 100.0), {});
    const Color c = out.image.color(8, 8);
    EXPECT_NEAR(c.x(), 0.5, 1e-12);
    EXPECT_NEAR(c.y(), 0.0, 1e-12);
    EXPECT_NEAR(c.z(), 0.0, 1e-12);
}

TEST(Render, TwoPrimitivesFrontToBack) {
    Scene scene;
    // Listed back first: order must come from depth, not from ids.
    scene.primitives.push_back(splat({0, 0, 2}, 0.1, 0.5, kBlue));
    scene.primitives.push_back(splat({0, 0, 1}, 0.05, 0.5, kRed));
    const RenderOutput out = render(scene, pinhole(16, 16, 100.0), {});
    const Color c = out.image.color(8, 8);
    EXPECT_NEAR(c.x(), 0.5, 1e-12);
    EXPECT_NEAR(c.y(), 0.0, 1e-12);
    EXPECT_NEAR(c.z(), 0.25, 1e-12);
}

TEST(Render, MatchesIndependentReference) {
    Scene scene;
    for (int i = 0; i < oracle::kSceneCount; ++i) {
        GaussianPrimitive p;
        p.position = Vec3(oracle::kScenePos + 3 * i);
        p.log_scale = Vec3(oracle::kSceneLogScale + 3 * i);
        p.rotation = Vec4(oracle::kSceneRot + 4 * i);
        p.opacity_logit = oracle::kSceneOpacity[i];
        p.sh_coeffs = Eigen::Map<const Eigen::Matrix<double, 16, 3, Eigen::RowMajor>>(oracle::kSceneSh + 48 * i);
        scene.primitives.push_back(p);
    }
    CameraView cam;
    cam.width = 24;
    cam.height = 20;
    cam.fx = 30.0;
    cam.fy = 28.0;
    cam.cx = 11.5;
    cam.cy = 9.25;
    cam.rotation = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(oracle::kCamRotation);
    cam.translation = Vec3(oracle::kCamTranslation);
    RenderOptions opts;
    opts.background = Color(0.1, 0.2, 0.3);
    opts.tile_size = 8;

    Image expected(24, 20);
    std::copy(std::begin(oracle::kSceneImage), std::end(oracle::kSceneImage), expected.pixels.begin());
    const Image tiled = render(scene, cam, opts).image;
    const Image brute = render_oracle(scene, cam, opts).image;
    EXPECT_LE(max_abs_diff(tiled, expected), 1e-12);
    EXPECT_LE(max_abs_diff(brute, expected), 1e-12);

    // The fixture must actually exercise blending, not just background.
    int covered = 0;
    for (int r = 0; r < 20; ++r) {
        for (int c = 0; c < 24; ++c) {
            covered += (expected.color(r, c) - opts.background).norm() > 0.05;
        }
    }
    EXPECT_GT(covered, 40);
}

TEST(RenderOracle, PeakAtProjectedMean) {
    Scene scene;
    scene.primitives.push_back(splat({0, 0, 2}, 0.04, 0.9, Color(0.9, 0.2, 0.1)));
    const CameraView cam = pinhole(32, 32, 60.0);
    const Image img = render_oracle(scene, cam, {}).image;
    double best = -1.0;
    int best_r = -1, best_c = -1;
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            if (img.at(r, c, 0) > best) {
                best = img.at(r, c, 0);
                best_r = r;
                best_c = c;
            }
        }
    }
    EXPECT_EQ(best_r, 16);
    EXPECT_EQ(best_c, 16);
}

TEST(RenderOracle, EquivalentToTiledOnRandomScenes) {
    Gen gen(31);
    for (int trial = 0; trial < 4; ++trial) {
        const Scene scene = gen.scene(static_cast<std::size_t>(gen.integer(1, 300)));
        for (const CameraView& cam : gen.cameras(2, 48)) {
            RenderOptions opts;
            opts.tile_size = gen.integer(0, 1) ? 16 : 7;
            EXPECT_LE(max_abs_diff(render(scene, cam, opts).image, render_oracle(scene, cam, opts).image), 1e-4);
        }
    }
}

TEST(AssignTiles, SingleTile) {
    Projected2DGaussian g;
    g.support = {18, 29, 2, 13};
    const auto tiles = assign_tiles(std::span(&g, 1), pinhole(64, 64, 50.0), 16);
    int hits = 0;
    for (std::size_t t = 0; t < tiles.ids.size(); ++t) {
        hits += static_cast<int>(tiles.ids[t].size());
        if (!tiles.ids[t].empty()) {
            EXPECT_EQ(t, 1u);
        }
    }
    EXPECT_EQ(hits, 1);
}

TEST(AssignTiles, TwoByTwoBlock) {
    Projected2DGaussian g;
    g.support = {10, 20, 40, 50};
    const auto tiles = assign_tiles(std::span(&g, 1), pinhole(64, 64, 50.0), 16);
    std::vector<std::size_t> hit;
    for (std::size_t t = 0; t < tiles.ids.size(); ++t) {
        if (!tiles.ids[t].empty()) {
            hit.push_back(t);
        }
    }
    EXPECT_EQ(hit, (std::vector<std::size_t>{8, 9, 12, 13}));
}

TEST(AssignTiles, CulledNeverAppear) {
    Scene scene;
    scene.primitives.push_back(splat({0, 0, -1}, 0.1, 0.9, kRed));
    scene.primitives.push_back(splat({0, 0, 2}, 0.1, 0.9, kRed));
    const CameraView cam = pinhole(64, 64, 50.0);
    const auto projected = project_scene(scene, cam);
    EXPECT_FALSE(projected[0].has_value());
    std::vector<Projected2DGaussian> visible;
    for (const auto& g : projected) {
        if (g) {
            visible.push_back(*g);
        }
    }
    for (const auto& list : assign_tiles(visible, cam, 16).ids) {
        EXPECT_TRUE(std::find(list.begin(), list.end(), 0u) == list.end());
    }
}

TEST(RenderOptionsValidation, RejectsBadValues) {
    RenderOptions bad;
    bad.tile_size = 0;
    EXPECT_THROW(validate_render_options(bad), ValidationError);
    bad = {};
    bad.alpha_cap = 1.5;
    EXPECT_THROW(validate_render_options(bad), ValidationError);
}

class RecordingProperties : public ::testing::TestWithParam<int> {};

TEST_P(RecordingProperties, StreamInvariants) {
    Gen gen(static_cast<std::uint64_t>(GetParam()) * 7919);
    const Scene scene = gen.scene(static_cast<std::size_t>(gen.integer(50, 400)));
    const CameraView cam = gen.cameras(1, 40).front();
    RenderOptions opts;
    opts.record_contributions = true;
    const RenderOutput rec = render(scene, cam, opts, 3);
    opts.record_contributions = false;
    const RenderOutput plain = render(scene, cam, opts, 3);
    EXPECT_EQ(rec.image.pixels, plain.image.pixels);

    ASSERT_TRUE(rec.contributions.has_value());
    const ContributionStream& s = *rec.contributions;
    EXPECT_EQ(s.view, 3u);
    EXPECT_EQ(s.projected_means.size(), scene.size());
    std::size_t total = 0;
    for (const RaySpan& span : s.rays) {
        ASSERT_GT(span.count, 0u);
        EXPECT_EQ(span.begin, total);
        total += span.count;
        EXPECT_EQ(rec.per_ray_hit_count[span.ray.row * 40 + span.ray.col], span.count);
        double weight_sum = 0.0;
        double prev_t = 2.0;
        bool first = true;
        for (const ContributionRecord& r : s.ray_records(span)) {
            EXPECT_EQ(r.ray, span.ray);
            if (first) {
                EXPECT_EQ(r.transmittance_before, 1.0);
                first = false;
            }
            EXPECT_LT(r.transmittance_before, prev_t);
            prev_t = r.transmittance_before;
            EXPECT_EQ(r.weight, r.alpha * r.transmittance_before);
            EXPECT_GE(r.alpha, 1.0 / 255.0);
            EXPECT_LE(r.alpha, 0.99);
            EXPECT_FALSE(std::isnan(s.projected_means[r.primitive_id].x()));
            weight_sum += r.weight;
        }
        EXPECT_LE(weight_sum, 1.0 + 1e-12);
    }
    EXPECT_EQ(total, s.records.size());
}

TEST_P(RecordingProperties, WorkerCountDoesNotChangeOutput) {
    Gen gen(static_cast<std::uint64_t>(GetParam()) * 104729);
    const Scene scene = gen.scene(300);
    const CameraView cam = gen.cameras(1, 48).front();
    RenderOptions opts;
    opts.record_contributions = true;
    opts.workers = 1;
    const RenderOutput one = render(scene, cam, opts);
    for (unsigned w : {2u, 8u}) {
        opts.workers = w;
        const RenderOutput many = render(scene, cam, opts);
        EXPECT_EQ(many.image.pixels, one.image.pixels);
        ASSERT_EQ(many.contributions->records.size(), one.contributions->records.size());
        for (std::size_t i = 0; i < one.contributions->records.size(); ++i) {
            const auto& a = one.contributions->records[i];
            const auto& b = many.contributions->records[i];
            EXPECT_TRUE(a.ray == b.ray && a.primitive_id == b.primitive_id && a.weight == b.weight);
        }
    }
}

TEST_P(RecordingProperties, OracleRecordsMatchTiledRecords) {
    Gen gen(static_cast<std::uint64_t>(GetParam()) * 31337);
    const Scene scene = gen.scene(200);
    const CameraView cam = gen.cameras(1, 40).front();
    RenderOptions opts;
    opts.record_contributions = true;
    const auto a = render(scene, cam, opts).contributions;
    const auto b = render_oracle(scene, cam, opts).contributions;
    ASSERT_EQ(a->rays.size(), b->rays.size());
    ASSERT_EQ(a->records.size(), b->records.size());
    for (std::size_t i = 0; i < a->rays.size(); ++i) {
        EXPECT_EQ(a->rays[i].ray, b->rays[i].ray);
        EXPECT_EQ(a->rays[i].count, b->rays[i].count);
    }
    for (std::size_t i = 0; i < a->records.size(); ++i) {
        EXPECT_EQ(a->records[i].primitive_id, b->records[i].primitive_id);
        EXPECT_NEAR(a->records[i].weight, b->records[i].weight, 1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RecordingProperties, ::testing::Range(1, 6));

TEST(RecordStreams, OneStreamPerViewIndexedByPosition) {
    Gen gen(41);
    const Scene scene = gen.scene(100);
    const auto cams = gen.cameras(3, 24);
    const auto streams = record_streams(scene, cams, {});
    ASSERT_EQ(streams.size(), 3u);
    for (std::uint32_t v = 0; v < 3; ++v) {
        EXPECT_EQ(streams[v].view, v);
        for (const auto& r : streams[v].records) {
            EXPECT_EQ(r.ray.view, v);
        }
    }
}

} // namespace
} // namespace splatprune
