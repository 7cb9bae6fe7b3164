#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/testkit/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace eagle_eye;

namespace {

double coverage_sum(const RenderedView& v)
{
    double s = 0.0;
    for (double c : v.target_coverage) {
        s += c;
    }
    return s;
}

SimScene single_target(double x, double y, double w, double h, double distance, TargetShape shape)
{
    SimScene s;
    s.plane_distance_m = distance;
    s.background.kind = BackgroundKind::constant;
    Target t;
    t.x_m = x;
    t.y_m = y;
    t.width_m = w;
    t.height_m = h;
    t.shape = shape;
    s.targets.push_back(t);
    return s;
}

}  // namespace

TEST(RenderView, DimsMatchConfiguredResolution)
{
    CameraGeometry g;
    g.long_resolution = {320, 200};
    const SimScene s = single_target(0, 0, 1, 1, 10, TargetShape::rect);
    EXPECT_EQ(render_view(s, g, Lens::short_focus).image.dims(), (Dims{640, 480}));
    EXPECT_EQ(render_view(s, g, Lens::long_focus).image.dims(), (Dims{320, 200}));
}

TEST(RenderView, BoresightTargetIsCentered)
{
    const CameraGeometry g;
    const SimScene wide = single_target(0, 0, 0.8, 0.8, 10, TargetShape::ellipse);
    const auto cw = target_centroid(render_view(wide, g, Lens::short_focus));
    ASSERT_TRUE(cw.has_value());
    EXPECT_NEAR(cw->x, 320.0, 0.5);
    EXPECT_NEAR(cw->y, 240.0, 0.5);

    // The long camera sits above the wide one; put the target on its own axis.
    const SimScene narrow = single_target(0, g.vertical_offset_m, 0.8, 0.8, 10, TargetShape::ellipse);
    const auto cn = target_centroid(render_view(narrow, g, Lens::long_focus));
    ASSERT_TRUE(cn.has_value());
    EXPECT_NEAR(cn->x, 320.0, 0.5);
    EXPECT_NEAR(cn->y, 240.0, 0.5);
}

TEST(RenderView, DoublingDistanceHalvesSize)
{
    const CameraGeometry g;
    const SimScene near = single_target(0, g.vertical_offset_m, 0.6, 0.6, 10, TargetShape::rect);
    const SimScene far = single_target(0, g.vertical_offset_m, 0.6, 0.6, 20, TargetShape::rect);
    const double ln = std::sqrt(coverage_sum(render_view(near, g, Lens::long_focus)));
    const double lf = std::sqrt(coverage_sum(render_view(far, g, Lens::long_focus)));
    EXPECT_NEAR(ln / lf, 2.0, 0.02);
    EXPECT_NEAR(ln, oracle::pinhole_pixels(0.6, 10, 20, 640), 0.01 * ln);
}

TEST(RenderView, ShortVersusLongSizeRatio)
{
    const CameraGeometry g;
    // Sized so the short view spans about 50 px: 2x2 subsampling puts each edge
    // within a quarter pixel, so the measured side is good to about 1%.
    const SimScene s = single_target(0, 0, 1.8, 1.8, 10, TargetShape::rect);
    const double ls = std::sqrt(coverage_sum(render_view(s, g, Lens::short_focus)));
    const double ll = std::sqrt(coverage_sum(render_view(s, g, Lens::long_focus)));
    const double predicted = oracle::pinhole_pixels(0.5, 10, 20, 640) / oracle::pinhole_pixels(0.5, 10, 100, 640);
    EXPECT_NEAR(predicted, std::tan(50.0 * std::numbers::pi / 180) / std::tan(10.0 * std::numbers::pi / 180), 1e-9);
    EXPECT_NEAR((ll / ls) / predicted, 1.0, 0.02);
}

TEST(RenderView, SameSeedSameImage)
{
    const SimScene s = testkit::small_target_scene();
    const CameraGeometry g;
    const RenderedView a = render_view(s, g, Lens::short_focus);
    const RenderedView b = render_view(s, g, Lens::short_focus, {}, 4);
    EXPECT_TRUE(a.image == b.image);
    EXPECT_TRUE(a.target_coverage == b.target_coverage);
    const RenderedView c = render_view(s, g, Lens::long_focus, {30.0, 7.0}, 1);
    const RenderedView d = render_view(s, g, Lens::long_focus, {30.0, 7.0}, 3);
    EXPECT_TRUE(c.image == d.image);
}

TEST(RenderView, SeedChangesTexture)
{
    SimScene s = testkit::small_target_scene();
    const CameraGeometry g;
    const RenderedView a = render_view(s, g, Lens::short_focus);
    s.seed = 8;
    EXPECT_FALSE(a.image == render_view(s, g, Lens::short_focus).image);
}

TEST(RenderView, NoiseStaysWithinAmplitude)
{
    SimScene s;
    s.background.amplitude = 0.1;
    const RenderedView v = render_view(s, {}, Lens::short_focus);
    for (double x : v.image.r) {
        EXPECT_GE(x, 0.4 - 1e-12);
        EXPECT_LE(x, 0.6 + 1e-12);
    }
}

TEST(RenderView, PoseFacingAwayShowsBackgroundOnly)
{
    const SimScene s = single_target(0, 0, 1, 1, 10, TargetShape::rect);
    const RenderedView v = render_view(s, {}, Lens::long_focus, {170.0, 0.0});
    EXPECT_TRUE(v.plane_missed);
    for (double x : v.image.g) {
        EXPECT_EQ(x, s.background.level);
    }
    EXPECT_EQ(target_area_fraction(v), 0.0);
    EXPECT_FALSE(render_view(s, {}, Lens::short_focus).plane_missed);
}

TEST(RenderView, RejectsInvalidScene)
{
    SimScene s;
    s.plane_distance_m = 0.0;
    EXPECT_THROW((void)render_view(s, {}, Lens::short_focus), InvalidInput);
    s = single_target(0, 0, 1, 1, 10, TargetShape::rect);
    s.targets[0].rgb = {1.2, 0.0, 0.0};
    EXPECT_THROW((void)render_view(s, {}, Lens::short_focus), InvalidInput);
}

TEST(AreaFraction, TargetOutsideViewIsZero)
{
    const SimScene s = single_target(100.0, 0, 1, 1, 10, TargetShape::rect);
    EXPECT_EQ(target_area_fraction(render_view(s, {}, Lens::short_focus)), 0.0);
    EXPECT_FALSE(target_centroid(render_view(s, {}, Lens::short_focus)).has_value());
}

TEST(AreaFraction, CentralQuarterRect)
{
    const CameraGeometry g;
    const double d = 10.0;
    const double w = d * std::tan(50.0 * std::numbers::pi / 180);  // half the visible width
    const double h = d * std::tan(deg_to_rad(g.short_vfov_deg()) / 2);
    const SimScene s = single_target(0, 0, w, h, d, TargetShape::rect);
    EXPECT_NEAR(target_area_fraction(render_view(s, g, Lens::short_focus)), 0.25, 0.005);
}

TEST(AreaFraction, SmallTargetShortView)
{
    const double f = target_area_fraction(render_view(testkit::small_target_scene(), {}, Lens::short_focus));
    EXPECT_GE(f, 0.004);
    EXPECT_LE(f, 0.005);
}

TEST(AreaFraction, MatchesAnalyticPrediction)
{
    const CameraGeometry g;
    for (TargetShape shape : {TargetShape::rect, TargetShape::ellipse}) {
        const SimScene s = single_target(0.3, -0.2, 0.9, 0.6, 8, shape);
        for (Lens lens : {Lens::short_focus, Lens::long_focus}) {
            const RenderedView v = render_view(s, g, lens);
            const auto p = predicted_area_fraction(s.targets[0], v.camera, s.plane_distance_m);
            ASSERT_TRUE(p.has_value());
            EXPECT_NEAR(target_area_fraction(v) / *p, 1.0, 0.05);
            // Coverage integrates the area more precisely than the majority count.
            EXPECT_NEAR(coverage_sum(v) / static_cast<double>(v.target_coverage.size()) / *p, 1.0, 0.03);
        }
    }
}

TEST(AreaFraction, PredictionClipsToTheImage)
{
    const CameraGeometry g;
    // Square straddling the right edge of the wide view: half of it is visible.
    const double edge = 10.0 * std::tan(50.0 * std::numbers::pi / 180);
    const SimScene s = single_target(edge, 0, 1, 1, 10, TargetShape::rect);
    const PinholeCamera cam = make_camera(Lens::short_focus, g);
    const auto full = predicted_area_fraction(single_target(0, 0, 1, 1, 10, TargetShape::rect).targets[0], cam, 10);
    const auto half = predicted_area_fraction(s.targets[0], cam, 10);
    ASSERT_TRUE(full && half);
    EXPECT_NEAR(*half / *full, 0.5, 0.01);
}

TEST(PlaceTarget, CellCenterProjectsOntoCellCenter)
{
    const CameraGeometry g;
    SimScene s = single_target(0, 0, 0.5, 0.5, 7, TargetShape::ellipse);
    const FovPartition p = partition_fov(g.short_resolution);
    for (RegionIndex cell : {RegionIndex{0, 0}, RegionIndex{4, 2}, RegionIndex{5, 5}}) {
        s = place_target_at_cell(s, 0, cell, g);
        const auto px = make_camera(Lens::short_focus, g).project({s.targets[0].x_m, s.targets[0].y_m, 7});
        ASSERT_TRUE(px.has_value());
        EXPECT_NEAR((*px)[0], p.center(cell).x, 1e-9);
        EXPECT_NEAR((*px)[1], p.center(cell).y, 1e-9);
    }
    EXPECT_THROW((void)place_target_at_cell(s, 3, {0, 0}, g), InvalidInput);
}
