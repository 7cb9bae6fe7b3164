#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/testkit/fixtures.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <numbers>
#include <vector>

using namespace eagle_eye;

namespace {

std::string fingerprint(const LoopReport& r)
{
    std::string out;
    char buf[512];
    for (const LoopStep& s : r.steps) {
        std::snprintf(buf, sizeof(buf), "%d %d %d %d %d %d %d %a %a %d %d %a %a %a %a %a %a %d\n", s.step, s.detected,
                      s.point.x, s.point.y, s.point.gray, s.region.col, s.region.row, s.commanded.pan_deg,
                      s.commanded.tilt_deg, s.pwm.pan_pulse_us, s.pwm.tilt_pulse_us, s.state.pan_deg,
                      s.state.tilt_deg, s.short_fraction, s.long_fraction, s.offset_x_px, s.offset_y_px, s.centered);
        out += buf;
    }
    for (const PwmLogRow& p : r.pwm_log) {
        std::snprintf(buf, sizeof(buf), "%a %d %d %a %a\n", p.t_s, p.pan_pulse_us, p.tilt_pulse_us, p.pan_deg,
                      p.tilt_deg);
        out += buf;
    }
    return out + (r.detection_failed ? "failed" : "ok");
}

// Area centroid of the projected ellipse outline, by the shoelace formula over
// a dense polygon. Perspective moves this away from the projected center.
std::array<double, 2> projected_ellipse_centroid(const Target& t, const PinholeCamera& cam, double depth)
{
    constexpr int kVertices = 4096;
    std::vector<std::array<double, 2>> poly;
    for (int k = 0; k < kVertices; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / kVertices;
        const auto p = cam.project({t.x_m + 0.5 * t.width_m * std::cos(phi), t.y_m + 0.5 * t.height_m * std::sin(phi),
                                    depth});
        poly.push_back(p.value());
    }
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (int k = 0; k < kVertices; ++k) {
        const auto& p = poly[k];
        const auto& q = poly[(k + 1) % kVertices];
        const double cross = p[0] * q[1] - q[0] * p[1];
        a += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

}  // namespace

TEST(ClosedLoop, NearBoresightCellCenters)
{
    const LoopSetup setup;
    const SimScene s = place_target_at_cell(testkit::small_target_scene(), 0, {3, 3}, setup.geometry);
    const LoopReport r = run_closed_loop(s, setup, 1);
    ASSERT_FALSE(r.detection_failed);
    EXPECT_EQ(r.steps.back().region, (RegionIndex{3, 3}));
    EXPECT_LT(std::fabs(r.steps.back().offset_x_px), 640.0 / 6.0);
    EXPECT_LT(std::fabs(r.steps.back().offset_y_px), 480.0 / 6.0);
    EXPECT_TRUE(r.centered());
}

TEST(ClosedLoop, SmallTargetAmplification)
{
    const LoopSetup setup;
    const SimScene s = testkit::small_target_scene();
    const LoopReport r = run_closed_loop(s, setup, 2);
    ASSERT_FALSE(r.detection_failed);
    const LoopStep& last = r.steps.back();
    EXPECT_EQ(last.region, (RegionIndex{4, 2}));
    EXPECT_GE(last.short_fraction, 0.004);
    EXPECT_LE(last.short_fraction, 0.005);
    const PinholeCamera cam = make_camera(Lens::long_focus, setup.geometry, {last.state.pan_deg, last.state.tilt_deg});
    const auto predicted = predicted_area_fraction(s.targets[0], cam, s.plane_distance_m);
    ASSERT_TRUE(predicted.has_value());
    EXPECT_GT(last.long_fraction, 0.05);
    EXPECT_NEAR(last.long_fraction / *predicted, 1.0, 0.05);
    EXPECT_TRUE(r.centered());
}

TEST(ClosedLoop, DeterministicAcrossRunsAndThreads)
{
    LoopSetup one;
    LoopSetup four;
    four.pipeline.threads = 4;
    const SimScene s = testkit::small_target_scene();
    const std::string a = fingerprint(run_closed_loop(s, one, 2));
    EXPECT_EQ(a, fingerprint(run_closed_loop(s, one, 2)));
    EXPECT_EQ(a, fingerprint(run_closed_loop(s, four, 2)));
}

TEST(ClosedLoop, NoTargetReportsDetectionFailure)
{
    SimScene s = testkit::small_target_scene();
    s.targets.clear();
    const LoopReport r = run_closed_loop(s, {}, 2);
    EXPECT_TRUE(r.detection_failed);
    ASSERT_EQ(r.steps.size(), 1u);
    EXPECT_FALSE(r.steps[0].detected);
    EXPECT_TRUE(r.pwm_log.empty());
    EXPECT_FALSE(r.centered());
}

TEST(ClosedLoop, RecordsAreOrderedAndBounded)
{
    const LoopReport r = run_closed_loop(testkit::small_target_scene(), {}, 2);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        EXPECT_EQ(r.steps[i].step, static_cast<int>(i));
        EXPECT_GE(r.steps[i].short_fraction, 0.0);
        EXPECT_LE(r.steps[i].long_fraction, 1.0);
    }
    for (std::size_t i = 1; i < r.pwm_log.size(); ++i) {
        EXPECT_GT(r.pwm_log[i].t_s, r.pwm_log[i - 1].t_s);
    }
}

TEST(ClosedLoop, OffsetDoesNotGrowAfterTheFirstMove)
{
    const LoopSetup setup;
    const SimScene s = place_target_at_cell(testkit::small_target_scene(), 0, {1, 4}, setup.geometry);
    const LoopReport r = run_closed_loop(s, setup, 3);
    ASSERT_EQ(r.steps.size(), 3u);
    // Once settled, re-detection may nudge the command by one PWM microsecond,
    // which is about two long-view pixels.
    for (std::size_t i = 1; i < r.steps.size(); ++i) {
        EXPECT_LE(r.offset_px(i), r.offset_px(i - 1) + 2.0);
    }
}

TEST(ClosedLoop, SettledTargetSitsWherePoseProjectsIt)
{
    // After settling, the rendered target centroid equals the centroid of the
    // target outline projected through the long camera at the reached pose.
    LoopSetup setup;
    setup.control.parallax_correction = true;
    setup.control.assumed_range_m = 6.65;
    for (RegionIndex cell : {RegionIndex{0, 0}, RegionIndex{5, 5}, RegionIndex{2, 1}}) {
        SimScene s = place_target_at_cell(testkit::small_target_scene(), 0, cell, setup.geometry);
        s.targets[0].width_m = s.targets[0].height_m = 0.5;
        s.targets[0].shape = TargetShape::ellipse;
        const LoopReport r = run_closed_loop(s, setup, 1);
        ASSERT_FALSE(r.detection_failed);
        const LoopStep& st = r.steps.back();
        EXPECT_EQ(st.region, cell);
        const PinholeCamera cam = make_camera(Lens::long_focus, setup.geometry, {st.state.pan_deg, st.state.tilt_deg});
        const auto c = projected_ellipse_centroid(s.targets[0], cam, s.plane_distance_m);
        EXPECT_NEAR(st.offset_x_px, c[0] - 320.0, 0.1);
        EXPECT_NEAR(st.offset_y_px, c[1] - 240.0, 0.1);
        // The residual is the PWM quantization (at most 0.06 deg, about 2 long-view pixels per axis).
        EXPECT_LE(std::fabs(st.offset_x_px), 2.5);
        EXPECT_LE(std::fabs(st.offset_y_px), 2.5);
    }
}

TEST(ClosedLoop, FrameSinkSeesEveryStep)
{
    int calls = 0;
    const LoopReport r =
        run_closed_loop(testkit::small_target_scene(), {}, 2, [&](const LoopStep& step, const StepFrames& f) {
            EXPECT_EQ(step.step, calls);
            EXPECT_EQ(f.wide.image.dims(), (Dims{640, 480}));
            EXPECT_EQ(f.narrow.image.dims(), (Dims{640, 480}));
            EXPECT_EQ(f.saliency.dims(), (Dims{640, 480}));
            ++calls;
        });
    EXPECT_EQ(calls, static_cast<int>(r.steps.size()));
}

TEST(ClosedLoop, RejectsBadArguments)
{
    EXPECT_THROW((void)run_closed_loop(testkit::small_target_scene(), {}, 0), InvalidInput);
    LoopSetup bad;
    bad.control.parallax_correction = true;
    bad.control.assumed_range_m = -1.0;
    EXPECT_THROW((void)run_closed_loop(testkit::small_target_scene(), bad, 1), InvalidInput);
}
