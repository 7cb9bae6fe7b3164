#pragma once

/**
 * @file camera_sim.hpp
 * @brief Pinhole rendering of a fronto-parallel textured plane for the wide
 *        (short-focus) and narrow (long-focus) cameras, plus the
 *        detect -> partition -> steer -> re-render loop.
 *
 * World frame: x right, y up, z forward along the wide camera's axis. The
 * wide camera sits at the origin and never moves; the narrow camera sits at
 * (0, vertical_offset, 0) on the pan/tilt gimbal. The scene plane is z = D.
 */

#include "eagle_eye/gimbal.hpp"
#include "eagle_eye/image.hpp"
#include "eagle_eye/localizer.hpp"
#include "eagle_eye/parallel.hpp"
#include "eagle_eye/saliency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace eagle_eye {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

enum class BackgroundKind { constant, gradient, noise };
enum class TargetShape { rect, ellipse };
enum class Lens { short_focus, long_focus };

struct Background {
    BackgroundKind kind = BackgroundKind::noise;
    double level = 0.5;
    double amplitude = 0.1;       // noise: peak deviation from `level`
    double noise_cell_m = 0.05;   // noise: lattice spacing on the plane
    double gradient_per_m = 0.02; // gradient: change in gray per meter along x
};

struct Target {
    double x_m = 0.0;
    double y_m = 0.0;
    double width_m = 1.0;
    double height_m = 1.0;
    TargetShape shape = TargetShape::rect;
    std::array<double, 3> rgb{0.85, 0.1, 0.1};

    [[nodiscard]] bool contains(double x, double y) const
    {
        const double dx = (x - x_m) / (width_m / 2.0);
        const double dy = (y - y_m) / (height_m / 2.0);
        if (shape == TargetShape::rect) {
            return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        }
        return dx * dx + dy * dy <= 1.0;
    }
};

struct SimScene {
    Background background;
    std::vector<Target> targets;
    double plane_distance_m = 10.0;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (!(plane_distance_m > 0.0) || !std::isfinite(plane_distance_m)) {
            throw InvalidInput("scene plane distance must be positive");
        }
        if (!(background.level >= 0.0 && background.level <= 1.0) || !(background.amplitude >= 0.0) ||
            !(background.noise_cell_m > 0.0) || !std::isfinite(background.gradient_per_m)) {
            throw InvalidInput("invalid scene background");
        }
        for (const Target& t : targets) {
            if (!(t.width_m > 0.0) || !(t.height_m > 0.0) || !std::isfinite(t.x_m) || !std::isfinite(t.y_m)) {
                throw InvalidInput("targets need a finite center and positive size");
            }
            for (double c : t.rgb) {
                if (!(c >= 0.0 && c <= 1.0)) {
                    throw InvalidInput("target colors must be in [0, 1]");
                }
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Camera model

struct PinholeCamera {
    Dims resolution;
    double tan_half_h = 1.0;
    double tan_half_v = 1.0;
    Vec3 position;
    double pan_rad = 0.0;
    double tilt_rad = 0.0;

    /// World direction of the ray through continuous pixel position (px, py).
    [[nodiscard]] Vec3 ray(double px, double py) const
    {
        const double a = (2.0 * px / resolution.width - 1.0) * tan_half_h;
        const double b = (1.0 - 2.0 * py / resolution.height) * tan_half_v;
        return rotate({a, b, 1.0});
    }

    /// Continuous pixel position of a world point, if it lies in front of the camera.
    [[nodiscard]] std::optional<std::array<double, 2>> project(const Vec3& p) const
    {
        const Vec3 d = unrotate({p.x - position.x, p.y - position.y, p.z - position.z});
        if (!(d.z > 0.0)) {
            return std::nullopt;
        }
        const double a = d.x / d.z;
        const double b = d.y / d.z;
        return std::array<double, 2>{(a / tan_half_h + 1.0) * resolution.width / 2.0,
                                     (1.0 - b / tan_half_v) * resolution.height / 2.0};
    }

    // Tilt about x (positive looks up), then pan about y (positive looks right).
    [[nodiscard]] Vec3 rotate(const Vec3& v) const
    {
        const double ct = std::cos(tilt_rad), st = std::sin(tilt_rad);
        const double cp = std::cos(pan_rad), sp = std::sin(pan_rad);
        const Vec3 t{v.x, v.y * ct + v.z * st, -v.y * st + v.z * ct};
        return {t.x * cp + t.z * sp, t.y, -t.x * sp + t.z * cp};
    }
    [[nodiscard]] Vec3 unrotate(const Vec3& v) const
    {
        const double ct = std::cos(tilt_rad), st = std::sin(tilt_rad);
        const double cp = std::cos(pan_rad), sp = std::sin(pan_rad);
        const Vec3 p{v.x * cp - v.z * sp, v.y, v.x * sp + v.z * cp};
        return {p.x, p.y * ct - p.z * st, p.y * st + p.z * ct};
    }
};

[[nodiscard]] inline PinholeCamera make_camera(Lens lens, const CameraGeometry& geom, PanTilt pose = {})
{
    PinholeCamera cam;
    if (lens == Lens::short_focus) {
        cam.resolution = geom.short_resolution;
        cam.tan_half_h = std::tan(deg_to_rad(geom.short_hfov_deg) / 2.0);
        cam.tan_half_v = std::tan(deg_to_rad(geom.short_vfov_deg()) / 2.0);
    } else {
        cam.resolution = geom.long_resolution;
        cam.tan_half_h = std::tan(deg_to_rad(geom.long_hfov_deg) / 2.0);
        cam.tan_half_v = std::tan(deg_to_rad(geom.long_vfov_deg()) / 2.0);
        cam.position = {0.0, geom.vertical_offset_m, 0.0};
        cam.pan_rad = deg_to_rad(pose.pan_deg);
        cam.tilt_rad = deg_to_rad(pose.tilt_deg);
    }
    return cam;
}

/// Plane point seen by the wide camera at continuous pixel (px, py).
[[nodiscard]] inline std::array<double, 2> wide_pixel_to_plane(double px, double py, const CameraGeometry& geom,
                                                               double plane_distance_m)
{
    const Vec3 d = make_camera(Lens::short_focus, geom).ray(px, py);
    return {plane_distance_m * d.x / d.z, plane_distance_m * d.y / d.z};
}

// ---------------------------------------------------------------------------
// Texture

namespace detail {

[[nodiscard]] inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] inline double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
    h = splitmix64(h ^ static_cast<std::uint64_t>(iy));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

[[nodiscard]] inline double background_value(const Background& bg, std::uint64_t seed, double x, double y)
{
    switch (bg.kind) {
    case BackgroundKind::constant:
        return bg.level;
    case BackgroundKind::gradient:
        return std::clamp(bg.level + bg.gradient_per_m * x, 0.0, 1.0);
    case BackgroundKind::noise: {
        const double gx = x / bg.noise_cell_m;
        const double gy = y / bg.noise_cell_m;
        const double fx0 = std::floor(gx);
        const double fy0 = std::floor(gy);
        const auto ix = static_cast<std::int64_t>(fx0);
        const auto iy = static_cast<std::int64_t>(fy0);
        const double fx = gx - fx0;
        const double fy = gy - fy0;
        const double v00 = detail::lattice_value(seed, ix, iy);
        const double v10 = detail::lattice_value(seed, ix + 1, iy);
        const double v01 = detail::lattice_value(seed, ix, iy + 1);
        const double v11 = detail::lattice_value(seed, ix + 1, iy + 1);
        const double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
        return std::clamp(bg.level + bg.amplitude * (2.0 * v - 1.0), 0.0, 1.0);
    }
    }
    return bg.level;
}

// ---------------------------------------------------------------------------
// Rendering

struct RenderedView {
    RgbImage image;
    /// Fraction of the 2x2 subsamples of each pixel that hit a target.
    ImageBuffer target_coverage;
    Lens lens = Lens::short_focus;
    PinholeCamera camera;
    PanTilt pose;
    /// Some rays never reach the plane; those pixels show the background level.
    bool plane_missed = false;
};

[[nodiscard]] inline RenderedView render_view(const SimScene& scene, const CameraGeometry& geom, Lens lens,
                                              PanTilt pose = {}, int threads = 1)
{
    scene.validate();
    geom.validate();
    RenderedView view;
    view.lens = lens;
    view.pose = lens == Lens::short_focus ? PanTilt{} : pose;
    view.camera = make_camera(lens, geom, view.pose);
    const PinholeCamera& cam = view.camera;
    const Dims dims = cam.resolution;
    view.image = RgbImage(dims);
    view.target_coverage = ImageBuffer(dims, 0.0);
    std::vector<char> missed(static_cast<std::size_t>(dims.height), 0);

    constexpr double kOffsets[2] = {0.25, 0.75};
    parallel_for(dims.height, threads, [&](int y) {
        for (int x = 0; x < dims.width; ++x) {
            double rgb[3] = {0.0, 0.0, 0.0};
            int hits = 0;
            for (double oy : kOffsets) {
                for (double ox : kOffsets) {
                    const Vec3 d = cam.ray(x + ox, y + oy);
                    if (!(d.z > 0.0)) {
                        missed[static_cast<std::size_t>(y)] = 1;
                        for (double& c : rgb) {
                            c += scene.background.level;
                        }
                        continue;
                    }
                    const double lambda = (scene.plane_distance_m - cam.position.z) / d.z;
                    const double px = cam.position.x + lambda * d.x;
                    const double py = cam.position.y + lambda * d.y;
                    const Target* hit = nullptr;
                    for (const Target& t : scene.targets) {
                        if (t.contains(px, py)) {
                            hit = &t;  // later targets paint over earlier ones
                        }
                    }
                    if (hit != nullptr) {
                        ++hits;
                        for (int c = 0; c < 3; ++c) {
                            rgb[c] += hit->rgb[static_cast<std::size_t>(c)];
                        }
                    } else {
                        const double g = background_value(scene.background, scene.seed, px, py);
                        for (double& c : rgb) {
                            c += g;
                        }
                    }
                }
            }
            view.image.set(x, y, rgb[0] / 4.0, rgb[1] / 4.0, rgb[2] / 4.0);
            view.target_coverage(x, y) = hits / 4.0;
        }
    });
    view.plane_missed = std::any_of(missed.begin(), missed.end(), [](char c) { return c != 0; });
    return view;
}

/// Fraction of pixels where the target covers more than half of the subsamples.
[[nodiscard]] inline double target_area_fraction(const RenderedView& view)
{
    std::size_t count = 0;
    for (double c : view.target_coverage) {
        if (c > 0.5) {
            ++count;
        }
    }
    return view.target_coverage.empty() ? 0.0
                                        : static_cast<double>(count) / static_cast<double>(view.target_coverage.size());
}

struct PixelOffset {
    double x = 0.0;
    double y = 0.0;
};

/// Coverage-weighted centroid of the target in continuous pixel coordinates.
[[nodiscard]] inline std::optional<PixelOffset> target_centroid(const RenderedView& view)
{
    double w = 0.0, sx = 0.0, sy = 0.0;
    const ImageBuffer& cov = view.target_coverage;
    for (int y = 0; y < cov.height(); ++y) {
        for (int x = 0; x < cov.width(); ++x) {
            const double c = cov(x, y);
            w += c;
            sx += c * (x + 0.5);
            sy += c * (y + 0.5);
        }
    }
    if (!(w > 0.0)) {
        return std::nullopt;
    }
    return PixelOffset{sx / w, sy / w};
}

// ---------------------------------------------------------------------------
// Analytic projected area

namespace detail {

using Polygon = std::vector<std::array<double, 2>>;

// Sutherland-Hodgman against one axis-aligned half plane.
inline Polygon clip_edge(const Polygon& in, int axis, double bound, bool keep_greater)
{
    Polygon out;
    if (in.empty()) {
        return out;
    }
    auto inside = [&](const std::array<double, 2>& p) {
        return keep_greater ? p[static_cast<std::size_t>(axis)] >= bound : p[static_cast<std::size_t>(axis)] <= bound;
    };
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto& cur = in[i];
        const auto& prev = in[(i + in.size() - 1) % in.size()];
        const bool ci = inside(cur);
        const bool pi = inside(prev);
        if (ci != pi) {
            const auto a = static_cast<std::size_t>(axis);
            const double t = (bound - prev[a]) / (cur[a] - prev[a]);
            out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
        }
        if (ci) {
            out.push_back(cur);
        }
    }
    return out;
}

inline double shoelace(const Polygon& p)
{
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u[0] * v[1] - v[0] * u[1];
    }
    return std::abs(a) / 2.0;
}

}  // namespace detail

/**
 * Image-area fraction of a target's exact perspective projection, clipped to
 * the frame. Rect outlines project to exact polygons; ellipses use a
 * 1440-gon. Returns nullopt if part of the outline is behind the camera.
 */
[[nodiscard]] inline std::optional<double> predicted_area_fraction(const Target& target, const PinholeCamera& cam,
                                                                   double plane_distance_m)
{
    std::vector<std::array<double, 2>> outline;
    if (target.shape == TargetShape::rect) {
        const double hw = target.width_m / 2.0;
        const double hh = target.height_m / 2.0;
        outline = {{target.x_m - hw, target.y_m - hh},
                   {target.x_m + hw, target.y_m - hh},
                   {target.x_m + hw, target.y_m + hh},
                   {target.x_m - hw, target.y_m + hh}};
    } else {
        constexpr int kVertices = 1440;
        for (int i = 0; i < kVertices; ++i) {
            const double t = 2.0 * std::numbers::pi * i / kVertices;
            outline.push_back({target.x_m + target.width_m / 2.0 * std::cos(t),
                               target.y_m + target.height_m / 2.0 * std::sin(t)});
        }
    }
    detail::Polygon poly;
    for (const auto& p : outline) {
        const auto px = cam.project({p[0], p[1], plane_distance_m});
        if (!px) {
            return std::nullopt;
        }
        poly.push_back(*px);
    }
    poly = detail::clip_edge(poly, 0, 0.0, true);
    poly = detail::clip_edge(poly, 0, cam.resolution.width, false);
    poly = detail::clip_edge(poly, 1, 0.0, true);
    poly = detail::clip_edge(poly, 1, cam.resolution.height, false);
    return detail::shoelace(poly) / static_cast<double>(cam.resolution.area());
}

// ---------------------------------------------------------------------------
// Closed loop

struct ControlConfig {
    /// Compensate the camera offset using `assumed_range_m`.
    bool parallax_correction = false;
    double assumed_range_m = 10.0;
    double settle_tolerance_deg = 0.01;
    double max_settle_s = 2.0;
    /// Minimum raw feature contrast for a detection to count.
    double detection_floor = 0.75;
    RegionParams region;
    int max_steps = 2;

    void validate() const
    {
        if (parallax_correction && !(assumed_range_m > 0.0)) {
            throw InvalidInput("assumed_range_m must be positive when parallax correction is on");
        }
        if (!(settle_tolerance_deg > 0.0) || !(max_settle_s > 0.0) || !(detection_floor >= 0.0) || max_steps < 1) {
            throw InvalidInput("invalid control settings");
        }
        if (!(region.threshold_frac > 0.0 && region.threshold_frac < 1.0)) {
            throw InvalidInput("region threshold_frac must be in (0, 1)");
        }
    }
};

struct LoopStep {
    int step = 0;
    bool detected = false;
    SalientPoint point;
    BoundingBox region_bbox;
    double region_centroid_x = 0.0;
    double region_centroid_y = 0.0;
    RegionIndex region;
    PanTilt commanded;
    PwmCommand pwm;
    GimbalState state;
    double short_fraction = 0.0;
    double long_fraction = 0.0;
    /// Target centroid minus the narrow image center, in narrow-view pixels (NaN if unseen).
    double offset_x_px = std::numeric_limits<double>::quiet_NaN();
    double offset_y_px = std::numeric_limits<double>::quiet_NaN();
    bool centered = false;
};

struct StepFrames {
    RenderedView wide;
    RenderedView narrow;  // default-constructed when detection failed
    GrayImage saliency;
};

struct LoopReport {
    std::vector<LoopStep> steps;
    std::vector<PwmLogRow> pwm_log;
    bool detection_failed = false;

    [[nodiscard]] bool centered() const { return !detection_failed && !steps.empty() && steps.back().centered; }
    [[nodiscard]] double offset_px(std::size_t i) const { return std::hypot(steps[i].offset_x_px, steps[i].offset_y_px); }
};

struct LoopSetup {
    CameraGeometry geometry;
    PipelineConfig pipeline;
    ControlConfig control;
    ServoModel servo;
    PwmCalibration pwm;
};

using FrameSink = std::function<void(const LoopStep&, const StepFrames&)>;

/**
 * One loop step per iteration: render the wide view, detect, pick the 6x6
 * cell, command the gimbal, let the servos settle at the command rate, then
 * render the narrow view and measure where the target landed.
 */
[[nodiscard]] inline LoopReport run_closed_loop(const SimScene& scene, const LoopSetup& setup, int max_steps,
                                                const FrameSink& sink = {})
{
    scene.validate();
    setup.geometry.validate();
    setup.pipeline.validate();
    setup.control.validate();
    setup.servo.validate();
    setup.pwm.validate();
    if (max_steps < 1) {
        throw InvalidInput("run_closed_loop: max_steps must be >= 1");
    }

    const int threads = setup.pipeline.threads;
    const FovPartition part = partition_fov(setup.geometry.short_resolution);
    const double dt = 1.0 / setup.servo.command_rate_hz;
    std::optional<double> range;
    if (setup.control.parallax_correction) {
        range.emplace(setup.control.assumed_range_m);
    }

    LoopReport report;
    GimbalState state;
    double t = 0.0;
    for (int step = 0; step < max_steps; ++step) {
        LoopStep rec;
        rec.step = step;
        StepFrames frames;
        frames.wide = render_view(scene, setup.geometry, Lens::short_focus, {}, threads);
        rec.short_fraction = target_area_fraction(frames.wide);

        const SaliencyResult sal = compute_saliency(frames.wide.image, setup.pipeline);
        const Detection det = localize(sal, setup.control.region);
        frames.saliency = det.gray;
        rec.point = det.point;
        rec.region_bbox = det.region.bbox;
        rec.region_centroid_x = det.region.centroid_x;
        rec.region_centroid_y = det.region.centroid_y;
        rec.detected = det.point.gray > 0 && sal.peak_feature_contrast >= setup.control.detection_floor;
        if (!rec.detected) {
            report.detection_failed = true;
            rec.state = state;
            if (sink) {
                sink(rec, frames);
            }
            report.steps.push_back(rec);
            break;
        }

        rec.region = locate_region(det.point.x, det.point.y, part);
        rec.commanded = region_to_angles(rec.region, part, setup.geometry, range);
        rec.pwm = angles_to_pwm(rec.commanded, setup.pwm);

        double settle = 0.0;
        do {
            state = step_servo(state, rec.pwm, dt, setup.servo, setup.pwm);
            t += dt;
            settle += dt;
            report.pwm_log.push_back({t, rec.pwm.pan_pulse_us, rec.pwm.tilt_pulse_us, state.pan_deg, state.tilt_deg});
        } while ((std::abs(state.pan_deg - state.pan_cmd_deg) > setup.control.settle_tolerance_deg ||
                  std::abs(state.tilt_deg - state.tilt_cmd_deg) > setup.control.settle_tolerance_deg) &&
                 settle < setup.control.max_settle_s);
        rec.state = state;

        frames.narrow =
            render_view(scene, setup.geometry, Lens::long_focus, {state.pan_deg, state.tilt_deg}, threads);
        rec.long_fraction = target_area_fraction(frames.narrow);
        const Dims nd = setup.geometry.long_resolution;
        if (const auto c = target_centroid(frames.narrow)) {
            rec.offset_x_px = c->x - nd.width / 2.0;
            rec.offset_y_px = c->y - nd.height / 2.0;
            rec.centered = std::abs(rec.offset_x_px) <= nd.width / 6.0 && std::abs(rec.offset_y_px) <= nd.height / 6.0;
        }
        if (sink) {
            sink(rec, frames);
        }
        report.steps.push_back(rec);
    }
    return report;
}

/// Copy of `scene` with target `index` moved onto the plane point under wide-view cell `cell`.
[[nodiscard]] inline SimScene place_target_at_cell(SimScene scene, std::size_t index, RegionIndex cell,
                                                   const CameraGeometry& geom)
{
    if (index >= scene.targets.size()) {
        throw InvalidInput("place_target_at_cell: no such target");
    }
    const FovPartition part = partition_fov(geom.short_resolution);
    const CellCenter c = part.center(cell);
    const auto p = wide_pixel_to_plane(c.x, c.y, geom, scene.plane_distance_m);
    scene.targets[index].x_m = p[0];
    scene.targets[index].y_m = p[1];
    return scene;
}

}  // namespace eagle_eye
