#pragma once

/**
 * @file gimbal.hpp
 * @brief Wide-view partition, pointing geometry, PWM encoding and the servo model.
 *
 * Conventions: pan is positive to the right, tilt positive upwards, and (0, 0)
 * is the wide camera's optical axis. The pan axis carries the tilt axis, so a
 * direction (a, b, 1) in the wide camera frame is reached with
 * pan = atan(a), tilt = atan(b / sqrt(1 + a^2)).
 */

#include "eagle_eye/image.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace eagle_eye {

[[nodiscard]] inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
[[nodiscard]] inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct CameraGeometry {
    double short_focal_mm = 2.1;
    double long_focal_mm = 12.0;
    double short_hfov_deg = 100.0;
    double long_hfov_deg = 20.0;
    /// Vertical FOVs; when unset they follow from the resolution with square pixels.
    std::optional<double> short_vfov_override_deg;
    std::optional<double> long_vfov_override_deg;
    Dims short_resolution{640, 480};
    Dims long_resolution{640, 480};
    /// Long camera optical center sits this far above the wide camera's.
    double vertical_offset_m = 0.03688;

    [[nodiscard]] static double vfov_from_aspect(double hfov_deg, Dims res)
    {
        const double t = std::tan(deg_to_rad(hfov_deg) / 2.0) * res.height / res.width;
        return rad_to_deg(2.0 * std::atan(t));
    }
    [[nodiscard]] double short_vfov_deg() const
    {
        return short_vfov_override_deg.value_or(vfov_from_aspect(short_hfov_deg, short_resolution));
    }
    [[nodiscard]] double long_vfov_deg() const
    {
        return long_vfov_override_deg.value_or(vfov_from_aspect(long_hfov_deg, long_resolution));
    }
    [[nodiscard]] double fov_ratio() const { return short_hfov_deg / long_hfov_deg; }
    /// Sensor width implied by the focal length and horizontal FOV.
    [[nodiscard]] double short_sensor_width_mm() const
    {
        return 2.0 * short_focal_mm * std::tan(deg_to_rad(short_hfov_deg) / 2.0);
    }
    [[nodiscard]] double long_sensor_width_mm() const
    {
        return 2.0 * long_focal_mm * std::tan(deg_to_rad(long_hfov_deg) / 2.0);
    }

    void validate() const
    {
        auto fov_ok = [](double f) { return f > 0.0 && f < 180.0; };
        if (!fov_ok(short_hfov_deg) || !fov_ok(long_hfov_deg) || !fov_ok(short_vfov_deg()) ||
            !fov_ok(long_vfov_deg())) {
            throw InvalidInput("camera fields of view must be in (0, 180) degrees");
        }
        if (!(short_focal_mm > 0.0) || !(long_focal_mm > 0.0)) {
            throw InvalidInput("focal lengths must be positive");
        }
        if (short_resolution.empty() || long_resolution.empty()) {
            throw InvalidInput("camera resolutions must be positive");
        }
        if (!(vertical_offset_m >= 0.0) || !std::isfinite(vertical_offset_m)) {
            throw InvalidInput("vertical offset must be a finite non-negative length");
        }
    }
};

// ---------------------------------------------------------------------------
// Field-of-view partition

struct RegionIndex {
    int col = 0;
    int row = 0;

    friend bool operator==(const RegionIndex&, const RegionIndex&) = default;
};

struct CellCenter {
    double x = 0.0;
    double y = 0.0;
};

/// 6 x 6 tiling of the wide image. Pixel x belongs to column floor(6x / W).
struct FovPartition {
    static constexpr int kCols = 6;
    static constexpr int kRows = 6;

    Dims dims;

    /// First pixel column (or row) of cell i along an axis of length n.
    [[nodiscard]] static int cell_start(int i, int n) { return (i * n + (kCols - 1)) / kCols; }

    [[nodiscard]] int col_start(int i) const { return cell_start(i, dims.width); }
    [[nodiscard]] int row_start(int j) const { return cell_start(j, dims.height); }
    [[nodiscard]] int col_end(int i) const { return i + 1 == kCols ? dims.width : col_start(i + 1); }
    [[nodiscard]] int row_end(int j) const { return j + 1 == kRows ? dims.height : row_start(j + 1); }

    [[nodiscard]] CellCenter center(RegionIndex r) const
    {
        return {(r.col + 0.5) * dims.width / kCols, (r.row + 0.5) * dims.height / kRows};
    }
    [[nodiscard]] static bool valid(RegionIndex r)
    {
        return r.col >= 0 && r.col < kCols && r.row >= 0 && r.row < kRows;
    }
};

[[nodiscard]] inline FovPartition partition_fov(Dims dims)
{
    if (dims.width < FovPartition::kCols || dims.height < FovPartition::kRows) {
        throw InvalidInput("partition_fov: image must be at least 6x6 pixels");
    }
    return FovPartition{dims};
}

[[nodiscard]] inline RegionIndex locate_region(double x, double y, const FovPartition& part)
{
    if (!(x >= 0.0 && y >= 0.0 && x < part.dims.width && y < part.dims.height)) {
        throw InvalidInput("locate_region: point outside the image");
    }
    const int col = std::min(static_cast<int>(std::floor(FovPartition::kCols * x / part.dims.width)),
                             FovPartition::kCols - 1);
    const int row = std::min(static_cast<int>(std::floor(FovPartition::kRows * y / part.dims.height)),
                             FovPartition::kRows - 1);
    return {col, row};
}

// ---------------------------------------------------------------------------
// Pointing

struct PanTilt {
    double pan_deg = 0.0;
    double tilt_deg = 0.0;
};

/**
 * Gimbal angles that put the long camera's optical axis on the wide-view
 * position (u, v), given as fractions of the image width/height.
 * With `range_m` (distance of the target plane along the wide camera axis) the
 * vertical offset between the two cameras is compensated; without it the
 * target is assumed to be at infinity.
 */
[[nodiscard]] inline PanTilt pointing_angles(double u, double v, const CameraGeometry& geom,
                                             std::optional<double> range_m = std::nullopt)
{
    const double a = (2.0 * u - 1.0) * std::tan(deg_to_rad(geom.short_hfov_deg) / 2.0);
    const double b = (1.0 - 2.0 * v) * std::tan(deg_to_rad(geom.short_vfov_deg()) / 2.0);
    const double horizontal = std::sqrt(1.0 + a * a);
    PanTilt out;
    out.pan_deg = rad_to_deg(std::atan(a));
    if (range_m.has_value()) {
        const double d = range_m.value_or(0.0);
        if (!(d > 0.0)) {
            throw InvalidInput("pointing_angles: range must be positive");
        }
        out.tilt_deg = rad_to_deg(std::atan2(d * b - geom.vertical_offset_m, d * horizontal));
    } else {
        out.tilt_deg = rad_to_deg(std::atan2(b, horizontal));
    }
    return out;
}

[[nodiscard]] inline PanTilt region_to_angles(RegionIndex region, const FovPartition& part,
                                              const CameraGeometry& geom,
                                              std::optional<double> range_m = std::nullopt)
{
    if (!FovPartition::valid(region)) {
        throw InvalidInput("region_to_angles: region index out of range");
    }
    const CellCenter c = part.center(region);
    return pointing_angles(c.x / part.dims.width, c.y / part.dims.height, geom, range_m);
}

// ---------------------------------------------------------------------------
// PWM

struct PwmCalibration {
    double range_deg = 60.0;  // angle mapped to the pulse extremes
    int min_pulse_us = 1000;
    int center_pulse_us = 1500;
    int max_pulse_us = 2000;
    double frame_period_ms = 20.0;

    void validate() const
    {
        if (!(range_deg > 0.0) || !(min_pulse_us < center_pulse_us && center_pulse_us < max_pulse_us) ||
            !(frame_period_ms > 0.0)) {
            throw InvalidInput("invalid PWM calibration");
        }
    }
};

struct PwmCommand {
    int pan_pulse_us = 1500;
    int tilt_pulse_us = 1500;
    double frame_period_ms = 20.0;
    /// Set when a requested angle lay outside the calibrated range.
    bool saturated = false;

    friend bool operator==(const PwmCommand&, const PwmCommand&) = default;
};

[[nodiscard]] inline int angle_to_pulse(double angle_deg, const PwmCalibration& cal, bool& saturated)
{
    const double clamped = std::clamp(angle_deg, -cal.range_deg, cal.range_deg);
    saturated = saturated || clamped != angle_deg;
    const double half_span = clamped >= 0.0 ? cal.max_pulse_us - cal.center_pulse_us
                                            : cal.center_pulse_us - cal.min_pulse_us;
    return static_cast<int>(std::lround(cal.center_pulse_us + half_span * clamped / cal.range_deg));
}

[[nodiscard]] inline double pulse_to_angle(int pulse_us, const PwmCalibration& cal)
{
    const int p = std::clamp(pulse_us, cal.min_pulse_us, cal.max_pulse_us);
    const double half_span = p >= cal.center_pulse_us ? cal.max_pulse_us - cal.center_pulse_us
                                                      : cal.center_pulse_us - cal.min_pulse_us;
    return (p - cal.center_pulse_us) * cal.range_deg / half_span;
}

[[nodiscard]] inline PwmCommand angles_to_pwm(PanTilt angles, const PwmCalibration& cal = {})
{
    PwmCommand cmd;
    cmd.frame_period_ms = cal.frame_period_ms;
    cmd.pan_pulse_us = angle_to_pulse(angles.pan_deg, cal, cmd.saturated);
    cmd.tilt_pulse_us = angle_to_pulse(angles.tilt_deg, cal, cmd.saturated);
    return cmd;
}

[[nodiscard]] inline PanTilt pwm_to_angles(const PwmCommand& cmd, const PwmCalibration& cal = {})
{
    return {pulse_to_angle(cmd.pan_pulse_us, cal), pulse_to_angle(cmd.tilt_pulse_us, cal)};
}

// ---------------------------------------------------------------------------
// Servo dynamics

/// First-order lag with a slew-rate limit; both axes share the model.
struct ServoModel {
    double time_constant_s = 0.030;
    double max_rate_deg_s = 500.0;
    double limit_deg = 60.0;
    double command_rate_hz = 50.0;

    void validate() const
    {
        if (!(time_constant_s >= 0.0) || !(max_rate_deg_s > 0.0) || !(limit_deg > 0.0) ||
            !(command_rate_hz > 0.0)) {
            throw InvalidInput("invalid servo model");
        }
    }
};

struct GimbalState {
    double pan_deg = 0.0;
    double tilt_deg = 0.0;
    double pan_cmd_deg = 0.0;
    double tilt_cmd_deg = 0.0;

    friend bool operator==(const GimbalState&, const GimbalState&) = default;
};

/**
 * Exact solution of d(angle)/dt = clamp((target - angle) / tau, -rate, rate)
 * over `dt` seconds: a constant-rate slew while the error exceeds rate * tau,
 * exponential decay afterwards.
 */
[[nodiscard]] inline double advance_axis(double angle, double target, double dt, const ServoModel& m)
{
    const double error = angle - target;
    double e = std::abs(error);
    const double sign = error < 0.0 ? -1.0 : 1.0;
    double remaining = dt;
    const double knee = m.max_rate_deg_s * m.time_constant_s;
    if (e > knee) {
        const double slew_time = (e - knee) / m.max_rate_deg_s;
        if (remaining <= slew_time) {
            e -= m.max_rate_deg_s * remaining;
            remaining = 0.0;
        } else {
            e = knee;
            remaining -= slew_time;
        }
    }
    if (remaining > 0.0) {
        e = m.time_constant_s > 0.0 ? e * std::exp(-remaining / m.time_constant_s)
                                    : std::max(0.0, e - m.max_rate_deg_s * remaining);
    }
    return target + sign * e;
}

[[nodiscard]] inline GimbalState step_servo(const GimbalState& state, const PwmCommand& cmd, double dt,
                                            const ServoModel& model = {}, const PwmCalibration& cal = {})
{
    if (!(dt > 0.0)) {
        throw InvalidInput("step_servo: dt must be positive");
    }
    const PanTilt target = pwm_to_angles(cmd, cal);
    GimbalState next;
    next.pan_cmd_deg = std::clamp(target.pan_deg, -model.limit_deg, model.limit_deg);
    next.tilt_cmd_deg = std::clamp(target.tilt_deg, -model.limit_deg, model.limit_deg);
    next.pan_deg = std::clamp(advance_axis(state.pan_deg, next.pan_cmd_deg, dt, model), -model.limit_deg,
                              model.limit_deg);
    next.tilt_deg = std::clamp(advance_axis(state.tilt_deg, next.tilt_cmd_deg, dt, model), -model.limit_deg,
                               model.limit_deg);
    return next;
}

// ---------------------------------------------------------------------------
// Trajectory log

struct PwmLogRow {
    double t_s = 0.0;
    int pan_pulse_us = 0;
    int tilt_pulse_us = 0;
    double pan_deg = 0.0;
    double tilt_deg = 0.0;
};

inline constexpr const char* kPwmLogHeader = "t_s,pan_pulse_us,tilt_pulse_us,pan_deg,tilt_deg";

inline void write_pwm_log(std::ostream& os, const std::vector<PwmLogRow>& rows)
{
    os << kPwmLogHeader << '\n';
    os << std::fixed << std::setprecision(6);
    for (const PwmLogRow& r : rows) {
        os << r.t_s << ',' << r.pan_pulse_us << ',' << r.tilt_pulse_us << ',' << r.pan_deg << ',' << r.tilt_deg
           << '\n';
    }
}

}  // namespace eagle_eye
