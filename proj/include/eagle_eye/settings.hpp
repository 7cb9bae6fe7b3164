#pragma once

/**
 * @file settings.hpp
 * @brief Typed binding between KeyValueConfig documents and the run/scene settings.
 *
 * Every section and key is enumerated here; anything else in a document is
 * rejected so that typos fail loudly.
 */

#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/config.hpp"
#include "eagle_eye/gimbal.hpp"
#include "eagle_eye/localizer.hpp"
#include "eagle_eye/saliency.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eagle_eye {

namespace detail {

class SectionReader {
public:
    SectionReader(const ConfigSection* section, std::string origin)
        : section_(section), origin_(std::move(origin)),
          used_(section != nullptr ? section->entries.size() : 0, false)
    {
    }

    template <typename Apply>
    void read(const std::string& key, Apply&& apply)
    {
        if (section_ == nullptr) {
            return;
        }
        for (std::size_t i = 0; i < section_->entries.size(); ++i) {
            const ConfigEntry& e = section_->entries[i];
            if (e.key == key) {
                used_[i] = true;
                apply(e.value, where(e));
            }
        }
    }

    void real(const std::string& key, double& out)
    {
        read(key, [&](const std::string& v, const std::string& w) { out = config_value::to_double(v, w); });
    }
    void integer(const std::string& key, int& out)
    {
        read(key, [&](const std::string& v, const std::string& w) {
            const auto n = config_value::to_int(v, w);
            if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
                throw ConfigError(w + ": integer out of range");
            }
            out = static_cast<int>(n);
        });
    }
    void boolean(const std::string& key, bool& out)
    {
        read(key, [&](const std::string& v, const std::string& w) { out = config_value::to_bool(v, w); });
    }

    /// Throws on the first key that no read() call claimed.
    void finish() const
    {
        if (section_ == nullptr) {
            return;
        }
        for (std::size_t i = 0; i < used_.size(); ++i) {
            if (!used_[i]) {
                throw ConfigError(where(section_->entries[i]) + ": unknown key `" + section_->entries[i].key + "`");
            }
        }
    }

private:
    [[nodiscard]] std::string where(const ConfigEntry& e) const
    {
        return origin_ + ":" + std::to_string(e.line) + " [" + section_->name + "] " + e.key;
    }

    const ConfigSection* section_;
    std::string origin_;
    std::vector<bool> used_;
};

inline void reject_unknown_sections(const KeyValueConfig& doc, const std::set<std::string>& known,
                                    const std::string& origin, const std::string& prefix_allowed = {})
{
    for (const ConfigSection& s : doc.sections()) {
        if (s.name.empty() && s.entries.empty()) {
            continue;
        }
        if (known.count(s.name) != 0) {
            continue;
        }
        if (!prefix_allowed.empty() && s.name.rfind(prefix_allowed, 0) == 0) {
            continue;
        }
        throw ConfigError(origin + ":" + std::to_string(s.line) + ": unknown section [" + s.name + "]");
    }
}

inline std::array<double, 2> pair_of(const std::string& v, const std::string& what)
{
    const auto list = config_value::to_list(v, what);
    if (list.size() != 2) {
        throw ConfigError(what + ": expected two comma-separated numbers");
    }
    return {list[0], list[1]};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    PipelineConfig pipeline;
    CameraGeometry camera;
    ServoModel servo;
    PwmCalibration pwm;
    ControlConfig control;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> scene;

    [[nodiscard]] LoopSetup loop_setup() const { return {camera, pipeline, control, servo, pwm}; }

    void validate() const
    {
        pipeline.validate();
        camera.validate();
        servo.validate();
        pwm.validate();
        control.validate();
        if (scene && !std::filesystem::exists(*scene)) {
            throw ConfigError("scene file does not exist: " + scene->string());
        }
    }
};

inline void read_pipeline(detail::SectionReader& r, PipelineConfig& p)
{
    r.integer("fusion_scale", p.fusion_scale);
    r.real("hue_decouple_threshold", p.hue_decouple_threshold);
    r.read("downsample_taps", [&](const std::string& v, const std::string& w) {
        p.downsample_taps = config_value::to_list(v, w);
    });
    r.integer("gabor_kernel_size", p.gabor.kernel_size);
    r.real("gabor_wavelength_px", p.gabor.wavelength_px);
    r.real("gabor_sigma_px", p.gabor.envelope_sigma_px);
    r.real("gabor_phase_deg", p.gabor.phase_deg);
    r.real("gabor_aspect", p.gabor.aspect);
}

/// Parses a run configuration; values not mentioned keep their defaults.
[[nodiscard]] inline RunConfig run_config_from(const KeyValueConfig& doc, const std::string& origin = "<config>")
{
    using detail::SectionReader;
    detail::reject_unknown_sections(doc, {"", "pipeline", "camera", "servo", "pwm", "control", "localizer", "run"},
                                    origin);
    RunConfig cfg;

    SectionReader top(doc.find_section(""), origin);
    top.finish();

    SectionReader pipe(doc.find_section("pipeline"), origin);
    read_pipeline(pipe, cfg.pipeline);
    pipe.finish();

    SectionReader cam(doc.find_section("camera"), origin);
    cam.real("short_focal_mm", cfg.camera.short_focal_mm);
    cam.real("long_focal_mm", cfg.camera.long_focal_mm);
    cam.real("short_hfov_deg", cfg.camera.short_hfov_deg);
    cam.real("long_hfov_deg", cfg.camera.long_hfov_deg);
    cam.read("short_vfov_deg", [&](const std::string& v, const std::string& w) {
        cfg.camera.short_vfov_override_deg = config_value::to_double(v, w);
    });
    cam.read("long_vfov_deg", [&](const std::string& v, const std::string& w) {
        cfg.camera.long_vfov_override_deg = config_value::to_double(v, w);
    });
    cam.integer("short_width", cfg.camera.short_resolution.width);
    cam.integer("short_height", cfg.camera.short_resolution.height);
    cam.integer("long_width", cfg.camera.long_resolution.width);
    cam.integer("long_height", cfg.camera.long_resolution.height);
    cam.read("vertical_offset_mm", [&](const std::string& v, const std::string& w) {
        cfg.camera.vertical_offset_m = config_value::to_double(v, w) / 1000.0;
    });
    cam.finish();

    SectionReader servo(doc.find_section("servo"), origin);
    servo.real("time_constant_s", cfg.servo.time_constant_s);
    servo.real("max_rate_deg_s", cfg.servo.max_rate_deg_s);
    servo.real("limit_deg", cfg.servo.limit_deg);
    servo.real("command_rate_hz", cfg.servo.command_rate_hz);
    servo.finish();

    SectionReader pwm(doc.find_section("pwm"), origin);
    pwm.real("range_deg", cfg.pwm.range_deg);
    pwm.integer("min_pulse_us", cfg.pwm.min_pulse_us);
    pwm.integer("center_pulse_us", cfg.pwm.center_pulse_us);
    pwm.integer("max_pulse_us", cfg.pwm.max_pulse_us);
    pwm.real("frame_period_ms", cfg.pwm.frame_period_ms);
    pwm.finish();

    SectionReader ctl(doc.find_section("control"), origin);
    ctl.boolean("parallax_correction", cfg.control.parallax_correction);
    ctl.real("assumed_range_m", cfg.control.assumed_range_m);
    ctl.real("settle_tolerance_deg", cfg.control.settle_tolerance_deg);
    ctl.real("max_settle_s", cfg.control.max_settle_s);
    ctl.real("detection_floor", cfg.control.detection_floor);
    ctl.integer("max_steps", cfg.control.max_steps);
    ctl.finish();

    SectionReader loc(doc.find_section("localizer"), origin);
    loc.real("blur_sigma_px", cfg.control.region.blur_sigma);
    loc.real("threshold_frac", cfg.control.region.threshold_frac);
    loc.finish();

    SectionReader run(doc.find_section("run"), origin);
    run.read("seed", [&](const std::string& v, const std::string& w) { cfg.seed = config_value::to_uint(v, w); });
    run.integer("threads", cfg.pipeline.threads);
    run.read("scene", [&](const std::string& v, const std::string&) { cfg.scene = std::filesystem::path(v); });
    run.finish();

    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

[[nodiscard]] inline RunConfig load_run_config(const std::filesystem::path& path)
{
    return run_config_from(KeyValueConfig::load(path), path.string());
}

inline void write_pipeline(KeyValueConfig& doc, const PipelineConfig& p)
{
    using config_value::format;
    doc.set("pipeline", "fusion_scale", std::to_string(p.fusion_scale));
    doc.set("pipeline", "hue_decouple_threshold", format(p.hue_decouple_threshold));
    doc.set("pipeline", "downsample_taps", format(p.downsample_taps));
    doc.set("pipeline", "gabor_kernel_size", std::to_string(p.gabor.kernel_size));
    doc.set("pipeline", "gabor_wavelength_px", format(p.gabor.wavelength_px));
    doc.set("pipeline", "gabor_sigma_px", format(p.gabor.envelope_sigma_px));
    doc.set("pipeline", "gabor_phase_deg", format(p.gabor.phase_deg));
    doc.set("pipeline", "gabor_aspect", format(p.gabor.aspect));
}

[[nodiscard]] inline PipelineConfig pipeline_config_from(const KeyValueConfig& doc,
                                                         const std::string& origin = "<config>")
{
    detail::reject_unknown_sections(doc, {"", "pipeline"}, origin);
    detail::SectionReader top(doc.find_section(""), origin);
    top.finish();
    PipelineConfig p;
    detail::SectionReader r(doc.find_section("pipeline"), origin);
    read_pipeline(r, p);
    r.finish();
    try {
        p.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return p;
}

[[nodiscard]] inline KeyValueConfig to_key_values(const RunConfig& cfg)
{
    using config_value::format;
    KeyValueConfig doc;
    write_pipeline(doc, cfg.pipeline);
    doc.set("camera", "short_focal_mm", format(cfg.camera.short_focal_mm));
    doc.set("camera", "long_focal_mm", format(cfg.camera.long_focal_mm));
    doc.set("camera", "short_hfov_deg", format(cfg.camera.short_hfov_deg));
    doc.set("camera", "long_hfov_deg", format(cfg.camera.long_hfov_deg));
    if (cfg.camera.short_vfov_override_deg) {
        doc.set("camera", "short_vfov_deg", format(*cfg.camera.short_vfov_override_deg));
    }
    if (cfg.camera.long_vfov_override_deg) {
        doc.set("camera", "long_vfov_deg", format(*cfg.camera.long_vfov_override_deg));
    }
    doc.set("camera", "short_width", std::to_string(cfg.camera.short_resolution.width));
    doc.set("camera", "short_height", std::to_string(cfg.camera.short_resolution.height));
    doc.set("camera", "long_width", std::to_string(cfg.camera.long_resolution.width));
    doc.set("camera", "long_height", std::to_string(cfg.camera.long_resolution.height));
    doc.set("camera", "vertical_offset_mm", format(cfg.camera.vertical_offset_m * 1000.0));
    doc.set("servo", "time_constant_s", format(cfg.servo.time_constant_s));
    doc.set("servo", "max_rate_deg_s", format(cfg.servo.max_rate_deg_s));
    doc.set("servo", "limit_deg", format(cfg.servo.limit_deg));
    doc.set("servo", "command_rate_hz", format(cfg.servo.command_rate_hz));
    doc.set("pwm", "range_deg", format(cfg.pwm.range_deg));
    doc.set("pwm", "min_pulse_us", std::to_string(cfg.pwm.min_pulse_us));
    doc.set("pwm", "center_pulse_us", std::to_string(cfg.pwm.center_pulse_us));
    doc.set("pwm", "max_pulse_us", std::to_string(cfg.pwm.max_pulse_us));
    doc.set("pwm", "frame_period_ms", format(cfg.pwm.frame_period_ms));
    doc.set("control", "parallax_correction", cfg.control.parallax_correction ? "true" : "false");
    doc.set("control", "assumed_range_m", format(cfg.control.assumed_range_m));
    doc.set("control", "settle_tolerance_deg", format(cfg.control.settle_tolerance_deg));
    doc.set("control", "max_settle_s", format(cfg.control.max_settle_s));
    doc.set("control", "detection_floor", format(cfg.control.detection_floor));
    doc.set("control", "max_steps", std::to_string(cfg.control.max_steps));
    doc.set("localizer", "blur_sigma_px", format(cfg.control.region.blur_sigma));
    doc.set("localizer", "threshold_frac", format(cfg.control.region.threshold_frac));
    if (cfg.seed) {
        doc.set("run", "seed", std::to_string(*cfg.seed));
    }
    doc.set("run", "threads", std::to_string(cfg.pipeline.threads));
    if (cfg.scene) {
        doc.set("run", "scene", cfg.scene->string());
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Scene files

struct TargetSpec {
    std::string name;
    Target target;
    /// When set, the target center is placed under this wide-view cell.
    std::optional<RegionIndex> cell;
};

struct SceneFile {
    SimScene scene;  // targets are filled in by resolve()
    std::vector<TargetSpec> targets;
    /// Run the loop once per 6x6 cell with the first target moved to each cell center.
    bool sweep = false;

    [[nodiscard]] SimScene resolve(const CameraGeometry& geom) const
    {
        SimScene out = scene;
        out.targets.clear();
        for (const TargetSpec& t : targets) {
            out.targets.push_back(t.target);
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (targets[i].cell) {
                out = place_target_at_cell(std::move(out), i, *targets[i].cell, geom);
            }
        }
        return out;
    }
};

[[nodiscard]] inline SceneFile scene_file_from(const KeyValueConfig& doc, const std::string& origin = "<scene>")
{
    using detail::SectionReader;
    detail::reject_unknown_sections(doc, {"", "scene"}, origin, "target.");
    SceneFile sf;

    SectionReader top(doc.find_section(""), origin);
    top.finish();

    SectionReader s(doc.find_section("scene"), origin);
    s.real("plane_distance_m", sf.scene.plane_distance_m);
    s.read("seed", [&](const std::string& v, const std::string& w) { sf.scene.seed = config_value::to_uint(v, w); });
    s.read("background", [&](const std::string& v, const std::string& w) {
        if (v == "constant") {
            sf.scene.background.kind = BackgroundKind::constant;
        } else if (v == "gradient") {
            sf.scene.background.kind = BackgroundKind::gradient;
        } else if (v == "noise") {
            sf.scene.background.kind = BackgroundKind::noise;
        } else {
            throw ConfigError(w + ": expected constant, gradient or noise");
        }
    });
    s.real("background_level", sf.scene.background.level);
    s.real("noise_amplitude", sf.scene.background.amplitude);
    s.real("noise_cell_m", sf.scene.background.noise_cell_m);
    s.real("gradient_per_m", sf.scene.background.gradient_per_m);
    s.boolean("sweep", sf.sweep);
    s.finish();

    for (const ConfigSection& sec : doc.sections()) {
        if (sec.name.rfind("target.", 0) != 0) {
            continue;
        }
        TargetSpec spec;
        spec.name = sec.name.substr(7);
        SectionReader t(&sec, origin);
        bool has_center = false;
        t.read("shape", [&](const std::string& v, const std::string& w) {
            if (v == "rect") {
                spec.target.shape = TargetShape::rect;
            } else if (v == "ellipse") {
                spec.target.shape = TargetShape::ellipse;
            } else {
                throw ConfigError(w + ": expected rect or ellipse");
            }
        });
        t.read("size_m", [&](const std::string& v, const std::string& w) {
            const auto p = detail::pair_of(v, w);
            spec.target.width_m = p[0];
            spec.target.height_m = p[1];
        });
        t.read("center_m", [&](const std::string& v, const std::string& w) {
            const auto p = detail::pair_of(v, w);
            spec.target.x_m = p[0];
            spec.target.y_m = p[1];
            has_center = true;
        });
        t.read("cell", [&](const std::string& v, const std::string& w) {
            const auto p = detail::pair_of(v, w);
            const RegionIndex cell{static_cast<int>(p[0]), static_cast<int>(p[1])};
            if (p[0] != cell.col || p[1] != cell.row || !FovPartition::valid(cell)) {
                throw ConfigError(w + ": cell must be two integers in [0, 5]");
            }
            spec.cell = cell;
        });
        t.read("color", [&](const std::string& v, const std::string& w) {
            const auto c = config_value::to_list(v, w);
            if (c.size() != 3) {
                throw ConfigError(w + ": expected r, g, b");
            }
            spec.target.rgb = {c[0], c[1], c[2]};
        });
        t.finish();
        if (has_center && spec.cell) {
            throw ConfigError(origin + ": [" + sec.name + "] sets both center_m and cell");
        }
        sf.targets.push_back(spec);
    }
    if (sf.sweep && sf.targets.empty()) {
        throw ConfigError(origin + ": sweep needs at least one target");
    }
    SimScene check = sf.scene;
    for (const TargetSpec& t : sf.targets) {
        check.targets.push_back(t.target);
    }
    try {
        check.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return sf;
}

[[nodiscard]] inline SceneFile load_scene_file(const std::filesystem::path& path)
{
    return scene_file_from(KeyValueConfig::load(path), path.string());
}

}  // namespace eagle_eye
