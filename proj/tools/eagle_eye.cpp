// eagle_eye: command-line front end.
//
//   eagle_eye saliency IMAGE --out DIR [--config PATH] [--threads N]
//   eagle_eye simulate [SCENE] --out DIR [--config PATH] [--seed N] [--threads N] [--frames]
//   eagle_eye selftest [--config PATH] [--threads N]
//
// Exit status: 0 ok, 1 usage or configuration error, 2 I/O error,
// 3 detection failure, 4 selftest failure.

#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/config.hpp"
#include "eagle_eye/localizer.hpp"
#include "eagle_eye/netpbm.hpp"
#include "eagle_eye/saliency.hpp"
#include "eagle_eye/selftest.hpp"
#include "eagle_eye/settings.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace eagle_eye;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kIo = 2, kDetection = 3, kSelftest = 4 };

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
};

RunConfig load_config(const CommonOptions& opts)
{
    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("EAGLE_EYE_CONFIG"); env != nullptr && *env != '\0') {
            path = env;
        }
    }
    RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
    if (opts.seed) {
        cfg.seed = opts.seed;
    }
    if (opts.threads) {
        cfg.pipeline.threads = *opts.threads;
    }
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

fs::path prepare_out_dir(const std::string& dir)
{
    const fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw IoError("cannot create output directory " + dir);
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) {
        throw IoError("cannot write " + path.string());
    }
}

// ---------------------------------------------------------------------------
// saliency

RgbImage overlay_region(RgbImage img, const SalientRegion& region)
{
    const BoundingBox& b = region.bbox;
    for (int x = b.x0; x <= b.x1; ++x) {
        img.set(x, b.y0, 0.0, 1.0, 0.0);
        img.set(x, b.y1, 0.0, 1.0, 0.0);
    }
    for (int y = b.y0; y <= b.y1; ++y) {
        img.set(b.x0, y, 0.0, 1.0, 0.0);
        img.set(b.x1, y, 0.0, 1.0, 0.0);
    }
    const int cx = static_cast<int>(std::lround(region.centroid_x));
    const int cy = static_cast<int>(std::lround(region.centroid_y));
    for (int d = -4; d <= 4; ++d) {
        if (img.r.contains(cx + d, cy)) {
            img.set(cx + d, cy, 1.0, 0.0, 0.0);
        }
        if (img.r.contains(cx, cy + d)) {
            img.set(cx, cy + d, 1.0, 0.0, 0.0);
        }
    }
    return img;
}

int cmd_saliency(const CommonOptions& opts, const std::string& input)
{
    const RunConfig cfg = load_config(opts);
    const RgbImage img = read_pnm(input);
    const fs::path out = prepare_out_dir(opts.out_dir);

    const SaliencyResult sal = compute_saliency(img, cfg.pipeline);
    const Detection det = localize(sal, cfg.control.region);

    write_pgm(out / "saliency.pgm", det.gray);
    write_text(out / "point.txt", "Coordinate: (" + std::to_string(det.point.x) + "," + std::to_string(det.point.y) +
                                      "), Gray value: " + std::to_string(det.point.gray) + "\n");
    write_ppm(out / "region_overlay.ppm", overlay_region(img, det.region));
    std::cout << "Coordinate: (" << det.point.x << "," << det.point.y << "), Gray value: " << det.point.gray << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate

std::string fixed(double v, int digits = 6)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

constexpr const char* kLoopReportHeader =
    "run,step,detected,point_x,point_y,gray,region_col,region_row,cmd_pan_deg,cmd_tilt_deg,pan_pulse_us,"
    "tilt_pulse_us,pan_deg,tilt_deg,short_fraction,long_fraction,offset_x_px,offset_y_px,centered";

void append_report_rows(std::ostream& os, int run, const LoopReport& report)
{
    for (const LoopStep& s : report.steps) {
        os << run << ',' << s.step << ',' << (s.detected ? 1 : 0) << ',' << s.point.x << ',' << s.point.y << ','
           << s.point.gray << ',' << s.region.col << ',' << s.region.row << ',' << fixed(s.commanded.pan_deg) << ','
           << fixed(s.commanded.tilt_deg) << ',' << s.pwm.pan_pulse_us << ',' << s.pwm.tilt_pulse_us << ','
           << fixed(s.state.pan_deg) << ',' << fixed(s.state.tilt_deg) << ',' << fixed(s.short_fraction, 8) << ','
           << fixed(s.long_fraction, 8) << ',' << (std::isnan(s.offset_x_px) ? "nan" : fixed(s.offset_x_px, 3))
           << ',' << (std::isnan(s.offset_y_px) ? "nan" : fixed(s.offset_y_px, 3)) << ',' << (s.centered ? 1 : 0)
           << '\n';
    }
}

void append_pwm_rows(std::ostream& os, int run, const LoopReport& report)
{
    std::ostringstream body;
    write_pwm_log(body, report.pwm_log);
    std::istringstream lines(body.str());
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        os << run << ',' << line << '\n';
    }
}

std::string describe_run(const std::string& label, const SimScene& scene, const LoopReport& report,
                         const CameraGeometry& geom)
{
    std::ostringstream os;
    os << label << ": ";
    if (report.steps.empty() || report.detection_failed) {
        os << "detection failed (no salient target above the noise floor), verdict FAIL\n";
        return os.str();
    }
    const LoopStep& last = report.steps.back();
    os << "steps " << report.steps.size() << ", short-view fraction " << fixed(100.0 * last.short_fraction, 3)
       << "%, long-view fraction " << fixed(100.0 * last.long_fraction, 3) << "%";
    if (!scene.targets.empty()) {
        const PinholeCamera cam = make_camera(Lens::long_focus, geom, {last.state.pan_deg, last.state.tilt_deg});
        if (const auto p = predicted_area_fraction(scene.targets.front(), cam, scene.plane_distance_m)) {
            os << " (predicted " << fixed(100.0 * *p, 3) << "%)";
        }
    }
    os << ", final offset (" << fixed(last.offset_x_px, 2) << ", " << fixed(last.offset_y_px, 2) << ") px, verdict "
       << (report.centered() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

int cmd_simulate(const CommonOptions& opts, std::string scene_path, bool frames)
{
    const RunConfig cfg = load_config(opts);
    if (scene_path.empty()) {
        if (!cfg.scene) {
            throw ConfigError("simulate: no scene file given on the command line or in [run] scene");
        }
        scene_path = cfg.scene->string();
    }
    if (!fs::exists(scene_path)) {
        throw IoError("scene file does not exist: " + scene_path);
    }
    const SceneFile sf = load_scene_file(scene_path);
    SimScene scene = sf.resolve(cfg.camera);
    if (cfg.seed) {
        scene.seed = *cfg.seed;
    }
    const fs::path out = prepare_out_dir(opts.out_dir);
    const LoopSetup setup = cfg.loop_setup();

    struct Run {
        std::string label;
        std::string prefix;
        SimScene scene;
        int max_steps;
        bool write_frames;
    };
    std::vector<Run> runs;
    if (sf.sweep) {
        for (int r = 0; r < FovPartition::kRows; ++r) {
            for (int c = 0; c < FovPartition::kCols; ++c) {
                const std::string id = "cell_" + std::to_string(c) + "_" + std::to_string(r);
                runs.push_back({"run " + std::to_string(runs.size()) + " " + id, id + "_",
                                place_target_at_cell(scene, 0, {c, r}, cfg.camera), 1, frames});
            }
        }
    } else {
        runs.push_back({"run 0", "", scene, cfg.control.max_steps, true});
    }

    std::ostringstream report_csv;
    std::ostringstream pwm_csv;
    std::ostringstream summary;
    report_csv << kLoopReportHeader << '\n';
    pwm_csv << "run," << kPwmLogHeader << '\n';
    summary << "scene: " << fs::path(scene_path).filename().string() << '\n';
    summary << "plane distance: " << fixed(scene.plane_distance_m, 3) << " m, seed " << scene.seed << '\n';
    summary << "runs: " << runs.size() << '\n';

    bool any_failed_detection = false;
    int passed = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Run& run = runs[i];
        FrameSink sink;
        if (run.write_frames) {
            sink = [&](const LoopStep& step, const StepFrames& f) {
                const std::string stem = run.prefix + "step" + std::to_string(step.step);
                write_ppm(out / (stem + "_wide.ppm"), f.wide.image);
                write_pgm(out / (stem + "_saliency.pgm"), f.saliency);
                if (step.detected) {
                    write_ppm(out / (stem + "_narrow.ppm"), f.narrow.image);
                }
            };
        }
        const LoopReport report = run_closed_loop(run.scene, setup, run.max_steps, sink);
        append_report_rows(report_csv, static_cast<int>(i), report);
        append_pwm_rows(pwm_csv, static_cast<int>(i), report);
        summary << describe_run(run.label, run.scene, report, cfg.camera);
        any_failed_detection = any_failed_detection || report.detection_failed;
        passed += report.centered() ? 1 : 0;
    }
    const bool all = passed == static_cast<int>(runs.size());
    summary << "centered: " << passed << "/" << runs.size() << '\n';
    summary << "verdict: " << (all ? "PASS" : "FAIL") << '\n';

    write_text(out / "loop_report.csv", report_csv.str());
    write_text(out / "pwm_log.csv", pwm_csv.str());
    write_text(out / "summary.txt", summary.str());
    std::cout << summary.str();
    if (any_failed_detection) {
        std::cerr << "eagle_eye: detection failed\n";
        return kDetection;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// selftest

int cmd_selftest(const CommonOptions& opts)
{
    const RunConfig cfg = load_config(opts);
    const bool ok = print_selftest(run_selftest(cfg.pipeline), std::cout);
    return ok ? kOk : kSelftest;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Saliency detection and dual-camera gimbal simulation"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions opts;
    app.add_option("--config", opts.config_path, "Configuration file (falls back to $EAGLE_EYE_CONFIG)");
    app.add_option("--seed", opts.seed, "Override the scene seed");
    app.add_option("--threads", opts.threads, "Worker threads for the pipeline and renderer")
        ->check(CLI::Range(1, 256));

    std::string input;
    auto* sal = app.add_subcommand("saliency", "Saliency map, salient point and region for one image");
    sal->add_option("image", input, "Input PPM/PGM image")->required();
    sal->add_option("--out", opts.out_dir, "Output directory")->required();

    std::string scene_path;
    bool frames = false;
    auto* sim = app.add_subcommand("simulate", "Closed-loop simulation of a scene file");
    sim->add_option("scene", scene_path, "Scene file (defaults to [run] scene)");
    sim->add_option("--out", opts.out_dir, "Output directory")->required();
    sim->add_flag("--frames", frames, "Also write frames for every run of a sweep");

    auto* self = app.add_subcommand("selftest", "Built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (sal->parsed()) {
            return cmd_saliency(opts, input);
        }
        if (sim->parsed()) {
            return cmd_simulate(opts, scene_path, frames);
        }
        if (self->parsed()) {
            return cmd_selftest(opts);
        }
    } catch (const ConfigError& e) {
        std::cerr << "eagle_eye: configuration error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "eagle_eye: I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const InvalidInput& e) {
        std::cerr << "eagle_eye: invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "eagle_eye: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
