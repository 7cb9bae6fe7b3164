#pragma once

// Quick built-in consistency checks run by `eagle_eye selftest`.
// Output contains no timings, so reruns print identical text.

#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/gimbal.hpp"
#include "eagle_eye/saliency.hpp"
#include "eagle_eye/testkit/fixtures.hpp"
#include "eagle_eye/testkit/naive_saliency.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace eagle_eye {

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

inline bool all_of_map(const ImageBuffer& m, const std::function<bool(double)>& pred)
{
    for (double v : m) {
        if (!pred(v)) {
            return false;
        }
    }
    return true;
}

inline std::size_t argmax_index(const ImageBuffer& m)
{
    return static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
}

}  // namespace detail

[[nodiscard]] inline std::vector<SelftestCheck> run_selftest(const PipelineConfig& cfg)
{
    cfg.validate();
    std::vector<SelftestCheck> checks;
    auto record = [&](std::string name, bool ok, std::string detail) {
        checks.push_back({std::move(name), ok, std::move(detail)});
    };

    {
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const RgbImage img = testkit::random_rgb(seed, 64, 64);
            worst = std::max(worst, testkit::relative_error(compute_saliency(img, cfg).saliency,
                                                            testkit::naive_saliency(img, cfg)));
        }
        record("oracle_equivalence", worst <= 1e-6, "max_rel_err=" + detail::sci(worst));
    }

    {
        bool ok = true;
        const Dims sizes[] = {{64, 64}, {97, 41}, {640, 480}, {3, 200}};
        std::uint64_t seed = 10;
        for (Dims d : sizes) {
            const ImageBuffer base = intensity_image(testkit::random_gray(seed++, d.width, d.height));
            const Pyramid p = build_gaussian_pyramid(base, cfg);
            Dims expect = d;
            for (int k = 0; k < kPyramidLevels; ++k) {
                ok = ok && p[k].dims() == expect && expect == pyramid_dims(d, k);
                expect = {std::max(1, (expect.width + 1) / 2), std::max(1, (expect.height + 1) / 2)};
            }
        }
        record("pyramid_dimension_law", ok, "sizes=4");
    }

    {
        bool ok = true;
        for (std::uint64_t seed = 20; seed < 23; ++seed) {
            const Pyramid p = build_gaussian_pyramid(intensity_image(testkit::random_rgb(seed, 48, 48)), cfg);
            for (int k = 0; k < kPyramidLevels; ++k) {
                ok = ok && detail::all_of_map(center_surround({k, p[k]}, {k, p[k]}), [](double v) { return v == 0.0; });
            }
        }
        record("center_surround_self_zero", ok, "inputs=3");
    }

    {
        bool nonneg = true;
        bool gray_zero = true;
        bool argmax = true;
        for (std::uint64_t seed = 30; seed < 33; ++seed) {
            const SaliencyResult r = compute_saliency(testkit::random_rgb(seed, 64, 48), cfg);
            for (const ImageBuffer* m :
                 {&r.saliency, &r.conspicuity.intensity, &r.conspicuity.color, &r.conspicuity.orientation}) {
                nonneg = nonneg && detail::all_of_map(*m, [](double v) { return v >= 0.0; });
            }
            const SaliencyResult g = compute_saliency(testkit::random_gray(seed, 64, 48), cfg);
            gray_zero = gray_zero && detail::all_of_map(g.conspicuity.color, [](double v) { return v == 0.0; });

            const ImageBuffer raw = intensity_image(testkit::random_rgb(seed, 40, 30));
            argmax = argmax && detail::argmax_index(normalize_map(raw)) == detail::argmax_index(raw);
        }
        record("non_negativity", nonneg, "inputs=3");
        record("grayscale_color_zero", gray_zero, "inputs=3");
        record("normalization_argmax", argmax, "inputs=3");
    }

    {
        const RgbImage img = testkit::random_rgb(40, 64, 64);
        const FeatureMapSet fm = compute_feature_maps(build_channel_pyramids(img, cfg), cfg);
        std::vector<LevelMap> maps;
        for (const FeatureMap& m : fm.orientation) {
            maps.push_back({m.center, m.map});
        }
        const ImageBuffer forward = across_scale_add(maps, cfg.fusion_scale, img.dims());
        std::reverse(maps.begin(), maps.end());
        const ImageBuffer backward = across_scale_add(maps, cfg.fusion_scale, img.dims());
        record("across_scale_permutation", forward == backward, "maps=" + std::to_string(maps.size()));
    }

    {
        // 2^k + 1 sides keep both borders on every decimated grid, so mirroring commutes with the pyramid.
        const RgbImage img = testkit::random_rgb(50, 257, 257);
        const ImageBuffer direct = mirror_horizontally(compute_saliency(img, cfg).saliency);
        const ImageBuffer mirrored = compute_saliency(mirror_horizontally(img), cfg).saliency;
        const double err = testkit::relative_error(mirrored, direct);
        record("reflection_equivariance", err <= 1e-6, "rel_err=" + detail::sci(err));
    }

    {
        const FovPartition part = partition_fov({64, 48});
        std::vector<int> hits(36, 0);
        for (int y = 0; y < 48; ++y) {
            for (int x = 0; x < 64; ++x) {
                const RegionIndex r = locate_region(x, y, part);
                const bool inside = x >= part.col_start(r.col) && x < part.col_end(r.col) &&
                                    y >= part.row_start(r.row) && y < part.row_end(r.row);
                hits[static_cast<std::size_t>(r.row * 6 + r.col)] += inside ? 1 : 1000000;
            }
        }
        bool ok = std::all_of(hits.begin(), hits.end(), [](int h) { return h > 0 && h < 1000000; });
        ok = ok && locate_region(522, 239, partition_fov({640, 480})) == RegionIndex{4, 2};
        record("partition_totality", ok, "dims=64x48");
    }

    {
        const PwmCalibration cal;
        double worst = 0.0;
        for (int i = -6000; i <= 6000; ++i) {
            const PanTilt a{i * 0.01, -i * 0.01};
            const PanTilt b = pwm_to_angles(angles_to_pwm(a, cal), cal);
            worst = std::max({worst, std::abs(a.pan_deg - b.pan_deg), std::abs(a.tilt_deg - b.tilt_deg)});
        }
        record("pwm_round_trip", worst <= 0.12, "max_err_deg=" + detail::sci(worst));
    }

    {
        const ServoModel model;
        const PwmCalibration cal;
        bool ok = true;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            testkit::UnitStream u(seed);
            GimbalState s;
            for (int k = 0; k < 50; ++k) {
                PwmCommand cmd;
                cmd.pan_pulse_us = 800 + static_cast<int>(u.next() * 1400.0);
                cmd.tilt_pulse_us = 800 + static_cast<int>(u.next() * 1400.0);
                s = step_servo(s, cmd, 0.001 + u.next() * 0.05, model, cal);
                ok = ok && std::abs(s.pan_deg) <= model.limit_deg && std::abs(s.tilt_deg) <= model.limit_deg;
            }
        }
        record("servo_limits", ok, "sequences=100");
    }
    return checks;
}

/// Prints one line per check; returns true when all passed.
inline bool print_selftest(const std::vector<SelftestCheck>& checks, std::ostream& os)
{
    bool all = true;
    for (const SelftestCheck& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << c.detail << '\n';
        all = all && c.passed;
    }
    os << (all ? "selftest: all checks passed" : "selftest: FAILED") << '\n';
    return all;
}

}  // namespace eagle_eye
