#pragma once

// Seeded inputs shared by the unit tests, the acceptance binary and selftest.

#include "eagle_eye/camera_sim.hpp"
#include "eagle_eye/image.hpp"
#include "eagle_eye/localizer.hpp"

#include <cstdint>

namespace eagle_eye::testkit {

/// Uniform [0, 1) from a splitmix64 stream; identical on every platform.
class UnitStream {
public:
    explicit UnitStream(std::uint64_t seed) : state_(seed) {}

    double next()
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return static_cast<double>(detail::splitmix64(state_) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

[[nodiscard]] inline RgbImage random_rgb(std::uint64_t seed, int width, int height)
{
    UnitStream u(seed);
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double r = u.next();
            const double g = u.next();
            const double b = u.next();
            img.set(x, y, r, g, b);
        }
    }
    return img;
}

[[nodiscard]] inline RgbImage random_gray(std::uint64_t seed, int width, int height)
{
    UnitStream u(seed);
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double v = u.next();
            img.set(x, y, v, v, v);
        }
    }
    return img;
}

struct BarArray {
    RgbImage image;
    BoundingBox odd_bar;  // inclusive pixel box of the vertical bar
};

/**
 * 640x480 black image with a 5x5 grid of white bars, one per 128x96 cell.
 * Every bar is horizontal except the one in cell (odd_col, odd_row).
 */
[[nodiscard]] inline BarArray bar_array(int odd_col, int odd_row, int length = 64, int thickness = 16)
{
    BarArray out{RgbImage(640, 480), {}};
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 5; ++c) {
            const bool odd = c == odd_col && r == odd_row;
            const int w = odd ? thickness : length;
            const int h = odd ? length : thickness;
            const int x0 = 64 + 128 * c - w / 2;
            const int y0 = 48 + 96 * r - h / 2;
            for (int y = y0; y < y0 + h; ++y) {
                for (int x = x0; x < x0 + w; ++x) {
                    out.image.set(x, y, 1.0, 1.0, 1.0);
                }
            }
            if (odd) {
                out.odd_bar = {x0, y0, x0 + w - 1, y0 + h - 1};
            }
        }
    }
    return out;
}

/// Red 0.92 m square 6.65 m away under wide-view cell (4, 2), noise background.
[[nodiscard]] inline SimScene small_target_scene(const CameraGeometry& geom = {})
{
    SimScene scene;
    scene.plane_distance_m = 6.65;
    scene.seed = 7;
    Target t;
    t.width_m = 0.92;
    t.height_m = 0.92;
    scene.targets.push_back(t);
    return place_target_at_cell(std::move(scene), 0, {4, 2}, geom);
}

}  // namespace eagle_eye::testkit
