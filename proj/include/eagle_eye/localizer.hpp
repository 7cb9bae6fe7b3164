#pragma once

/**
 * @file localizer.hpp
 * @brief Salient point and salient region extraction from a saliency map.
 *
 * The map is first exported to 8-bit gray at the input resolution. The
 * brightest pixel is the salient point; a Gaussian-blurred copy of the gray
 * map is then thresholded relative to the blurred value at that point and
 * flood-filled (4-connected) into the salient region.
 */

#include "eagle_eye/image.hpp"
#include "eagle_eye/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <utility>
#include <vector>

namespace eagle_eye {

struct SalientPoint {
    int x = 0;
    int y = 0;
    int gray = 0;

    friend bool operator==(const SalientPoint&, const SalientPoint&) = default;
};

struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;  // inclusive
    int y1 = 0;  // inclusive

    [[nodiscard]] bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SalientRegion {
    GrayImage mask;  // 1 inside the region, 0 elsewhere
    BoundingBox bbox;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double area_fraction = 0.0;

    friend bool operator==(const SalientRegion&, const SalientRegion&) = default;
};

struct RegionParams {
    /// Gaussian sigma in pixels; non-positive selects 1% of the map width.
    double blur_sigma = 0.0;
    double threshold_frac = 0.5;
};

struct Detection {
    GrayImage gray;
    SalientPoint point;
    SalientRegion region;
};

/**
 * Upsamples S (sampled on pyramid level `level`) to `full_dims` and maps
 * min -> 0, max -> 255 with round-half-up. A constant map exports as zeros.
 */
[[nodiscard]] inline GrayImage export_gray(const ImageBuffer& saliency, Dims full_dims, int level)
{
    if (saliency.empty() || full_dims.empty()) {
        throw InvalidInput("export_gray: empty map or target size");
    }
    const ImageBuffer up = resample_between_levels(saliency, level, 0, full_dims);
    const auto [lo_it, hi_it] = std::minmax_element(up.begin(), up.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    GrayImage out(full_dims, 0);
    if (!(range > 0.0)) {
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = (up.data()[i] - lo) / range * 255.0;
        out.data()[i] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
    return out;
}

/// Brightest pixel; ties go to the first pixel in row-major order.
[[nodiscard]] inline SalientPoint find_salient_point(const GrayImage& gray)
{
    if (gray.empty()) {
        throw InvalidInput("find_salient_point: empty map");
    }
    const auto it = std::max_element(gray.begin(), gray.end());
    const auto idx = static_cast<int>(it - gray.begin());
    return {idx % gray.width(), idx / gray.width(), static_cast<int>(*it)};
}

/// Separable Gaussian blur truncated at 3 sigma, clamp-to-edge.
[[nodiscard]] inline ImageBuffer gaussian_blur(const ImageBuffer& in, double sigma)
{
    if (!(sigma > 0.0)) {
        throw InvalidInput("gaussian_blur: sigma must be positive");
    }
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double t = std::exp(-(i * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = t;
        sum += t;
    }
    for (double& t : taps) {
        t /= sum;
    }
    ImageBuffer tmp(in.dims());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += taps[static_cast<std::size_t>(i + radius)] * in.clamped(x + i, y);
            }
            tmp(x, y) = acc;
        }
    }
    ImageBuffer out(in.dims());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j) {
                acc += taps[static_cast<std::size_t>(j + radius)] * tmp.clamped(x, y + j);
            }
            out(x, y) = acc;
        }
    }
    return out;
}

[[nodiscard]] inline SalientRegion extract_salient_region(const GrayImage& gray, SalientPoint point,
                                                          const RegionParams& params = {})
{
    if (gray.empty() || !gray.contains(point.x, point.y)) {
        throw InvalidInput("extract_salient_region: point outside the map");
    }
    if (!(params.threshold_frac > 0.0 && params.threshold_frac < 1.0)) {
        throw InvalidInput("extract_salient_region: threshold_frac must be in (0, 1)");
    }
    const double sigma = params.blur_sigma > 0.0 ? params.blur_sigma : 0.01 * gray.width();

    ImageBuffer levels(gray.dims());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        levels.data()[i] = gray.data()[i];
    }
    const ImageBuffer blurred = gaussian_blur(levels, sigma);
    const double threshold = params.threshold_frac * blurred(point.x, point.y);

    SalientRegion region;
    region.mask = GrayImage(gray.dims(), 0);
    region.bbox = {point.x, point.y, point.x, point.y};
    std::queue<std::pair<int, int>> frontier;
    frontier.emplace(point.x, point.y);
    region.mask(point.x, point.y) = 1;
    double wsum = 0.0, wx = 0.0, wy = 0.0, ux = 0.0, uy = 0.0;
    std::size_t count = 0;
    constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    while (!frontier.empty()) {
        const auto [x, y] = frontier.front();
        frontier.pop();
        const double w = blurred(x, y);
        wsum += w;
        wx += w * x;
        wy += w * y;
        ux += x;
        uy += y;
        ++count;
        region.bbox.x0 = std::min(region.bbox.x0, x);
        region.bbox.y0 = std::min(region.bbox.y0, y);
        region.bbox.x1 = std::max(region.bbox.x1, x);
        region.bbox.y1 = std::max(region.bbox.y1, y);
        for (const auto& step : kSteps) {
            const int nx = x + step[0];
            const int ny = y + step[1];
            if (gray.contains(nx, ny) && region.mask(nx, ny) == 0 && blurred(nx, ny) >= threshold) {
                region.mask(nx, ny) = 1;
                frontier.emplace(nx, ny);
            }
        }
    }
    if (wsum > 0.0) {
        region.centroid_x = wx / wsum;
        region.centroid_y = wy / wsum;
    } else {
        region.centroid_x = ux / static_cast<double>(count);
        region.centroid_y = uy / static_cast<double>(count);
    }
    region.area_fraction = static_cast<double>(count) / static_cast<double>(gray.size());
    return region;
}

/// export_gray -> find_salient_point -> extract_salient_region.
[[nodiscard]] inline Detection localize(const SaliencyResult& result, const RegionParams& params = {})
{
    Detection d;
    d.gray = export_gray(result.saliency, result.input_dims, result.level);
    d.point = find_salient_point(d.gray);
    d.region = extract_salient_region(d.gray, d.point, params);
    return d;
}

}  // namespace eagle_eye
