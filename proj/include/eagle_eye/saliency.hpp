#pragma once

/**
 * @file saliency.hpp
 * @brief Bottom-up saliency: pyramids, feature maps, N(.), fusion.
 *
 * Pipeline overview:
 *   intensity I = (r+g+b)/3 and hue-decoupled r', g', b'  ->  9-level Gaussian
 *   pyramids  ->  broadly tuned R, G, B, Y per level  ->  Gabor magnitude
 *   pyramids for four orientations  ->  42 center-surround feature maps
 *   (c in {2,3,4}, s = c + {3,4})  ->  normalization N(.)  ->  across-scale
 *   addition at the fusion level  ->  conspicuity maps  ->  S.
 *
 * Geometry: the decimation keeps even samples, so pixel i of level k sits on
 * pixel i * 2^k of level 0. All resampling between levels uses that mapping
 * with bilinear interpolation and clamp-to-edge.
 */

#include "eagle_eye/image.hpp"
#include "eagle_eye/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace eagle_eye {

inline constexpr int kPyramidLevels = 9;
inline constexpr std::array<int, 3> kCenterLevels{2, 3, 4};
inline constexpr std::array<int, 2> kSurroundDeltas{3, 4};
inline constexpr std::array<double, 4> kOrientationsDeg{0.0, 45.0, 90.0, 135.0};
/// Maps whose value range does not exceed this are treated as constant by N(.).
inline constexpr double kFlatRange = 1e-12;

struct GaborParams {
    int kernel_size = 9;
    double wavelength_px = 7.0;
    double envelope_sigma_px = 2.33;
    double phase_deg = 0.0;
    double aspect = 1.0;
};

struct PipelineConfig {
    int fusion_scale = 4;
    GaborParams gabor;
    double hue_decouple_threshold = 0.1;
    /// Unnormalized separable low-pass taps used before each decimation.
    std::vector<double> downsample_taps{1.0, 4.0, 6.0, 4.0, 1.0};
    /// Worker threads for the independent per-map stages; results do not depend on it.
    int threads = 1;

    void validate() const
    {
        if (fusion_scale < 2 || fusion_scale >= kPyramidLevels) {
            throw InvalidInput("fusion_scale must be in [2, 8], got " + std::to_string(fusion_scale));
        }
        if (!(hue_decouple_threshold > 0.0 && hue_decouple_threshold < 1.0)) {
            throw InvalidInput("hue_decouple_threshold must be in (0, 1)");
        }
        if (downsample_taps.empty() || downsample_taps.size() % 2 == 0) {
            throw InvalidInput("downsample_taps must have odd length");
        }
        double sum = 0.0;
        for (double t : downsample_taps) {
            if (!std::isfinite(t)) {
                throw InvalidInput("downsample_taps must be finite");
            }
            sum += t;
        }
        if (!(sum > 0.0)) {
            throw InvalidInput("downsample_taps must have a positive sum");
        }
        if (gabor.kernel_size < 1 || gabor.kernel_size % 2 == 0) {
            throw InvalidInput("gabor kernel_size must be a positive odd number");
        }
        if (!(gabor.wavelength_px > 0.0) || !(gabor.envelope_sigma_px > 0.0) || !(gabor.aspect > 0.0) ||
            !std::isfinite(gabor.phase_deg)) {
            throw InvalidInput("gabor wavelength, envelope sigma and aspect must be positive");
        }
        if (threads < 1) {
            throw InvalidInput("threads must be >= 1");
        }
    }
};

struct Pyramid {
    std::array<ImageBuffer, kPyramidLevels> levels;

    ImageBuffer& operator[](int k) { return levels[static_cast<std::size_t>(k)]; }
    const ImageBuffer& operator[](int k) const { return levels[static_cast<std::size_t>(k)]; }
};

/// A map together with the pyramid level whose sampling grid it lives on.
struct LevelMap {
    int level = 0;
    ImageBuffer map;
};

struct FeatureMap {
    int center = 0;
    int surround = 0;
    double theta_deg = 0.0;  // orientation maps only
    ImageBuffer map;
};

struct FeatureMapSet {
    std::vector<FeatureMap> intensity;    // 6
    std::vector<FeatureMap> red_green;    // 6
    std::vector<FeatureMap> blue_yellow;  // 6
    std::vector<FeatureMap> orientation;  // 24, grouped by theta then (c, s)

    [[nodiscard]] std::size_t color_count() const { return red_green.size() + blue_yellow.size(); }
};

struct HueChannels {
    ImageBuffer r, g, b;
};

struct ColorOpponents {
    ImageBuffer red, green, blue, yellow;
};

struct ChannelPyramids {
    Pyramid intensity;
    Pyramid red, green, blue, yellow;
    std::array<Pyramid, 4> orientation;  // indexed like kOrientationsDeg
};

struct ConspicuityMaps {
    int level = 4;
    ImageBuffer intensity;    // I-bar
    ImageBuffer color;        // C-bar
    ImageBuffer orientation;  // O-bar
};

struct SaliencyResult {
    Dims input_dims;
    int level = 4;
    ImageBuffer saliency;
    ConspicuityMaps conspicuity;
    /// Largest raw (pre-normalization) center-surround contrast over all 42 maps.
    double peak_feature_contrast = 0.0;
};

// ---------------------------------------------------------------------------
// Geometry helpers

[[nodiscard]] inline Dims pyramid_dims(Dims base, int level)
{
    Dims d = base;
    for (int k = 0; k < level; ++k) {
        d.width = std::max(1, (d.width + 1) / 2);
        d.height = std::max(1, (d.height + 1) / 2);
    }
    return d;
}

/**
 * Bilinear resampling of a map from one pyramid level's grid onto another's.
 * Destination pixel x reads source position x * 2^(dst_level - src_level),
 * clamped to the source extent.
 */
[[nodiscard]] inline ImageBuffer resample_between_levels(const ImageBuffer& src, int src_level, int dst_level,
                                                         Dims dst_dims)
{
    if (src.empty() || dst_dims.empty()) {
        throw InvalidInput("resample: empty source or destination");
    }
    if (src_level == dst_level && src.dims() == dst_dims) {
        return src;
    }
    const double scale = std::ldexp(1.0, dst_level - src_level);
    const int sw = src.width();
    const int sh = src.height();
    ImageBuffer out(dst_dims);
    for (int y = 0; y < dst_dims.height; ++y) {
        const double sy = std::clamp(y * scale, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(std::floor(sy));
        const int y1 = std::min(y0 + 1, sh - 1);
        const double fy = sy - y0;
        for (int x = 0; x < dst_dims.width; ++x) {
            const double sx = std::clamp(x * scale, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(std::floor(sx));
            const int x1 = std::min(x0 + 1, sw - 1);
            const double fx = sx - x0;
            const double top = (1.0 - fx) * src(x0, y0) + fx * src(x1, y0);
            const double bottom = (1.0 - fx) * src(x0, y1) + fx * src(x1, y1);
            out(x, y) = (1.0 - fy) * top + fy * bottom;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Early features

[[nodiscard]] inline ImageBuffer intensity_image(const RgbImage& img)
{
    validate(img);
    ImageBuffer out(img.dims());
    auto r = img.r.data();
    auto g = img.g.data();
    auto b = img.b.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = (r[i] + g[i] + b[i]) / 3.0;
    }
    return out;
}

/// Low-pass with the configured separable taps (clamp-to-edge), keeping even samples.
[[nodiscard]] inline ImageBuffer downsample(const ImageBuffer& in, std::span<const double> taps)
{
    double sum = 0.0;
    for (double t : taps) {
        sum += t;
    }
    const int radius = static_cast<int>(taps.size() / 2);
    const Dims od{std::max(1, (in.width() + 1) / 2), std::max(1, (in.height() + 1) / 2)};

    // Horizontal pass at even columns only.
    ImageBuffer horiz(od.width, in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < od.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += taps[static_cast<std::size_t>(i + radius)] * in.clamped(2 * x + i, y);
            }
            horiz(x, y) = acc / sum;
        }
    }
    ImageBuffer out(od);
    for (int y = 0; y < od.height; ++y) {
        for (int x = 0; x < od.width; ++x) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j) {
                acc += taps[static_cast<std::size_t>(j + radius)] * horiz.clamped(x, 2 * y + j);
            }
            out(x, y) = acc / sum;
        }
    }
    return out;
}

[[nodiscard]] inline Pyramid build_gaussian_pyramid(const ImageBuffer& buf, const PipelineConfig& cfg = {})
{
    validate(buf, "pyramid input");
    Pyramid pyr;
    pyr[0] = buf;
    for (int k = 1; k < kPyramidLevels; ++k) {
        pyr[k] = downsample(pyr[k - 1], cfg.downsample_taps);
    }
    return pyr;
}

/// r/I, g/I, b/I where I exceeds threshold * max(I); zero elsewhere.
[[nodiscard]] inline HueChannels hue_decoupled_channels(const RgbImage& img, const ImageBuffer& intensity,
                                                        const PipelineConfig& cfg = {})
{
    if (intensity.dims() != img.dims()) {
        throw InvalidInput("intensity map does not match the RGB image");
    }
    const double peak = *std::max_element(intensity.begin(), intensity.end());
    const double floor_value = cfg.hue_decouple_threshold * peak;
    HueChannels out{ImageBuffer(img.dims()), ImageBuffer(img.dims()), ImageBuffer(img.dims())};
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double i = intensity(x, y);
            if (i > floor_value) {
                out.r(x, y) = img.r(x, y) / i;
                out.g(x, y) = img.g(x, y) / i;
                out.b(x, y) = img.b(x, y) / i;
            }
        }
    }
    return out;
}

/// Broadly tuned R, G, B, Y, each clamped at zero from below.
[[nodiscard]] inline ColorOpponents broadly_tuned_colors(const ImageBuffer& r, const ImageBuffer& g,
                                                         const ImageBuffer& b)
{
    if (r.dims() != g.dims() || r.dims() != b.dims()) {
        throw InvalidInput("color channels differ in size");
    }
    const Dims d = r.dims();
    ColorOpponents out{ImageBuffer(d), ImageBuffer(d), ImageBuffer(d), ImageBuffer(d)};
    for (int y = 0; y < d.height; ++y) {
        for (int x = 0; x < d.width; ++x) {
            const double rv = r(x, y);
            const double gv = g(x, y);
            const double bv = b(x, y);
            out.red(x, y) = std::max(0.0, rv - (gv + bv) / 2.0);
            out.green(x, y) = std::max(0.0, gv - (rv + bv) / 2.0);
            out.blue(x, y) = std::max(0.0, bv - (rv + gv) / 2.0);
            out.yellow(x, y) = std::max(0.0, (rv + gv) / 2.0 - std::abs(rv - gv) / 2.0 - bv);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orientation

[[nodiscard]] inline bool is_supported_orientation(double theta_deg)
{
    return std::find(kOrientationsDeg.begin(), kOrientationsDeg.end(), theta_deg) != kOrientationsDeg.end();
}

/**
 * Zero-mean even Gabor kernel. theta is the orientation of the bars the
 * filter prefers: 0 deg = horizontal, 90 deg = vertical. kernel(i + r, j + r)
 * holds the tap for offset (i, j).
 */
[[nodiscard]] inline ImageBuffer gabor_kernel(double theta_deg, const GaborParams& p)
{
    if (!std::isfinite(theta_deg)) {
        throw InvalidInput("gabor orientation must be finite");
    }
    const int r = p.kernel_size / 2;
    const double theta = theta_deg * std::numbers::pi / 180.0;
    const double phase = p.phase_deg * std::numbers::pi / 180.0;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    ImageBuffer k(p.kernel_size, p.kernel_size);
    double mean = 0.0;
    for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
            // u runs across the bars, w along them (image y points down).
            const double u = i * st + j * ct;
            const double w = i * ct - j * st;
            const double envelope =
                std::exp(-(u * u + p.aspect * p.aspect * w * w) / (2.0 * p.envelope_sigma_px * p.envelope_sigma_px));
            const double v = envelope * std::cos(2.0 * std::numbers::pi * u / p.wavelength_px + phase);
            k(i + r, j + r) = v;
            mean += v;
        }
    }
    mean /= static_cast<double>(k.size());
    for (double& v : k) {
        v -= mean;
    }
    return k;
}

/// |buf * kernel| with clamp-to-edge borders.
[[nodiscard]] inline ImageBuffer gabor_magnitude(const ImageBuffer& buf, const ImageBuffer& kernel)
{
    const int r = kernel.width() / 2;
    ImageBuffer out(buf.dims());
    for (int y = 0; y < buf.height(); ++y) {
        for (int x = 0; x < buf.width(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                for (int i = -r; i <= r; ++i) {
                    acc += kernel(i + r, j + r) * buf.clamped(x - i, y - j);
                }
            }
            out(x, y) = std::abs(acc);
        }
    }
    return out;
}

[[nodiscard]] inline Pyramid build_gabor_pyramid(const Pyramid& intensity, double theta_deg,
                                                 const PipelineConfig& cfg = {})
{
    if (!is_supported_orientation(theta_deg)) {
        throw InvalidInput("unsupported Gabor orientation " + std::to_string(theta_deg));
    }
    const ImageBuffer kernel = gabor_kernel(theta_deg, cfg.gabor);
    Pyramid out;
    for (int k = 0; k < kPyramidLevels; ++k) {
        out[k] = gabor_magnitude(intensity[k], kernel);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Center-surround and feature maps

/// |center - surround upsampled to the center grid|.
[[nodiscard]] inline ImageBuffer center_surround(const LevelMap& center, const LevelMap& surround)
{
    if (center.map.empty() || surround.map.empty()) {
        throw InvalidInput("center_surround: empty map");
    }
    if (surround.level < center.level || surround.map.width() > center.map.width() ||
        surround.map.height() > center.map.height()) {
        throw InvalidInput("center_surround: surround must be at a coarser or equal scale than the center");
    }
    const ImageBuffer up = resample_between_levels(surround.map, surround.level, center.level, center.map.dims());
    ImageBuffer out(center.map.dims());
    auto c = center.map.data();
    auto s = up.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = std::abs(c[i] - s[i]);
    }
    return out;
}

[[nodiscard]] inline ImageBuffer difference(const ImageBuffer& a, const ImageBuffer& b)
{
    ImageBuffer out(a.dims());
    auto pa = a.data();
    auto pb = b.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = pa[i] - pb[i];
    }
    return out;
}

[[nodiscard]] inline ChannelPyramids build_channel_pyramids(const RgbImage& img, const PipelineConfig& cfg = {})
{
    cfg.validate();
    const ImageBuffer intensity = intensity_image(img);
    const HueChannels hue = hue_decoupled_channels(img, intensity, cfg);

    ChannelPyramids pyr;
    pyr.intensity = build_gaussian_pyramid(intensity, cfg);
    const Pyramid r = build_gaussian_pyramid(hue.r, cfg);
    const Pyramid g = build_gaussian_pyramid(hue.g, cfg);
    const Pyramid b = build_gaussian_pyramid(hue.b, cfg);
    for (int k = 0; k < kPyramidLevels; ++k) {
        ColorOpponents opp = broadly_tuned_colors(r[k], g[k], b[k]);
        pyr.red[k] = std::move(opp.red);
        pyr.green[k] = std::move(opp.green);
        pyr.blue[k] = std::move(opp.blue);
        pyr.yellow[k] = std::move(opp.yellow);
    }
    parallel_for(static_cast<int>(kOrientationsDeg.size()), cfg.threads, [&](int t) {
        pyr.orientation[static_cast<std::size_t>(t)] =
            build_gabor_pyramid(pyr.intensity, kOrientationsDeg[static_cast<std::size_t>(t)], cfg);
    });
    return pyr;
}

[[nodiscard]] inline FeatureMapSet compute_feature_maps(const ChannelPyramids& pyr, const PipelineConfig& cfg = {})
{
    struct Job {
        std::vector<FeatureMap>* dest;
        std::size_t slot;
        int c, s;
        int channel;  // 0 I, 1 RG, 2 BY, 3.. orientation index + 3
    };
    FeatureMapSet fm;
    const std::size_t pairs = kCenterLevels.size() * kSurroundDeltas.size();
    fm.intensity.resize(pairs);
    fm.red_green.resize(pairs);
    fm.blue_yellow.resize(pairs);
    fm.orientation.resize(pairs * kOrientationsDeg.size());

    std::vector<Job> jobs;
    std::size_t pair = 0;
    for (int c : kCenterLevels) {
        for (int d : kSurroundDeltas) {
            const int s = c + d;
            jobs.push_back({&fm.intensity, pair, c, s, 0});
            jobs.push_back({&fm.red_green, pair, c, s, 1});
            jobs.push_back({&fm.blue_yellow, pair, c, s, 2});
            for (std::size_t t = 0; t < kOrientationsDeg.size(); ++t) {
                jobs.push_back({&fm.orientation, t * pairs + pair, c, s, static_cast<int>(3 + t)});
            }
            ++pair;
        }
    }

    parallel_for(static_cast<int>(jobs.size()), cfg.threads, [&](int idx) {
        const Job& job = jobs[static_cast<std::size_t>(idx)];
        FeatureMap out;
        out.center = job.c;
        out.surround = job.s;
        switch (job.channel) {
        case 0:
            out.map = center_surround({job.c, pyr.intensity[job.c]}, {job.s, pyr.intensity[job.s]});
            break;
        case 1:
            out.map = center_surround({job.c, difference(pyr.red[job.c], pyr.green[job.c])},
                                      {job.s, difference(pyr.green[job.s], pyr.red[job.s])});
            break;
        case 2:
            out.map = center_surround({job.c, difference(pyr.blue[job.c], pyr.yellow[job.c])},
                                      {job.s, difference(pyr.yellow[job.s], pyr.blue[job.s])});
            break;
        default: {
            const auto t = static_cast<std::size_t>(job.channel - 3);
            out.theta_deg = kOrientationsDeg[t];
            out.map = center_surround({job.c, pyr.orientation[t][job.c]}, {job.s, pyr.orientation[t][job.s]});
        }
        }
        (*job.dest)[job.slot] = std::move(out);
    });
    return fm;
}

// ---------------------------------------------------------------------------
// Normalization and fusion

/**
 * N(.): rescale to [0, 1], then weight by (1 - mean of the other local
 * maxima)^2. Local maxima are positive pixels not smaller than any of their
 * (up to 8) neighbors; the first global-max pixel in row-major order is left
 * out of the mean. A map whose value range is at most kFlatRange becomes zero.
 */
[[nodiscard]] inline ImageBuffer normalize_map(const ImageBuffer& m)
{
    if (m.empty()) {
        throw InvalidInput("normalize_map: empty map");
    }
    const auto lo_it = std::min_element(m.begin(), m.end());
    const auto hi_it = std::max_element(m.begin(), m.end());  // first maximum
    const double lo = *lo_it;
    const double hi = *hi_it;
    ImageBuffer out(m.dims(), 0.0);
    if (!(hi - lo > kFlatRange)) {
        return out;
    }
    const double range = hi - lo;
    auto src = m.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = (src[i] - lo) / range;
    }

    const auto global = static_cast<std::size_t>(hi_it - m.begin());
    const int w = out.width();
    const int h = out.height();
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = out(x, y);
            if (!(v > 0.0)) {
                continue;
            }
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dx != 0 || dy != 0) && out.contains(x + dx, y + dy) && out(x + dx, y + dy) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            const auto idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
            if (is_max && idx != global) {
                sum += v;
                ++count;
            }
        }
    }
    const double others = count > 0 ? sum / static_cast<double>(count) : 0.0;
    const double weight = (1.0 - others) * (1.0 - others);
    for (double& v : out) {
        v *= weight;
    }
    return out;
}

/**
 * Across-scale addition: resample every map onto the fusion level's grid and
 * sum pointwise. Per pixel, contributions are added in ascending order of
 * value, which makes the result independent of the input order.
 */
[[nodiscard]] inline ImageBuffer across_scale_add(std::span<const LevelMap> maps, int fusion_scale, Dims base_dims)
{
    if (maps.empty()) {
        throw InvalidInput("across_scale_add: no maps");
    }
    const Dims fused = pyramid_dims(base_dims, fusion_scale);
    std::vector<ImageBuffer> resampled;
    resampled.reserve(maps.size());
    for (const LevelMap& lm : maps) {
        resampled.push_back(resample_between_levels(lm.map, lm.level, fusion_scale, fused));
    }
    ImageBuffer out(fused, 0.0);
    std::vector<double> column(resampled.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = 0; k < resampled.size(); ++k) {
            column[k] = resampled[k].data()[i];
        }
        std::sort(column.begin(), column.end());
        double acc = 0.0;
        for (double v : column) {
            acc += v;
        }
        out.data()[i] = acc;
    }
    return out;
}

[[nodiscard]] inline ConspicuityMaps conspicuity_maps(const FeatureMapSet& fm, Dims base_dims,
                                                      const PipelineConfig& cfg = {})
{
    cfg.validate();
    if (fm.intensity.empty() || fm.red_green.size() != fm.blue_yellow.size() || fm.orientation.empty()) {
        throw InvalidInput("conspicuity_maps: incomplete feature map set");
    }
    const int f = cfg.fusion_scale;
    ConspicuityMaps cm;
    cm.level = f;

    std::vector<LevelMap> intensity;
    for (const FeatureMap& m : fm.intensity) {
        intensity.push_back({m.center, normalize_map(m.map)});
    }
    cm.intensity = across_scale_add(intensity, f, base_dims);

    std::vector<LevelMap> color;
    for (std::size_t i = 0; i < fm.red_green.size(); ++i) {
        const ImageBuffer rg = normalize_map(fm.red_green[i].map);
        const ImageBuffer by = normalize_map(fm.blue_yellow[i].map);
        ImageBuffer sum(rg.dims());
        for (std::size_t p = 0; p < sum.size(); ++p) {
            sum.data()[p] = rg.data()[p] + by.data()[p];
        }
        color.push_back({fm.red_green[i].center, std::move(sum)});
    }
    cm.color = across_scale_add(color, f, base_dims);

    cm.orientation = ImageBuffer(pyramid_dims(base_dims, f), 0.0);
    for (double theta : kOrientationsDeg) {
        std::vector<LevelMap> oriented;
        for (const FeatureMap& m : fm.orientation) {
            if (m.theta_deg == theta) {
                oriented.push_back({m.center, normalize_map(m.map)});
            }
        }
        const ImageBuffer n = normalize_map(across_scale_add(oriented, f, base_dims));
        for (std::size_t p = 0; p < n.size(); ++p) {
            cm.orientation.data()[p] += n.data()[p];
        }
    }
    return cm;
}

/// S = (N(I-bar) + N(C-bar) + N(O-bar)) / 3.
[[nodiscard]] inline ImageBuffer saliency_map(const ConspicuityMaps& cm)
{
    if (cm.intensity.dims() != cm.color.dims() || cm.intensity.dims() != cm.orientation.dims()) {
        throw InvalidInput("saliency_map: conspicuity maps differ in size");
    }
    const ImageBuffer ni = normalize_map(cm.intensity);
    const ImageBuffer nc = normalize_map(cm.color);
    const ImageBuffer no = normalize_map(cm.orientation);
    ImageBuffer s(ni.dims());
    for (std::size_t p = 0; p < s.size(); ++p) {
        s.data()[p] = (ni.data()[p] + nc.data()[p] + no.data()[p]) / 3.0;
    }
    return s;
}

[[nodiscard]] inline double peak_value(const FeatureMapSet& fm)
{
    double peak = 0.0;
    for (const auto* group : {&fm.intensity, &fm.red_green, &fm.blue_yellow, &fm.orientation}) {
        for (const FeatureMap& m : *group) {
            for (double v : m.map) {
                peak = std::max(peak, v);
            }
        }
    }
    return peak;
}

/// Full pipeline from an RGB image to the saliency map at the fusion level.
[[nodiscard]] inline SaliencyResult compute_saliency(const RgbImage& img, const PipelineConfig& cfg = {})
{
    cfg.validate();
    const ChannelPyramids pyr = build_channel_pyramids(img, cfg);
    const FeatureMapSet fm = compute_feature_maps(pyr, cfg);
    SaliencyResult result;
    result.input_dims = img.dims();
    result.level = cfg.fusion_scale;
    result.peak_feature_contrast = peak_value(fm);
    result.conspicuity = conspicuity_maps(fm, img.dims(), cfg);
    result.saliency = saliency_map(result.conspicuity);
    return result;
}

}  // namespace eagle_eye
