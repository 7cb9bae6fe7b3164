#pragma once

// Straight-line reference implementation of the saliency pipeline, written
// without any of the modular code paths: full 2-D convolutions, explicit
// index arithmetic, no shared helpers. Slow; meant for small images.

#include "eagle_eye/image.hpp"
#include "eagle_eye/saliency.hpp"  // PipelineConfig only

#include <cmath>
#include <numbers>
#include <vector>

namespace eagle_eye::testkit {

namespace naive_detail {

struct Grid {
    int w = 0;
    int h = 0;
    std::vector<double> v;

    Grid() = default;
    Grid(int width, int height) : w(width), h(height), v(static_cast<std::size_t>(width * height), 0.0) {}
    double& at(int x, int y) { return v[static_cast<std::size_t>(y * w + x)]; }
    double at(int x, int y) const { return v[static_cast<std::size_t>(y * w + x)]; }
    double edge(int x, int y) const
    {
        if (x < 0) x = 0;
        if (y < 0) y = 0;
        if (x > w - 1) x = w - 1;
        if (y > h - 1) y = h - 1;
        return at(x, y);
    }
};

inline Grid reduce(const Grid& in, const std::vector<double>& taps)
{
    const int n = static_cast<int>(taps.size());
    const int r = n / 2;
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            total += taps[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(j)];
        }
    }
    Grid out((in.w + 1) / 2, (in.h + 1) / 2);
    for (int y = 0; y < out.h; ++y) {
        for (int x = 0; x < out.w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    acc += taps[static_cast<std::size_t>(i)] * taps[static_cast<std::size_t>(j)] *
                           in.edge(2 * x + i - r, 2 * y + j - r);
                }
            }
            out.at(x, y) = acc / total;
        }
    }
    return out;
}

inline std::vector<Grid> nine_levels(const Grid& base, const std::vector<double>& taps)
{
    std::vector<Grid> levels{base};
    for (int k = 1; k < 9; ++k) {
        levels.push_back(reduce(levels.back(), taps));
    }
    return levels;
}

// Sample `src` (living on level `from`) at the grid of level `to` with size w x h.
inline Grid bilinear(const Grid& src, int from, int to, int w, int h)
{
    Grid out(w, h);
    const double step = std::pow(2.0, to - from);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double px = x * step;
            double py = y * step;
            if (px > src.w - 1) px = src.w - 1;
            if (py > src.h - 1) py = src.h - 1;
            const int ix = static_cast<int>(px);
            const int iy = static_cast<int>(py);
            const int jx = ix + 1 < src.w ? ix + 1 : ix;
            const int jy = iy + 1 < src.h ? iy + 1 : iy;
            const double ax = px - ix;
            const double ay = py - iy;
            out.at(x, y) = src.at(ix, iy) * (1 - ax) * (1 - ay) + src.at(jx, iy) * ax * (1 - ay) +
                           src.at(ix, jy) * (1 - ax) * ay + src.at(jx, jy) * ax * ay;
        }
    }
    return out;
}

inline Grid normalize(const Grid& m)
{
    double lo = m.v[0];
    double hi = m.v[0];
    std::size_t hi_at = 0;
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        if (m.v[i] < lo) lo = m.v[i];
        if (m.v[i] > hi) {
            hi = m.v[i];
            hi_at = i;
        }
    }
    Grid out(m.w, m.h);
    if (hi - lo <= kFlatRange) {
        return out;
    }
    for (std::size_t i = 0; i < m.v.size(); ++i) {
        out.v[i] = (m.v[i] - lo) / (hi - lo);
    }
    double sum = 0.0;
    int count = 0;
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            const double c = out.at(x, y);
            if (c <= 0.0 || static_cast<std::size_t>(y * m.w + x) == hi_at) {
                continue;
            }
            bool peak = true;
            for (int ny = y - 1; ny <= y + 1; ++ny) {
                for (int nx = x - 1; nx <= x + 1; ++nx) {
                    if (nx < 0 || ny < 0 || nx >= m.w || ny >= m.h) continue;
                    if (out.at(nx, ny) > c) peak = false;
                }
            }
            if (peak) {
                sum += c;
                ++count;
            }
        }
    }
    const double mbar = count ? sum / count : 0.0;
    for (double& c : out.v) {
        c = c * (1.0 - mbar) * (1.0 - mbar);
    }
    return out;
}

inline Grid absdiff(const Grid& center, const Grid& surround_up)
{
    Grid out(center.w, center.h);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        out.v[i] = std::fabs(center.v[i] - surround_up.v[i]);
    }
    return out;
}

inline Grid minus(const Grid& a, const Grid& b)
{
    Grid out(a.w, a.h);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        out.v[i] = a.v[i] - b.v[i];
    }
    return out;
}

}  // namespace naive_detail

/// Every intermediate map of the reference pipeline.
struct NaiveTrace {
    // Raw center-surround maps ordered by (c, s) like the modular code;
    // orientation maps grouped by theta first.
    std::vector<ImageBuffer> intensity, red_green, blue_yellow, orientation;
    ImageBuffer intensity_bar, color_bar, orientation_bar;
    ImageBuffer saliency;
};

namespace naive_detail {
inline ImageBuffer to_buffer(const Grid& g)
{
    ImageBuffer out(g.w, g.h);
    for (int y = 0; y < g.h; ++y) {
        for (int x = 0; x < g.w; ++x) {
            out(x, y) = g.at(x, y);
        }
    }
    return out;
}
}  // namespace naive_detail

/// Reference pipeline for `img`, keeping the intermediate maps.
inline NaiveTrace naive_trace(const RgbImage& img, const PipelineConfig& cfg = {})
{
    NaiveTrace trace;
    std::vector<std::vector<ImageBuffer>> oriented_raw(4);
    using naive_detail::Grid;
    const int W = img.width();
    const int H = img.height();

    Grid I(W, H), rr(W, H), gg(W, H), bb(W, H);
    double imax = 0.0;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            I.at(x, y) = (img.r(x, y) + img.g(x, y) + img.b(x, y)) / 3.0;
            if (I.at(x, y) > imax) imax = I.at(x, y);
        }
    }
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const double i = I.at(x, y);
            if (i > cfg.hue_decouple_threshold * imax) {
                rr.at(x, y) = img.r(x, y) / i;
                gg.at(x, y) = img.g(x, y) / i;
                bb.at(x, y) = img.b(x, y) / i;
            }
        }
    }

    const auto& taps = cfg.downsample_taps;
    const auto Ipyr = naive_detail::nine_levels(I, taps);
    const auto rpyr = naive_detail::nine_levels(rr, taps);
    const auto gpyr = naive_detail::nine_levels(gg, taps);
    const auto bpyr = naive_detail::nine_levels(bb, taps);

    std::vector<Grid> R, G, B, Y;
    for (int k = 0; k < 9; ++k) {
        const Grid& r = rpyr[static_cast<std::size_t>(k)];
        const Grid& g = gpyr[static_cast<std::size_t>(k)];
        const Grid& b = bpyr[static_cast<std::size_t>(k)];
        Grid Rk(r.w, r.h), Gk(r.w, r.h), Bk(r.w, r.h), Yk(r.w, r.h);
        for (std::size_t i = 0; i < r.v.size(); ++i) {
            Rk.v[i] = std::fmax(0.0, r.v[i] - (g.v[i] + b.v[i]) / 2);
            Gk.v[i] = std::fmax(0.0, g.v[i] - (r.v[i] + b.v[i]) / 2);
            Bk.v[i] = std::fmax(0.0, b.v[i] - (r.v[i] + g.v[i]) / 2);
            Yk.v[i] = std::fmax(0.0, (r.v[i] + g.v[i]) / 2 - std::fabs(r.v[i] - g.v[i]) / 2 - b.v[i]);
        }
        R.push_back(Rk);
        G.push_back(Gk);
        B.push_back(Bk);
        Y.push_back(Yk);
    }

    // Gabor magnitude pyramids.
    const GaborParams& gp = cfg.gabor;
    const int half = gp.kernel_size / 2;
    const double angles[4] = {0.0, 45.0, 90.0, 135.0};
    std::vector<std::vector<Grid>> O(4);
    for (int t = 0; t < 4; ++t) {
        const double a = angles[t] * std::numbers::pi / 180.0;
        // Rotation taking image offsets into (across-bar, along-bar) coordinates.
        const double rot[2][2] = {{std::sin(a), std::cos(a)}, {std::cos(a), -std::sin(a)}};
        Grid kern(gp.kernel_size, gp.kernel_size);
        double total = 0.0;
        for (int dy = -half; dy <= half; ++dy) {
            for (int dx = -half; dx <= half; ++dx) {
                const double across = rot[0][0] * dx + rot[0][1] * dy;
                const double along = rot[1][0] * dx + rot[1][1] * dy;
                const double g = std::exp(-(across * across + gp.aspect * gp.aspect * along * along) /
                                          (2 * gp.envelope_sigma_px * gp.envelope_sigma_px)) *
                                 std::cos(2 * std::numbers::pi * across / gp.wavelength_px +
                                          gp.phase_deg * std::numbers::pi / 180.0);
                kern.at(dx + half, dy + half) = g;
                total += g;
            }
        }
        for (double& k : kern.v) {
            k -= total / static_cast<double>(kern.v.size());
        }
        for (int k = 0; k < 9; ++k) {
            const Grid& src = Ipyr[static_cast<std::size_t>(k)];
            Grid out(src.w, src.h);
            for (int y = 0; y < src.h; ++y) {
                for (int x = 0; x < src.w; ++x) {
                    double acc = 0.0;
                    for (int dy = -half; dy <= half; ++dy) {
                        for (int dx = -half; dx <= half; ++dx) {
                            acc += kern.at(dx + half, dy + half) * src.edge(x - dx, y - dy);
                        }
                    }
                    out.at(x, y) = std::fabs(acc);
                }
            }
            O[static_cast<std::size_t>(t)].push_back(out);
        }
    }

    const int f = cfg.fusion_scale;
    const int fw = Ipyr[static_cast<std::size_t>(f)].w;
    const int fh = Ipyr[static_cast<std::size_t>(f)].h;
    auto lvl = [](const std::vector<Grid>& p, int k) -> const Grid& { return p[static_cast<std::size_t>(k)]; };
    auto add_into = [&](Grid& acc, const Grid& m, int level) {
        const Grid r = naive_detail::bilinear(m, level, f, fw, fh);
        for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += r.v[i];
    };

    Grid Ibar(fw, fh), Cbar(fw, fh), Obar(fw, fh);
    std::vector<Grid> Oacc(4, Grid(fw, fh));
    for (int c = 2; c <= 4; ++c) {
        for (int s = c + 3; s <= c + 4; ++s) {
            const Grid& Ic = lvl(Ipyr, c);
            const Grid id = naive_detail::absdiff(Ic, naive_detail::bilinear(lvl(Ipyr, s), s, c, Ic.w, Ic.h));
            trace.intensity.push_back(naive_detail::to_buffer(id));
            add_into(Ibar, naive_detail::normalize(id), c);

            const Grid rg_c = naive_detail::minus(lvl(R, c), lvl(G, c));
            const Grid gr_s = naive_detail::minus(lvl(G, s), lvl(R, s));
            const Grid by_c = naive_detail::minus(lvl(B, c), lvl(Y, c));
            const Grid yb_s = naive_detail::minus(lvl(Y, s), lvl(B, s));
            const Grid rg_raw = naive_detail::absdiff(rg_c, naive_detail::bilinear(gr_s, s, c, rg_c.w, rg_c.h));
            const Grid by_raw = naive_detail::absdiff(by_c, naive_detail::bilinear(yb_s, s, c, by_c.w, by_c.h));
            trace.red_green.push_back(naive_detail::to_buffer(rg_raw));
            trace.blue_yellow.push_back(naive_detail::to_buffer(by_raw));
            const Grid rg = naive_detail::normalize(rg_raw);
            const Grid by = naive_detail::normalize(by_raw);
            Grid both(rg.w, rg.h);
            for (std::size_t i = 0; i < both.v.size(); ++i) both.v[i] = rg.v[i] + by.v[i];
            add_into(Cbar, both, c);

            for (int t = 0; t < 4; ++t) {
                const Grid& oc = lvl(O[static_cast<std::size_t>(t)], c);
                const Grid& os = lvl(O[static_cast<std::size_t>(t)], s);
                const Grid od = naive_detail::absdiff(oc, naive_detail::bilinear(os, s, c, oc.w, oc.h));
                oriented_raw[static_cast<std::size_t>(t)].push_back(naive_detail::to_buffer(od));
                add_into(Oacc[static_cast<std::size_t>(t)], naive_detail::normalize(od), c);
            }
        }
    }
    for (int t = 0; t < 4; ++t) {
        const Grid n = naive_detail::normalize(Oacc[static_cast<std::size_t>(t)]);
        for (std::size_t i = 0; i < Obar.v.size(); ++i) Obar.v[i] += n.v[i];
    }

    const Grid a = naive_detail::normalize(Ibar);
    const Grid b = naive_detail::normalize(Cbar);
    const Grid c = naive_detail::normalize(Obar);
    ImageBuffer S(fw, fh);
    for (int y = 0; y < fh; ++y) {
        for (int x = 0; x < fw; ++x) {
            S(x, y) = (a.at(x, y) + b.at(x, y) + c.at(x, y)) / 3.0;
        }
    }
    for (const auto& group : oriented_raw) {
        trace.orientation.insert(trace.orientation.end(), group.begin(), group.end());
    }
    trace.intensity_bar = naive_detail::to_buffer(Ibar);
    trace.color_bar = naive_detail::to_buffer(Cbar);
    trace.orientation_bar = naive_detail::to_buffer(Obar);
    trace.saliency = std::move(S);
    return trace;
}

/// Reference saliency map at cfg.fusion_scale for `img`.
inline ImageBuffer naive_saliency(const RgbImage& img, const PipelineConfig& cfg = {})
{
    return naive_trace(img, cfg).saliency;
}

/// max |a - b| / max |b|; infinite when the sizes differ.
inline double relative_error(const ImageBuffer& a, const ImageBuffer& b)
{
    if (a.dims() != b.dims()) {
        return INFINITY;
    }
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::fmax(diff, std::fabs(a.data()[i] - b.data()[i]));
        scale = std::fmax(scale, std::fabs(b.data()[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace eagle_eye::testkit
