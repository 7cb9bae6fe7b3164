#include "eagle_eye/localizer.hpp"
#include "eagle_eye/testkit/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <queue>

using namespace eagle_eye;

namespace {

GrayImage gaussian_blob(int w, int h, double cx, double cy, double sigma, double peak = 255.0)
{
    GrayImage g(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = peak * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * sigma * sigma));
            g(x, y) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return g;
}

/// Direct 2-D Gaussian blur (truncated at ceil(3 sigma), clamp-to-edge), one pixel at a time.
double blurred_at(const GrayImage& g, int x, int y, double sigma)
{
    const int r = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    double num = 0.0;
    double den = 0.0;
    for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
            const double w = std::exp(-(i * i) / (2 * sigma * sigma)) * std::exp(-(j * j) / (2 * sigma * sigma));
            num += w * g(std::clamp(x + i, 0, g.width() - 1), std::clamp(y + j, 0, g.height() - 1));
            den += w;
        }
    }
    return num / den;
}

int components(const GrayImage& mask)
{
    GrayImage seen(mask.dims(), 0);
    int count = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask(x, y) == 0 || seen(x, y) != 0) {
                continue;
            }
            ++count;
            std::queue<std::pair<int, int>> q;
            q.emplace(x, y);
            seen(x, y) = 1;
            while (!q.empty()) {
                const auto [cx, cy] = q.front();
                q.pop();
                for (auto [dx, dy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (mask.contains(nx, ny) && mask(nx, ny) != 0 && seen(nx, ny) == 0) {
                        seen(nx, ny) = 1;
                        q.emplace(nx, ny);
                    }
                }
            }
        }
    }
    return count;
}

}  // namespace

TEST(ExportGray, ConstantMapIsZero)
{
    for (std::uint8_t v : export_gray(ImageBuffer(40, 30, 0.7), {640, 480}, 4)) {
        EXPECT_EQ(v, 0);
    }
}

TEST(ExportGray, UniqueMaxGivesSingle255)
{
    testkit::UnitStream u(4);
    ImageBuffer s(40, 30);
    for (double& v : s) {
        v = 0.5 * u.next();
    }
    s(25, 11) = 1.0;
    const GrayImage g = export_gray(s, {640, 480}, 4);
    EXPECT_EQ(g(400, 176), 255);
    EXPECT_EQ(std::count(g.begin(), g.end(), std::uint8_t{255}), 1);
    EXPECT_EQ(*std::min_element(g.begin(), g.end()), 0);
}

TEST(ExportGray, MatchesBilinearOracle)
{
    testkit::UnitStream u(5);
    ImageBuffer s(40, 30);
    for (double& v : s) {
        v = u.next();
    }
    const GrayImage g = export_gray(s, {640, 480}, 4);
    double lo = 1e9, hi = -1e9;
    ImageBuffer up(640, 480);
    for (int y = 0; y < 480; ++y) {
        for (int x = 0; x < 640; ++x) {
            up(x, y) = oracle::bilinear_at(s, x / 16.0, y / 16.0);
            lo = std::min(lo, up(x, y));
            hi = std::max(hi, up(x, y));
        }
    }
    for (int y = 0; y < 480; ++y) {
        for (int x = 0; x < 640; ++x) {
            const double want = (up(x, y) - lo) / (hi - lo) * 255.0;
            EXPECT_LE(std::fabs(g(x, y) - want), 1.0);
        }
    }
}

TEST(SalientPoint, SingleBrightPixel)
{
    GrayImage g(640, 480, 0);
    g(100, 50) = 255;
    EXPECT_EQ(find_salient_point(g), (SalientPoint{100, 50, 255}));
}

TEST(SalientPoint, TieGoesToEarlierRow)
{
    GrayImage g(5, 5, 10);
    g(2, 2) = 200;
    g(3, 1) = 200;
    EXPECT_EQ(find_salient_point(g), (SalientPoint{3, 1, 200}));
}

TEST(SalientRegion, SquareCentroid)
{
    GrayImage g(100, 80, 0);
    for (int y = 30; y < 40; ++y) {
        for (int x = 50; x < 60; ++x) {
            g(x, y) = 255;
        }
    }
    const SalientPoint p = find_salient_point(g);
    const SalientRegion r = extract_salient_region(g, p);
    EXPECT_NEAR(r.centroid_x, 54.5, 0.5);
    EXPECT_NEAR(r.centroid_y, 34.5, 0.5);
    EXPECT_TRUE(r.bbox.contains(r.centroid_x, r.centroid_y));
}

TEST(SalientRegion, CentroidIsWeightedMeanOverMask)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        testkit::UnitStream u(seed);
        GrayImage g(120, 90, 0);
        for (int k = 0; k < 3; ++k) {
            const GrayImage blob = gaussian_blob(120, 90, 30 + 60 * u.next(), 20 + 50 * u.next(), 3 + 4 * u.next(),
                                                 120 + 135 * u.next());
            for (std::size_t i = 0; i < g.size(); ++i) {
                g.data()[i] = std::max(g.data()[i], blob.data()[i]);
            }
        }
        const SalientPoint p = find_salient_point(g);
        const RegionParams params{2.0, 0.5};
        const SalientRegion r = extract_salient_region(g, p, params);
        double sw = 0.0, sx = 0.0, sy = 0.0;
        std::size_t pop = 0;
        for (int y = 0; y < 90; ++y) {
            for (int x = 0; x < 120; ++x) {
                if (r.mask(x, y) != 0) {
                    const double w = blurred_at(g, x, y, 2.0);
                    sw += w;
                    sx += w * x;
                    sy += w * y;
                    ++pop;
                }
            }
        }
        EXPECT_NEAR(r.centroid_x, sx / sw, 1e-9);
        EXPECT_NEAR(r.centroid_y, sy / sw, 1e-9);
        EXPECT_DOUBLE_EQ(r.area_fraction, static_cast<double>(pop) / (120.0 * 90.0));
        EXPECT_EQ(r.mask(p.x, p.y), 1);
        EXPECT_EQ(components(r.mask), 1);
        EXPECT_TRUE(r.bbox.contains(r.centroid_x, r.centroid_y));
    }
}

TEST(SalientRegion, GaussianBlobCentroidAccuracy)
{
    for (auto [cx, cy] : {std::pair{40.0, 30.0}, std::pair{41.3, 28.6}, std::pair{77.5, 50.25}}) {
        const GrayImage g = gaussian_blob(128, 96, cx, cy, 5.0);
        const SalientRegion r = extract_salient_region(g, find_salient_point(g));
        EXPECT_LE(std::hypot(r.centroid_x - cx, r.centroid_y - cy), 0.5);
    }
}

TEST(SalientRegion, TranslationEquivariance)
{
    const GrayImage a = gaussian_blob(200, 150, 80.3, 60.7, 6.0);
    const GrayImage b = gaussian_blob(200, 150, 80.3 + 17, 60.7 - 9, 6.0);
    const SalientPoint pa = find_salient_point(a);
    const SalientPoint pb = find_salient_point(b);
    EXPECT_EQ(pb.x, pa.x + 17);
    EXPECT_EQ(pb.y, pa.y - 9);
    const SalientRegion ra = extract_salient_region(a, pa);
    const SalientRegion rb = extract_salient_region(b, pb);
    EXPECT_NEAR(rb.centroid_x - ra.centroid_x, 17.0, 1e-9);
    EXPECT_NEAR(rb.centroid_y - ra.centroid_y, -9.0, 1e-9);
}

TEST(SalientRegion, Deterministic)
{
    const GrayImage g = gaussian_blob(64, 48, 20.2, 30.9, 4.0);
    const SalientPoint p = find_salient_point(g);
    EXPECT_EQ(extract_salient_region(g, p), extract_salient_region(g, p));
}

TEST(SalientRegion, RejectsBadInput)
{
    const GrayImage g(10, 10, 1);
    EXPECT_THROW((void)extract_salient_region(g, {10, 0, 1}), InvalidInput);
    EXPECT_THROW((void)extract_salient_region(g, {1, 1, 1}, {0.0, 1.0}), InvalidInput);
    EXPECT_THROW((void)find_salient_point(GrayImage{}), InvalidInput);
}

TEST(Localize, PipelineOnBarArray)
{
    const testkit::BarArray bars = testkit::bar_array(1, 3);
    const Detection d = localize(compute_saliency(bars.image));
    EXPECT_EQ(d.gray.dims(), (Dims{640, 480}));
    EXPECT_EQ(d.point.gray, 255);
    EXPECT_TRUE(bars.odd_bar.contains(d.point.x, d.point.y));
    EXPECT_EQ(d.region.mask(d.point.x, d.point.y), 1);
}
