#include "eagle_eye/image.hpp"
#include "eagle_eye/netpbm.hpp"
#include "eagle_eye/testkit/fixtures.hpp"
#include "support/cli_runner.hpp"

#include <gtest/gtest.h>

using namespace eagle_eye;

namespace {

std::vector<unsigned char> bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Raster, IndexingAndClamping)
{
    Raster<int> r(3, 2, 0);
    r(2, 1) = 7;
    EXPECT_EQ(r.data()[5], 7);
    EXPECT_EQ(r.clamped(10, 10), 7);
    EXPECT_EQ(r.clamped(-5, -5), 0);
    EXPECT_TRUE(r.contains(2, 1));
    EXPECT_FALSE(r.contains(3, 0));
    EXPECT_EQ(r.size(), 6u);
}

TEST(Raster, MirrorIsAnInvolution)
{
    const RgbImage img = testkit::random_rgb(1, 7, 5);
    const RgbImage m = mirror_horizontally(img);
    EXPECT_EQ(m.r(0, 3), img.r(6, 3));
    EXPECT_TRUE(mirror_horizontally(m) == img);
}

TEST(Raster, ValidateRejectsMismatchedPlanes)
{
    RgbImage img(4, 4);
    img.b = ImageBuffer(3, 4);
    EXPECT_THROW(validate(img), InvalidInput);
}

TEST(Netpbm, PpmRoundTripIsExactFor8BitValues)
{
    RgbImage img(5, 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 5; ++x) {
            img.set(x, y, (x * 50) / 255.0, (y * 100) / 255.0, ((x + y) * 30) / 255.0);
        }
    }
    const cli::fs::path dir = cli::scratch_dir("netpbm_ppm");
    write_ppm(dir / "a.ppm", img);
    EXPECT_TRUE(read_pnm(dir / "a.ppm") == img);
    const std::string raw = cli::read_file(dir / "a.ppm");
    EXPECT_EQ(raw.substr(0, 11), "P6\n5 3\n255\n");
    EXPECT_EQ(raw.size(), 11u + 45u);
}

TEST(Netpbm, PgmWriteAndRead)
{
    GrayImage g(4, 2, 0);
    g(3, 1) = 255;
    g(0, 0) = 128;
    const cli::fs::path dir = cli::scratch_dir("netpbm_pgm");
    write_pgm(dir / "g.pgm", g);
    const RgbImage back = read_pnm(dir / "g.pgm");
    EXPECT_EQ(back.r(3, 1), 1.0);
    EXPECT_EQ(back.g(0, 0), 128.0 / 255.0);
    EXPECT_EQ(back.b(1, 0), 0.0);
}

TEST(Netpbm, PlainFormatsWithComments)
{
    const RgbImage g = decode_pnm(bytes("P2\n# comment\n3 1 # inline\n4\n0 2 4\n"));
    EXPECT_EQ(g.r(1, 0), 0.5);
    EXPECT_EQ(g.b(2, 0), 1.0);
    const RgbImage c = decode_pnm(bytes("P3 2 1 255 255 0 0  0 0 255"));
    EXPECT_EQ(c.r(0, 0), 1.0);
    EXPECT_EQ(c.g(0, 0), 0.0);
    EXPECT_EQ(c.b(1, 0), 1.0);
}

TEST(Netpbm, SixteenBitRaw)
{
    std::string s = "P5\n2 1\n65535\n";
    s += std::string("\xff\xff\x80\x00", 4);
    const RgbImage img = decode_pnm(bytes(s));
    EXPECT_EQ(img.r(0, 0), 1.0);
    EXPECT_EQ(img.r(1, 0), 32768.0 / 65535.0);
}

TEST(Netpbm, MalformedInputs)
{
    EXPECT_THROW((void)decode_pnm(bytes("")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P7\n1 1\n255\n")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P5\n2 2\n255\n\x01")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P2\n1 1\n0\n0\n")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P2\n1 1\n70000\n0\n")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P2\n1 1\n10\n11\n")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P2\n0 1\n10\n")), IoError);
    EXPECT_THROW((void)decode_pnm(bytes("P2\nx 1\n10\n")), IoError);
    EXPECT_THROW((void)read_pnm("/no/such/image.ppm"), IoError);
}

TEST(Netpbm, WriteToMissingDirectoryFails)
{
    EXPECT_THROW(write_pgm("/no/such/dir/x.pgm", GrayImage(2, 2, 0)), IoError);
}
