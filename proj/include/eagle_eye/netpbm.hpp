#pragma once

// Netpbm image I/O.
// Reads P2/P3 (plain) and P5/P6 (raw, 8 or 16 bit) with comments in the header.
// Writes P5/P6 with maxval 255.

#include "eagle_eye/config.hpp"
#include "eagle_eye/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace eagle_eye {

namespace detail {

class PnmCursor {
public:
    PnmCursor(const std::vector<unsigned char>& bytes, std::string origin) : b_(bytes), origin_(std::move(origin)) {}

    void skip_space_and_comments()
    {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(b_[pos_]) != 0) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint()
    {
        skip_space_and_comments();
        if (pos_ >= b_.size() || std::isdigit(b_[pos_]) == 0) {
            fail("expected an unsigned integer");
        }
        long v = 0;
        while (pos_ < b_.size() && std::isdigit(b_[pos_]) != 0) {
            v = v * 10 + (b_[pos_] - '0');
            if (v > 1'000'000'000L) {
                fail("number too large");
            }
            ++pos_;
        }
        return v;
    }

    /// Raw rasters start after exactly one whitespace byte following maxval.
    void single_whitespace()
    {
        if (pos_ >= b_.size() || std::isspace(b_[pos_]) == 0) {
            fail("missing whitespace before raster");
        }
        ++pos_;
    }

    unsigned read_raw(int bytes_per_sample)
    {
        if (pos_ + static_cast<std::size_t>(bytes_per_sample) > b_.size()) {
            fail("truncated raster");
        }
        unsigned v = b_[pos_++];
        if (bytes_per_sample == 2) {
            v = (v << 8) | b_[pos_++];
        }
        return v;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw IoError(origin_ + ": " + msg); }

private:
    const std::vector<unsigned char>& b_;
    std::string origin_;
    std::size_t pos_ = 0;

    friend inline char pnm_magic(PnmCursor&);
};

inline char pnm_magic(PnmCursor& c)
{
    if (c.b_.size() < 2 || c.b_[0] != 'P') {
        c.fail("not a Netpbm file");
    }
    c.pos_ = 2;
    return static_cast<char>(c.b_[1]);
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint8_t to_byte(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

inline void write_bytes(const std::filesystem::path& path, const std::string& header,
                        const std::vector<std::uint8_t>& raster)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << header;
    out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace detail

/// Decodes any of P2, P3, P5, P6 into an RGB image with samples in [0, 1].
/// Gray formats fill all three planes with the same value.
[[nodiscard]] inline RgbImage decode_pnm(const std::vector<unsigned char>& bytes, const std::string& origin = "<pnm>")
{
    detail::PnmCursor cur(bytes, origin);
    const char kind = detail::pnm_magic(cur);
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
        cur.fail(std::string("unsupported Netpbm type P") + kind);
    }
    const long w = cur.read_uint();
    const long h = cur.read_uint();
    const long maxval = cur.read_uint();
    if (w <= 0 || h <= 0 || w * h > 100'000'000L) {
        cur.fail("bad image size");
    }
    if (maxval <= 0 || maxval > 65535) {
        cur.fail("maxval must be in [1, 65535]");
    }
    const bool plain = kind == '2' || kind == '3';
    const bool color = kind == '3' || kind == '6';
    const int bps = maxval > 255 ? 2 : 1;
    if (!plain) {
        cur.single_whitespace();
    }

    auto sample = [&]() -> double {
        const long v = plain ? cur.read_uint() : static_cast<long>(cur.read_raw(bps));
        if (v > maxval) {
            cur.fail("sample exceeds maxval");
        }
        return static_cast<double>(v) / static_cast<double>(maxval);
    };

    RgbImage img(static_cast<int>(w), static_cast<int>(h));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (color) {
                const double r = sample();
                const double g = sample();
                const double b = sample();
                img.set(x, y, r, g, b);
            } else {
                const double v = sample();
                img.set(x, y, v, v, v);
            }
        }
    }
    return img;
}

[[nodiscard]] inline RgbImage read_pnm(const std::filesystem::path& path)
{
    return decode_pnm(detail::read_bytes(path), path.string());
}

/// Writes an 8-bit binary PPM; samples are clamped to [0, 1] and rounded.
inline void write_ppm(const std::filesystem::path& path, const RgbImage& img)
{
    std::vector<std::uint8_t> raster;
    raster.reserve(static_cast<std::size_t>(img.dims().area()) * 3);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            raster.push_back(detail::to_byte(img.r(x, y)));
            raster.push_back(detail::to_byte(img.g(x, y)));
            raster.push_back(detail::to_byte(img.b(x, y)));
        }
    }
    detail::write_bytes(path, "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n",
                        raster);
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img)
{
    const std::vector<std::uint8_t> raster(img.begin(), img.end());
    detail::write_bytes(path, "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n",
                        raster);
}

}  // namespace eagle_eye
