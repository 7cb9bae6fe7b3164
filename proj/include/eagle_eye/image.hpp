#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eagle_eye {

/// Raised when an operation receives arguments that violate its preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Dims {
    int width = 0;
    int height = 0;

    [[nodiscard]] std::size_t area() const
    {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    [[nodiscard]] bool empty() const { return width <= 0 || height <= 0; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/**
 * Row-major single-channel raster.
 *
 * Pixel (x, y) lives at data()[y * width + x]. Continuous image coordinates
 * put the center of pixel x at x + 0.5.
 */
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;
    Raster(int width, int height, T fill = T{}) : dims_{width, height}
    {
        if (width < 0 || height < 0) {
            throw InvalidInput("raster dimensions must be non-negative");
        }
        data_.assign(dims_.area(), fill);
    }
    explicit Raster(Dims dims, T fill = T{}) : Raster(dims.width, dims.height, fill) {}

    [[nodiscard]] int width() const { return dims_.width; }
    [[nodiscard]] int height() const { return dims_.height; }
    [[nodiscard]] Dims dims() const { return dims_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }

    /// Clamp-to-edge access.
    [[nodiscard]] const T& clamped(int x, int y) const
    {
        return (*this)(std::clamp(x, 0, dims_.width - 1), std::clamp(y, 0, dims_.height - 1));
    }

    [[nodiscard]] bool contains(int x, int y) const
    {
        return x >= 0 && y >= 0 && x < dims_.width && y < dims_.height;
    }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(dims_.width) +
               static_cast<std::size_t>(x);
    }

    Dims dims_{};
    std::vector<T> data_;
};

/// Scalar map in 64-bit floating point: the currency of the saliency pipeline.
using ImageBuffer = Raster<double>;
/// 8-bit gray raster (exported saliency maps, masks).
using GrayImage = Raster<std::uint8_t>;

/// Planar RGB image with samples in [0, 1].
struct RgbImage {
    ImageBuffer r;
    ImageBuffer g;
    ImageBuffer b;

    RgbImage() = default;
    RgbImage(int width, int height) : r(width, height), g(width, height), b(width, height) {}
    explicit RgbImage(Dims dims) : RgbImage(dims.width, dims.height) {}

    [[nodiscard]] int width() const { return r.width(); }
    [[nodiscard]] int height() const { return r.height(); }
    [[nodiscard]] Dims dims() const { return r.dims(); }

    void set(int x, int y, double red, double green, double blue)
    {
        r(x, y) = red;
        g(x, y) = green;
        b(x, y) = blue;
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

inline void validate(const ImageBuffer& buf, const char* what = "image buffer")
{
    if (buf.empty()) {
        throw InvalidInput(std::string(what) + " is empty");
    }
    for (double v : buf) {
        if (!std::isfinite(v)) {
            throw InvalidInput(std::string(what) + " contains a non-finite sample");
        }
    }
}

/// Throws InvalidInput unless the planes agree in size and every sample is finite in [0, 1].
inline void validate(const RgbImage& img)
{
    if (img.r.empty()) {
        throw InvalidInput("RGB image is empty");
    }
    if (img.g.dims() != img.r.dims() || img.b.dims() != img.r.dims()) {
        throw InvalidInput("RGB planes differ in size");
    }
    for (const ImageBuffer* plane : {&img.r, &img.g, &img.b}) {
        for (double v : *plane) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                throw InvalidInput("RGB sample outside [0,1]");
            }
        }
    }
}

inline RgbImage mirror_horizontally(const RgbImage& img)
{
    RgbImage out(img.dims());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int mx = img.width() - 1 - x;
            out.set(mx, y, img.r(x, y), img.g(x, y), img.b(x, y));
        }
    }
    return out;
}

template <typename T>
Raster<T> mirror_horizontally(const Raster<T>& img)
{
    Raster<T> out(img.dims());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out(img.width() - 1 - x, y) = img(x, y);
        }
    }
    return out;
}

}  // namespace eagle_eye
