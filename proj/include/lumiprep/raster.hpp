#pragma once

#include <cstdint>
#include <vector>

#include "lumiprep/error.hpp"

namespace lumiprep {

struct PixelTriple {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const PixelTriple&) const = default;
};

// 8-bit RGB raster, row-major, top-left origin. Pixel (x, y) lives at
// offset y * width + x.
class RgbImage {
public:
    RgbImage() = default;

    RgbImage(int width, int height, PixelTriple fill = {})
        : width_(width), height_(height),
          pixels_(checked_size(width, height), fill) {}

    RgbImage(int width, int height, std::vector<PixelTriple> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != checked_size(width, height))
            throw Error(Errc::invalid_argument, "pixel buffer does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }
    std::size_t pixel_count() const { return pixels_.size(); }

    PixelTriple& at(int x, int y) { return pixels_[index(x, y)]; }
    const PixelTriple& at(int x, int y) const { return pixels_[index(x, y)]; }

    std::vector<PixelTriple>& pixels() { return pixels_; }
    const std::vector<PixelTriple>& pixels() const { return pixels_; }

    bool operator==(const RgbImage&) const = default;

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 1 || height < 1)
            throw Error(Errc::invalid_argument, "image dimensions must be >= 1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<PixelTriple> pixels_;
};

// Single-channel 8-bit raster with the same layout conventions as RgbImage.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height),
          pixels_(checked_size(width, height), fill) {}

    GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != checked_size(width, height))
            throw Error(Errc::invalid_argument, "pixel buffer does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }
    std::size_t pixel_count() const { return pixels_.size(); }

    std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }
    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }

    std::vector<std::uint8_t>& pixels() { return pixels_; }
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    bool operator==(const GrayImage&) const = default;

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 1 || height < 1)
            throw Error(Errc::invalid_argument, "image dimensions must be >= 1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

} // namespace lumiprep
