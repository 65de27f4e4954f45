#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "balltrack/color_lut.hpp"

namespace balltrack {

struct RgbPixel {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

// 8-bit RGB raster, row-major.
class RgbImage {
public:
    RgbImage(int width, int height, RgbPixel fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    bool contains(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    RgbPixel& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    const RgbPixel& at(int x, int y) const {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<RgbPixel> pixels() { return pixels_; }
    std::span<const RgbPixel> pixels() const { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_;
    int height_;
    std::vector<RgbPixel> pixels_;
};

// Scalar intensity raster in [0,1], row-major.
class GrayImage {
public:
    GrayImage(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }

    double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

private:
    int width_;
    int height_;
    std::vector<double> values_;
};

// Per-pixel class indices; 0 is background / "not any learned color".
class ClassMap {
public:
    ClassMap(int width, int height, std::uint16_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint16_t& at(int x, int y) { return classes_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint16_t at(int x, int y) const {
        return classes_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<std::uint16_t> classes() { return classes_; }
    std::span<const std::uint16_t> classes() const { return classes_; }

    friend bool operator==(const ClassMap&, const ClassMap&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint16_t> classes_;
};

// One 8-connected same-class component. `boundary` is the outer contour in
// tracing order; consecutive entries (last wrapping to first) differ by at
// most one in each coordinate.
struct Region {
    int label = 0;
    std::uint16_t class_index = 0;
    int pixel_count = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    std::vector<std::array<int, 2>> boundary;
};

// --- PPM (P6) I/O -----------------------------------------------------------

RgbImage load_ppm(const std::filesystem::path& path);
RgbImage load_ppm(std::istream& in, const std::string& name = "<stream>");
void save_ppm(const RgbImage& image, const std::filesystem::path& path);
void save_ppm(const RgbImage& image, std::ostream& out);

// --- Raster primitives -------------------------------------------------------

// Applies the RGB->class table to every pixel (6 bits per channel).
ClassMap classify(const RgbImage& image, const ColorLut& lut);

// Rec.601 luma, scaled to [0,1].
GrayImage luminance(const RgbImage& image);

// Central differences; valid on interior pixels only (1 <= x <= w-2 etc).
// Throws std::out_of_range when asked for a border pixel.
std::array<double, 2> gradient_at(const GrayImage& image, int x, int y);

enum class MorphOp { Erode, Dilate, Open, Close };

// Binary morphology with a square structuring element of side 2*radius+1.
// Any nonzero input value counts as foreground; output values are 0/1.
// Pixels outside the image are background.
ClassMap morph(const ClassMap& mask, MorphOp op, int radius);

// Binary mask of one class (1 where map == cls).
ClassMap class_mask(const ClassMap& map, std::uint16_t cls);

// --- Connected components ----------------------------------------------------

struct ComponentAnalysis {
    std::vector<Region> regions;     // every non-background component
    std::vector<std::int32_t> labels;  // per-pixel region label, 0 = background
    int width = 0;
    int height = 0;
};

// Labels every 8-connected non-background component and traces each outer
// contour. Labels are assigned in raster-scan order starting at 1.
ComponentAnalysis analyze_components(const ClassMap& map);

// Components with pixel_count >= min_size, background excluded.
std::vector<Region> connected_components(const ClassMap& map, int min_size = 25);

}  // namespace balltrack
