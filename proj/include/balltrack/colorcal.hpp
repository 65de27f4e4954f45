#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "balltrack/color_lut.hpp"
#include "balltrack/detect.hpp"
#include "balltrack/image.hpp"

namespace balltrack {

// Chroma pair: CIE 1976 UCS chromaticity (u', v') of the pixel, computed
// through linearized sRGB -> XYZ. Luminance cancels out of the coordinates,
// which is what makes the segmentation robust to shading. Achromatic input
// (including black) maps to the D65 white point.
struct Chroma {
    double alpha = 0.0;  // u'
    double beta = 0.0;   // v'
};

Chroma rgb_to_chroma(std::uint8_t r, std::uint8_t g, std::uint8_t b);
Chroma rgb_to_chroma(double r, double g, double b);  // components in [0,255]

// Fixed chroma window covering the sRGB gamut, quantized to the 64x64
// histogram grid. One "chroma unit" is one grid cell.
inline constexpr double kChromaMin = 0.0;
inline constexpr double kChromaMax = 0.7;
inline constexpr int kChromaBins = 64;
inline constexpr double kChromaUnit = (kChromaMax - kChromaMin) / kChromaBins;

// Continuous grid coordinates in [0, 64).
std::array<double, 2> chroma_to_grid(Chroma c);
// Clamped integer bin.
std::array<int, 2> chroma_bin(Chroma c);

// Per-class 2D histogram of chroma samples.
struct ChromaDistribution {
    std::uint16_t class_index = 0;
    std::array<std::uint32_t, static_cast<std::size_t>(kChromaBins) * kChromaBins> counts{};

    std::uint32_t& at(int a, int b) { return counts[static_cast<std::size_t>(b) * kChromaBins + a]; }
    std::uint32_t at(int a, int b) const {
        return counts[static_cast<std::size_t>(b) * kChromaBins + a];
    }
    std::uint64_t total() const;
};

// Mean-shift filtering in joint (x, y, chroma) space with a flat kernel,
// luminance ignored. Bandwidths: pixels and chroma units. Converged modes are
// grouped by chroma alone, so equal-colored areas share a label regardless of
// position. Labels start at 1 in scan order of first appearance.
ClassMap meanshift_segment(const RgbImage& image, double spatial_bw, double chroma_bw);

struct CalibParams {
    double spatial_bandwidth = 8.0;  // pixels
    double chroma_bandwidth = 8.0;   // chroma units
    int min_region_size = 200;       // candidate regions smaller than this are ignored
    double fit_ratio_threshold = 0.5;  // Q_c relative to the circular baseline
    int closing_radius = 1;          // chroma histogram closing
    int interior_margin = 1;         // pixels shaved off the circle when sampling
    int max_classes = 8;
    VoteParams vote;
    std::uint64_t seed = 1;          // voting seed for the fit check
};

struct RegionFitReport {
    int region_label = 0;
    std::uint16_t segment_class = 0;
    int pixel_count = 0;
    std::optional<VoteResult> vote;
    double fit_ratio = 0.0;
    bool accepted = false;
};

struct CalibrationResult {
    ColorLut lut;
    std::vector<RegionFitReport> regions;
    std::vector<std::uint64_t> class_sample_counts;  // index 0 unused
};

// Offline pipeline: mean-shift segmentation, component analysis, circularity
// check against the self-calibrated baseline, chroma accumulation per color,
// histogram closing, and LUT projection.
// Throws CalibrationError when no circular region is found.
CalibrationResult calibrate(const RgbImage& image, const CalibParams& params);

// Test/bench shortcut: classifies every LUT cell whose chroma lies within
// `radius_units` of one of the given colors. Nearest color wins.
ColorLut make_chroma_lut(std::span<const std::array<std::uint8_t, 3>> colors,
                         double radius_units = 6.0);

}  // namespace balltrack
