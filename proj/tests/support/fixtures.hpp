// Shared scene builders and filesystem helpers for the test binaries.
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "balltrack/colorcal.hpp"
#include "balltrack/image.hpp"
#include "balltrack/synth.hpp"

namespace testsupport {

inline constexpr balltrack::RgbPixel kRed{200, 30, 30};
inline constexpr balltrack::RgbPixel kBlue{40, 60, 210};
inline constexpr balltrack::RgbPixel kGray{64, 64, 64};

inline balltrack::ColorLut red_lut() {
    const std::array<std::uint8_t, 3> color{kRed.r, kRed.g, kRed.b};
    return balltrack::make_chroma_lut(std::vector{color});
}

inline balltrack::SceneSpec one_disk_scene(double cx, double cy, double r, int width = 640,
                                           int height = 480) {
    balltrack::SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.background = kGray;
    spec.objects.push_back(balltrack::DiskSpec{{cx, cy}, r, kRed, {}});
    return spec;
}

// Filled digital disk in a ClassMap, for component/vote tests that bypass
// rendering.
inline balltrack::ClassMap disk_map(int width, int height, double cx, double cy, double r,
                                    std::uint16_t cls = 1) {
    balltrack::ClassMap map(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) {
                map.at(x, y) = cls;
            }
        }
    }
    return map;
}

inline balltrack::ClassMap square_map(int width, int height, int x0, int y0, int side,
                                      std::uint16_t cls = 1) {
    balltrack::ClassMap map(width, height);
    for (int y = y0; y < y0 + side; ++y) {
        for (int x = x0; x < x0 + side; ++x) {
            map.at(x, y) = cls;
        }
    }
    return map;
}

inline balltrack::RgbImage random_image(int width, int height, std::uint64_t seed) {
    balltrack::RgbImage image(width, height);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> channel(0, 255);
    for (auto& p : image.pixels()) {
        p = {static_cast<std::uint8_t>(channel(rng)), static_cast<std::uint8_t>(channel(rng)),
             static_cast<std::uint8_t>(channel(rng))};
    }
    return image;
}

// Self-cleaning unique temp directory.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("balltrack_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
