#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "balltrack/error.hpp"
#include "balltrack/image.hpp"
#include "support/fixtures.hpp"

using namespace balltrack;
using namespace testsupport;

TEST_CASE("ppm: decodes a minimal P6 stream byte for byte") {
    const std::string data = std::string("P6\n2 1\n255\n") +
                             std::string("\xff\x00\x00\x00\x00\xff", 6);
    std::istringstream in(data);
    const RgbImage image = load_ppm(in);
    CHECK(image.width() == 2);
    CHECK(image.height() == 1);
    CHECK(image.at(0, 0) == RgbPixel{255, 0, 0});
    CHECK(image.at(1, 0) == RgbPixel{0, 0, 255});
}

TEST_CASE("ppm: header comments are skipped") {
    const std::string data = std::string("P6\n# a comment\n1 1\n255\n") + "\x01\x02\x03";
    std::istringstream in(data);
    const RgbImage image = load_ppm(in);
    CHECK(image.at(0, 0) == RgbPixel{1, 2, 3});
}

TEST_CASE("ppm: truncated payload reports the byte offset") {
    // Header claims 4x4 but only 3 pixels follow.
    const std::string data = std::string("P6\n4 4\n255\n") + std::string(9, '\x10');
    std::istringstream in(data);
    CHECK_THROWS_WITH_AS(load_ppm(in), doctest::Contains("truncated"), FormatError);
}

TEST_CASE("ppm: unsupported maxval is rejected") {
    std::istringstream in("P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00");
    CHECK_THROWS_WITH_AS(load_ppm(in), doctest::Contains("maxval"), FormatError);
}

TEST_CASE("ppm: bad magic is rejected") {
    std::istringstream in("P5\n1 1\n255\n\x00");
    CHECK_THROWS_AS(load_ppm(in), FormatError);
}

TEST_CASE("ppm: smallest canonical file") {
    RgbImage image(1, 1, {0, 0, 0});
    std::ostringstream out;
    save_ppm(image, out);
    CHECK(out.str() == std::string("P6\n1 1\n255\n") + std::string(3, '\0'));
}

TEST_CASE("ppm: unwritable path raises an I/O error") {
    const RgbImage image(1, 1);
    CHECK_THROWS_AS(save_ppm(image, "/nonexistent-dir/out.ppm"), IoError);
}

TEST_CASE("ppm: random images survive a save/load round trip bit-exactly") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        const int width = 1 + static_cast<int>(rng() % 40);
        const int height = 1 + static_cast<int>(rng() % 40);
        const RgbImage image = random_image(width, height, seed);

        std::ostringstream first;
        save_ppm(image, first);
        std::istringstream back(first.str());
        const RgbImage loaded = load_ppm(back);
        CHECK(loaded == image);

        // And resaving what was loaded reproduces the file byte-identically.
        std::ostringstream second;
        save_ppm(loaded, second);
        CHECK(first.str() == second.str());
    }
}

TEST_CASE("ppm: arbitrary byte garbage is rejected, never crashes") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t length = rng() % 64;
        std::string data;
        for (std::size_t i = 0; i < length; ++i) {
            data.push_back(static_cast<char>(rng() % 256));
        }
        if (trial % 3 == 0) {
            data = "P6" + data;  // bias toward plausible prefixes
        }
        std::istringstream in(data);
        try {
            const RgbImage image = load_ppm(in);
            CHECK(image.width() > 0);  // parsed something structurally valid
        } catch (const FormatError&) {
        } catch (const std::invalid_argument&) {
        }
    }
}

TEST_CASE("classify: all-black image and a zero LUT gives background everywhere") {
    const ColorLut lut;  // all zeros
    const RgbImage image(8, 8, {0, 0, 0});
    const ClassMap map = classify(image, lut);
    for (const auto v : map.classes()) {
        CHECK(v == 0);
    }
}

TEST_CASE("classify: a labeled LUT cell classifies its pixel") {
    std::vector<std::uint8_t> table(ColorLut::kTableSize, 0);
    table[ColorLut::cell_index(200, 30, 30)] = 1;
    const ColorLut lut(1, std::move(table));
    RgbImage image(2, 1, {0, 0, 0});
    image.at(1, 0) = {200, 30, 30};
    const ClassMap map = classify(image, lut);
    CHECK(map.at(0, 0) == 0);
    CHECK(map.at(1, 0) == 1);
}

TEST_CASE("classify: low two bits of each channel never matter") {
    std::vector<std::uint8_t> table(ColorLut::kTableSize, 0);
    table[ColorLut::cell_index(200, 30, 30)] = 1;
    const ColorLut lut(1, std::move(table));
    CHECK(lut.lookup(200, 30, 30) == lut.lookup(203, 29, 31));
    CHECK(lut.lookup(200, 30, 30) == lut.lookup(201, 28, 28));
}

TEST_CASE("components: filled 10x10 square has 100 pixels and a 36-pixel contour") {
    const ClassMap map = square_map(20, 20, 5, 5, 10);
    const auto regions = connected_components(map, 1);
    REQUIRE(regions.size() == 1);
    const Region& region = regions[0];
    CHECK(region.pixel_count == 100);
    CHECK(region.class_index == 1);
    CHECK(region.min_x == 5);
    CHECK(region.max_x == 14);

    // Brute-force border count of a filled square: pixels with a missing
    // 4-neighbor inside the square.
    CHECK(region.boundary.size() == 36);
    std::set<std::array<int, 2>> unique(region.boundary.begin(), region.boundary.end());
    CHECK(unique.size() == 36);
}

TEST_CASE("components: background-only map yields nothing") {
    const ClassMap map(16, 16);
    CHECK(connected_components(map, 1).empty());
}

TEST_CASE("components: diagonal touch merges under 8-connectivity") {
    ClassMap map(8, 8);
    map.at(2, 2) = 1;
    map.at(3, 3) = 1;
    const auto regions = connected_components(map, 1);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].pixel_count == 2);
}

TEST_CASE("components: min_size filters small blobs") {
    ClassMap map(16, 16);
    map.at(1, 1) = 1;
    for (int y = 8; y < 12; ++y) {
        for (int x = 8; x < 12; ++x) {
            map.at(x, y) = 1;
        }
    }
    const auto regions = connected_components(map, 4);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].pixel_count == 16);
}

TEST_CASE("components: regions partition the foreground") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        ClassMap map(24, 24);
        for (auto& v : map.classes()) {
            v = static_cast<std::uint16_t>(rng() % 3);  // classes 0..2
        }
        const ComponentAnalysis analysis = analyze_components(map);
        std::size_t labeled = 0;
        for (std::size_t i = 0; i < map.classes().size(); ++i) {
            if (map.classes()[i] == 0) {
                CHECK(analysis.labels[i] == 0);
            } else {
                CHECK(analysis.labels[i] > 0);
                ++labeled;
            }
        }
        std::size_t total = 0;
        for (const Region& region : analysis.regions) {
            total += static_cast<std::size_t>(region.pixel_count);
        }
        CHECK(total == labeled);
    }
}

TEST_CASE("components: boundary chains close with Chebyshev steps of one") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        ClassMap map(32, 32);
        for (auto& v : map.classes()) {
            v = (rng() % 4 == 0) ? 1 : 0;
        }
        for (const Region& region : connected_components(map, 1)) {
            REQUIRE(!region.boundary.empty());
            for (std::size_t i = 0; i < region.boundary.size(); ++i) {
                const auto& a = region.boundary[i];
                const auto& b = region.boundary[(i + 1) % region.boundary.size()];
                const int step = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
                CHECK(step <= 1);
                CHECK(a[0] >= region.min_x);
                CHECK(a[0] <= region.max_x);
                CHECK(a[1] >= region.min_y);
                CHECK(a[1] <= region.max_y);
            }
        }
    }
}

TEST_CASE("morph: closing fills a one-pixel hole") {
    ClassMap disk = disk_map(16, 16, 8, 8, 4.2);
    disk.at(8, 8) = 0;
    const ClassMap closed = morph(disk, MorphOp::Close, 1);
    CHECK(closed.at(8, 8) == 1);
}

TEST_CASE("morph: opening removes an isolated pixel") {
    ClassMap map(9, 9);
    map.at(4, 4) = 1;
    const ClassMap opened = morph(map, MorphOp::Open, 1);
    for (const auto v : opened.classes()) {
        CHECK(v == 0);
    }
}

TEST_CASE("morph: closing is idempotent on random masks") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        ClassMap mask(20, 20);
        for (auto& v : mask.classes()) {
            v = (rng() % 3 == 0) ? 1 : 0;
        }
        const ClassMap once = morph(mask, MorphOp::Close, 1);
        const ClassMap twice = morph(once, MorphOp::Close, 1);
        CHECK(once == twice);
    }
}

TEST_CASE("morph: erosion is the dual of dilation away from the border") {
    std::mt19937_64 rng(5);
    const int radius = 1;
    for (int trial = 0; trial < 10; ++trial) {
        ClassMap mask(20, 20);
        ClassMap complement(20, 20);
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 20; ++x) {
                const std::uint16_t v = (rng() % 2 == 0) ? 1 : 0;
                mask.at(x, y) = v;
                complement.at(x, y) = v ? 0 : 1;
            }
        }
        const ClassMap eroded = morph(mask, MorphOp::Erode, radius);
        const ClassMap dual = morph(complement, MorphOp::Dilate, radius);
        for (int y = radius; y < 20 - radius; ++y) {
            for (int x = radius; x < 20 - radius; ++x) {
                CHECK(eroded.at(x, y) == (dual.at(x, y) ? 0 : 1));
            }
        }
    }
}

TEST_CASE("luminance: primaries follow the Rec.601 weights") {
    RgbImage image(3, 1);
    image.at(0, 0) = {255, 255, 255};
    image.at(1, 0) = {0, 0, 0};
    image.at(2, 0) = {255, 0, 0};
    const GrayImage gray = luminance(image);
    CHECK(gray.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gray.at(1, 0) == doctest::Approx(0.0));
    CHECK(gray.at(2, 0) == doctest::Approx(0.299).epsilon(1e-12));
}

TEST_CASE("gradient: horizontal ramp has slope 1/width and zero vertical term") {
    const int width = 16;
    GrayImage image(width, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < width; ++x) {
            image.at(x, y) = static_cast<double>(x) / width;
        }
    }
    const auto [gx, gy] = gradient_at(image, 7, 4);
    CHECK(gx == doctest::Approx(1.0 / width).epsilon(1e-12));
    CHECK(gy == doctest::Approx(0.0));
}

TEST_CASE("gradient: constant image has zero gradient") {
    const GrayImage image(8, 8, 0.5);
    const auto [gx, gy] = gradient_at(image, 3, 3);
    CHECK(gx == 0.0);
    CHECK(gy == 0.0);
}

TEST_CASE("gradient: central differences are exact on quadratics") {
    GrayImage image(12, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 12; ++x) {
            image.at(x, y) = static_cast<double>(x) * x;
        }
    }
    const auto [gx, gy] = gradient_at(image, 5, 2);
    CHECK(gx == doctest::Approx(10.0).epsilon(1e-12));  // d/dx x^2 = 2x
    CHECK(gy == 0.0);
}

TEST_CASE("gradient: border pixels are a contract violation") {
    const GrayImage image(8, 8, 0.0);
    CHECK_THROWS_AS(gradient_at(image, 0, 4), std::out_of_range);
    CHECK_THROWS_AS(gradient_at(image, 7, 4), std::out_of_range);
    CHECK_THROWS_AS(gradient_at(image, 4, 0), std::out_of_range);
}

TEST_CASE("gradient: matches an independent finite-difference oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        GrayImage image(10, 10);
        for (auto& v : image.values()) {
            v = value(rng);
        }
        const int x = 1 + static_cast<int>(rng() % 8);
        const int y = 1 + static_cast<int>(rng() % 8);
        const auto [gx, gy] = gradient_at(image, x, y);
        const double ox = (image.at(x + 1, y) - image.at(x - 1, y)) / 2.0;
        const double oy = (image.at(x, y + 1) - image.at(x, y - 1)) / 2.0;
        CHECK(gx == ox);
        CHECK(gy == oy);
    }
}
