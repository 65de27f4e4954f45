#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace balltrack {

// Learned RGB -> class-index classifier: a 64x64x64 table indexed by the top
// 6 bits of each channel. Entry 0 means "not any learned color".
class ColorLut {
public:
    static constexpr int kBitsPerChannel = 6;
    static constexpr int kCells = 64;
    static constexpr std::size_t kTableSize = 64 * 64 * 64;

    ColorLut() : classes_(0), table_(kTableSize, 0) {}
    ColorLut(std::uint16_t classes, std::vector<std::uint8_t> table);

    std::uint16_t classes() const { return classes_; }

    static std::size_t cell_index(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        return (static_cast<std::size_t>(r >> 2) << 12) |
               (static_cast<std::size_t>(g >> 2) << 6) | static_cast<std::size_t>(b >> 2);
    }

    std::uint16_t lookup(std::uint8_t r, std::uint8_t g, std::uint8_t b) const {
        return table_[cell_index(r, g, b)];
    }

    // Direct cell access with 6-bit coordinates (r-major, b-minor).
    std::uint8_t& cell(int r6, int g6, int b6) {
        return table_[(static_cast<std::size_t>(r6) << 12) | (static_cast<std::size_t>(g6) << 6) |
                      static_cast<std::size_t>(b6)];
    }
    std::uint8_t cell(int r6, int g6, int b6) const {
        return table_[(static_cast<std::size_t>(r6) << 12) | (static_cast<std::size_t>(g6) << 6) |
                      static_cast<std::size_t>(b6)];
    }

    std::span<const std::uint8_t> table() const { return table_; }

    friend bool operator==(const ColorLut&, const ColorLut&) = default;

private:
    std::uint16_t classes_;
    std::vector<std::uint8_t> table_;
};

// On-disk format: magic "CLUT", version byte 1, class-count byte, then the
// 262144 class-index bytes r-major / b-minor.
void save_lut(const ColorLut& lut, const std::filesystem::path& path);
void save_lut(const ColorLut& lut, std::ostream& out);
ColorLut load_lut(const std::filesystem::path& path);
ColorLut load_lut(std::istream& in, const std::string& name = "<stream>");

}  // namespace balltrack
