#include "balltrack/color_lut.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "balltrack/error.hpp"

namespace balltrack {

namespace {
constexpr char kMagic[4] = {'C', 'L', 'U', 'T'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

ColorLut::ColorLut(std::uint16_t classes, std::vector<std::uint8_t> table)
    : classes_(classes), table_(std::move(table)) {
    if (table_.size() != kTableSize) {
        throw std::invalid_argument("color LUT table must have " + std::to_string(kTableSize) +
                                    " entries, got " + std::to_string(table_.size()));
    }
    for (std::uint8_t entry : table_) {
        if (entry > classes_) {
            throw std::invalid_argument("color LUT entry " + std::to_string(entry) +
                                        " exceeds class count " + std::to_string(classes_));
        }
    }
}

void save_lut(const ColorLut& lut, std::ostream& out) {
    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    out.put(static_cast<char>(lut.classes()));
    out.write(reinterpret_cast<const char*>(lut.table().data()),
              static_cast<std::streamsize>(ColorLut::kTableSize));
    if (!out) {
        throw IoError("failed writing color LUT");
    }
}

void save_lut(const ColorLut& lut, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    save_lut(lut, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

ColorLut load_lut(std::istream& in, const std::string& name) {
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != std::string(kMagic, 4)) {
        throw FormatError(name + ": bad color LUT magic");
    }
    const int version = in.get();
    if (version != kVersion) {
        throw FormatError(name + ": unsupported LUT version " + std::to_string(version));
    }
    const int classes = in.get();
    if (classes < 0) {
        throw FormatError(name + ": truncated LUT header");
    }
    std::vector<std::uint8_t> table(ColorLut::kTableSize);
    in.read(reinterpret_cast<char*>(table.data()),
            static_cast<std::streamsize>(ColorLut::kTableSize));
    if (static_cast<std::size_t>(in.gcount()) != ColorLut::kTableSize) {
        throw FormatError(name + ": LUT table truncated (" + std::to_string(in.gcount()) + " of " +
                          std::to_string(ColorLut::kTableSize) + " bytes)");
    }
    if (in.peek() != std::istream::traits_type::eof()) {
        throw FormatError(name + ": trailing bytes after LUT table");
    }
    try {
        return ColorLut(static_cast<std::uint16_t>(classes), std::move(table));
    } catch (const std::invalid_argument& e) {
        throw FormatError(name + ": " + e.what());
    }
}

ColorLut load_lut(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return load_lut(in, path.string());
}

}  // namespace balltrack
