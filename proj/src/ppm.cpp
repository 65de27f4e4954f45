#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "balltrack/error.hpp"
#include "balltrack/image.hpp"

namespace balltrack {

static_assert(sizeof(RgbPixel) == 3, "pixel rows are read and written as raw bytes");

namespace {

[[noreturn]] void fail(const std::string& name, std::streamoff offset, const std::string& what) {
    throw FormatError(name + ": " + what + " (byte " + std::to_string(offset) + ")");
}

// Reads one unsigned decimal header token, skipping whitespace and
// '#'-to-end-of-line comments.
int read_header_value(std::istream& in, const std::string& name, const char* what) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        }
        c = in.get();
    }
    if (c == EOF) {
        fail(name, in.tellg() == std::streampos(-1) ? 0 : std::streamoff(in.tellg()),
             std::string("unexpected end of header while reading ") + what);
    }
    if (!std::isdigit(c)) {
        fail(name, std::streamoff(in.tellg()) - 1,
             std::string("expected digit for ") + what + ", got '" + static_cast<char>(c) + "'");
    }
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<int>::max()) {
            fail(name, std::streamoff(in.tellg()) - 1, std::string(what) + " out of range");
        }
        c = in.get();
    }
    if (c != EOF) {
        in.unget();
    }
    return static_cast<int>(value);
}

}  // namespace

RgbImage load_ppm(std::istream& in, const std::string& name) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '6') {
        fail(name, 0, "not a binary PPM (P6) file");
    }
    const int width = read_header_value(in, name, "width");
    const int height = read_header_value(in, name, "height");
    const int maxval = read_header_value(in, name, "maxval");
    if (width <= 0 || height <= 0) {
        fail(name, std::streamoff(in.tellg()), "non-positive image dimensions");
    }
    if (maxval != 255) {
        fail(name, std::streamoff(in.tellg()),
             "unsupported maxval " + std::to_string(maxval) + " (only 255)");
    }
    // Exactly one whitespace byte separates the header from the payload.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
        fail(name, std::streamoff(in.tellg()) - 1, "missing whitespace before pixel data");
    }

    RgbImage image(width, height);
    const std::size_t payload = static_cast<std::size_t>(width) * height * 3;
    const std::streamoff data_start = in.tellg();
    in.read(reinterpret_cast<char*>(image.pixels().data()), static_cast<std::streamsize>(payload));
    if (static_cast<std::size_t>(in.gcount()) != payload) {
        fail(name, data_start + in.gcount(),
             "truncated pixel data: expected " + std::to_string(payload) + " bytes, got " +
                 std::to_string(in.gcount()));
    }
    return image;
}

RgbImage load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return load_ppm(in, path.string());
}

void save_ppm(const RgbImage& image, std::ostream& out) {
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels().data()),
              static_cast<std::streamsize>(image.pixels().size() * 3));
    if (!out) {
        throw IoError("failed writing PPM payload");
    }
}

void save_ppm(const RgbImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    save_ppm(image, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace balltrack
