#include "balltrack/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace balltrack {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("image dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

RgbImage::RgbImage(int width, int height, RgbPixel fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

ClassMap::ClassMap(int width, int height, std::uint16_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    classes_.assign(static_cast<std::size_t>(width) * height, fill);
}

ClassMap classify(const RgbImage& image, const ColorLut& lut) {
    ClassMap out(image.width(), image.height());
    auto src = image.pixels();
    auto dst = out.classes();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = lut.lookup(src[i].r, src[i].g, src[i].b);
    }
    return out;
}

GrayImage luminance(const RgbImage& image) {
    GrayImage out(image.width(), image.height());
    auto src = image.pixels();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = (0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b) / 255.0;
    }
    return out;
}

std::array<double, 2> gradient_at(const GrayImage& image, int x, int y) {
    if (x < 1 || x > image.width() - 2 || y < 1 || y > image.height() - 2) {
        throw std::out_of_range("gradient_at(" + std::to_string(x) + "," + std::to_string(y) +
                                "): outside the interior of a " + std::to_string(image.width()) +
                                "x" + std::to_string(image.height()) + " image");
    }
    return {(image.at(x + 1, y) - image.at(x - 1, y)) / 2.0,
            (image.at(x, y + 1) - image.at(x, y - 1)) / 2.0};
}

namespace {

// Separable min/max filter with a square window, done as sliding foreground
// counts so the cost per pixel is constant in the radius. Outside the image
// counts as background: erosion needs the full window set, dilation any pixel.
ClassMap window_filter(const ClassMap& mask, int radius, bool take_max) {
    const int w = mask.width();
    const int h = mask.height();
    const int window = 2 * radius + 1;
    ClassMap tmp(w, h);
    ClassMap out(w, h);
    auto src = mask.classes();
    auto mid = tmp.classes();
    auto dst = out.classes();

    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        int count = 0;
        for (int x = 0; x < std::min(radius, w); ++x) {
            count += src[row + x] != 0;
        }
        for (int x = 0; x < w; ++x) {
            const int enter = x + radius;
            if (enter < w) {
                count += src[row + enter] != 0;
            }
            mid[row + x] = take_max ? (count > 0) : (count == window);
            const int leave = x - radius;
            if (leave >= 0) {
                count -= src[row + leave] != 0;
            }
        }
    }
    for (int x = 0; x < w; ++x) {
        int count = 0;
        for (int y = 0; y < std::min(radius, h); ++y) {
            count += mid[static_cast<std::size_t>(y) * w + x] != 0;
        }
        for (int y = 0; y < h; ++y) {
            const int enter = y + radius;
            if (enter < h) {
                count += mid[static_cast<std::size_t>(enter) * w + x] != 0;
            }
            dst[static_cast<std::size_t>(y) * w + x] = take_max ? (count > 0) : (count == window);
            const int leave = y - radius;
            if (leave >= 0) {
                count -= mid[static_cast<std::size_t>(leave) * w + x] != 0;
            }
        }
    }
    return out;
}

}  // namespace

ClassMap morph(const ClassMap& mask, MorphOp op, int radius) {
    if (radius < 1) {
        throw std::invalid_argument("morph radius must be >= 1");
    }
    switch (op) {
        case MorphOp::Erode:
            return window_filter(mask, radius, /*take_max=*/false);
        case MorphOp::Dilate:
            return window_filter(mask, radius, /*take_max=*/true);
        case MorphOp::Open:
            return morph(morph(mask, MorphOp::Erode, radius), MorphOp::Dilate, radius);
        case MorphOp::Close:
            return morph(morph(mask, MorphOp::Dilate, radius), MorphOp::Erode, radius);
    }
    throw std::invalid_argument("unknown morphological operation");
}

ClassMap class_mask(const ClassMap& map, std::uint16_t cls) {
    ClassMap out(map.width(), map.height());
    auto src = map.classes();
    auto dst = out.classes();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] == cls ? 1 : 0;
    }
    return out;
}

namespace {

// Moore neighborhood in clockwise order starting East (screen coordinates,
// y grows downward).
constexpr std::array<std::array<int, 2>, 8> kMoore = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1},
}};

// Outer contour by Moore-neighbor tracing. `inside` tests component
// membership. Start must be the component's first pixel in raster-scan order
// (its West neighbor is guaranteed outside). Stops when the walk is about to
// leave the start pixel in its original direction (Jacob's criterion), which
// also handles contours that pass through the start more than once.
template <typename Inside>
std::vector<std::array<int, 2>> trace_contour(int start_x, int start_y, Inside inside) {
    std::vector<std::array<int, 2>> contour;
    contour.push_back({start_x, start_y});

    int cx = start_x;
    int cy = start_y;
    int backtrack = 4;  // direction from current pixel to the prior outside pixel (West)
    int first_move = -1;

    while (true) {
        int dir = -1;
        for (int step = 1; step <= 8; ++step) {
            const int d = (backtrack + step) % 8;
            const int nx = cx + kMoore[d][0];
            const int ny = cy + kMoore[d][1];
            if (inside(nx, ny)) {
                dir = d;
                break;
            }
        }
        if (dir < 0) {
            break;  // isolated pixel
        }
        if (first_move < 0) {
            first_move = dir;
        } else if (cx == start_x && cy == start_y && dir == first_move) {
            break;  // full cycle: leaving the start the same way again
        }
        cx += kMoore[dir][0];
        cy += kMoore[dir][1];
        // The neighbor probed just before the hit is the new backtrack pixel;
        // relative to the new position it sits two ring steps back.
        backtrack = ((dir & ~1) + 6) % 8;
        contour.push_back({cx, cy});
        if (contour.size() > static_cast<std::size_t>(1) << 24) {
            throw std::logic_error("contour tracing did not terminate");
        }
    }
    // The walk ends by re-entering the start pixel; drop that closing duplicate.
    if (contour.size() > 1 && contour.back() == contour.front()) {
        contour.pop_back();
    }
    return contour;
}

}  // namespace

ComponentAnalysis analyze_components(const ClassMap& map) {
    const int w = map.width();
    const int h = map.height();
    ComponentAnalysis result;
    result.width = w;
    result.height = h;
    result.labels.assign(static_cast<std::size_t>(w) * h, 0);

    auto label_at = [&](int x, int y) -> std::int32_t& {
        return result.labels[static_cast<std::size_t>(y) * w + x];
    };

    std::vector<std::array<int, 2>> queue;
    std::int32_t next_label = 1;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint16_t cls = map.at(x, y);
            if (cls == 0 || label_at(x, y) != 0) {
                continue;
            }
            const std::int32_t label = next_label++;
            Region region;
            region.label = label;
            region.class_index = cls;
            region.min_x = region.max_x = x;
            region.min_y = region.max_y = y;

            queue.clear();
            queue.push_back({x, y});
            label_at(x, y) = label;
            std::size_t head = 0;
            while (head < queue.size()) {
                const auto [px, py] = queue[head++];
                ++region.pixel_count;
                region.min_x = std::min(region.min_x, px);
                region.max_x = std::max(region.max_x, px);
                region.min_y = std::min(region.min_y, py);
                region.max_y = std::max(region.max_y, py);
                for (const auto& d : kMoore) {
                    const int nx = px + d[0];
                    const int ny = py + d[1];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) {
                        continue;
                    }
                    if (map.at(nx, ny) == cls && label_at(nx, ny) == 0) {
                        label_at(nx, ny) = label;
                        queue.push_back({nx, ny});
                    }
                }
            }

            region.boundary = trace_contour(x, y, [&](int bx, int by) {
                return bx >= 0 && bx < w && by >= 0 && by < h && label_at(bx, by) == label;
            });
            result.regions.push_back(std::move(region));
        }
    }
    return result;
}

std::vector<Region> connected_components(const ClassMap& map, int min_size) {
    ComponentAnalysis analysis = analyze_components(map);
    std::vector<Region> out;
    for (auto& region : analysis.regions) {
        if (region.pixel_count >= min_size) {
            out.push_back(std::move(region));
        }
    }
    return out;
}

}  // namespace balltrack
