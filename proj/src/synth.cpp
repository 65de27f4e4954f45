#include "balltrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "balltrack/error.hpp"

namespace balltrack {

namespace {

struct DiskGeometry {
    Vec2 center;
    double radius2 = 0.0;
    RgbPixel color;
    bool occluded = false;
    Vec2 cut_normal;          // unit normal of the occluding half-plane
    double cut_offset = 0.0;  // points with (p-c).n >= offset are covered
    RgbPixel cut_color;
};

struct RectGeometry {
    double x0, y0, x1, y1;
    RgbPixel color;
};

std::uint8_t clamp_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

}  // namespace

RenderResult render(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) {
        throw std::invalid_argument("scene dimensions must be positive");
    }

    std::vector<DiskGeometry> disks;
    std::vector<RectGeometry> rects;
    std::vector<int> object_kind;  // 0 = disk, 1 = rect, in painter order
    std::vector<std::size_t> object_index;
    std::vector<Circle> truth;

    for (const ObjectSpec& object : spec.objects) {
        if (const auto* disk = std::get_if<DiskSpec>(&object)) {
            if (disk->radius <= 0.0) {
                throw std::invalid_argument("disk radius must be positive");
            }
            DiskGeometry g;
            g.center = disk->center;
            g.radius2 = disk->radius * disk->radius;
            g.color = disk->color;
            if (disk->occlusion && disk->occlusion->boundary_fraction > 0.0) {
                const OcclusionSpec& occ = *disk->occlusion;
                if (occ.boundary_fraction >= 1.0) {
                    throw std::invalid_argument("occluded boundary fraction must be below 1");
                }
                const double angle = occ.angle_deg * std::numbers::pi / 180.0;
                g.occluded = true;
                g.cut_normal = {std::cos(angle), std::sin(angle)};
                // A cut at distance r*cos(pi*fraction) hides exactly that
                // fraction of the circle boundary.
                g.cut_offset = disk->radius * std::cos(std::numbers::pi * occ.boundary_fraction);
                g.cut_color = occ.color.value_or(spec.background);
            }
            object_kind.push_back(0);
            object_index.push_back(disks.size());
            disks.push_back(g);
            truth.push_back({disk->center.x, disk->center.y, disk->radius});
        } else {
            const RectSpec& rect = std::get<RectSpec>(object);
            object_kind.push_back(1);
            object_index.push_back(rects.size());
            rects.push_back({rect.x0, rect.y0, rect.x1, rect.y1, rect.color});
        }
    }

    RgbImage image(spec.width, spec.height, spec.background);

    // 4x4 supersampled coverage; the topmost covering object wins per sample.
    // Pixel (px, py) integrates over [px-0.5, px+0.5), so integer coordinates
    // sit at pixel centers, matching the voting and gradient conventions.
    constexpr int kGrid = 4;
    constexpr double kStep = 1.0 / kGrid;
    for (int py = 0; py < spec.height; ++py) {
        for (int px = 0; px < spec.width; ++px) {
            int sum_r = 0, sum_g = 0, sum_b = 0;
            for (int sy = 0; sy < kGrid; ++sy) {
                const double y = py - 0.5 + (sy + 0.5) * kStep;
                for (int sx = 0; sx < kGrid; ++sx) {
                    const double x = px - 0.5 + (sx + 0.5) * kStep;
                    RgbPixel color = spec.background;
                    for (std::size_t k = object_kind.size(); k-- > 0;) {
                        bool hit = false;
                        if (object_kind[k] == 0) {
                            const DiskGeometry& d = disks[object_index[k]];
                            const double dx = x - d.center.x;
                            const double dy = y - d.center.y;
                            if (dx * dx + dy * dy <= d.radius2) {
                                hit = true;
                                if (d.occluded &&
                                    dx * d.cut_normal.x + dy * d.cut_normal.y >= d.cut_offset) {
                                    color = d.cut_color;
                                } else {
                                    color = d.color;
                                }
                            }
                        } else {
                            const RectGeometry& r = rects[object_index[k]];
                            if (x >= r.x0 && x < r.x1 && y >= r.y0 && y < r.y1) {
                                hit = true;
                                color = r.color;
                            }
                        }
                        if (hit) {
                            break;
                        }
                    }
                    sum_r += color.r;
                    sum_g += color.g;
                    sum_b += color.b;
                }
            }
            constexpr int kSamples = kGrid * kGrid;
            image.at(px, py) = {static_cast<std::uint8_t>((sum_r + kSamples / 2) / kSamples),
                                static_cast<std::uint8_t>((sum_g + kSamples / 2) / kSamples),
                                static_cast<std::uint8_t>((sum_b + kSamples / 2) / kSamples)};
        }
    }

    // Luminance ramp: linear gain from 1-ramp at the left edge to 1+ramp at
    // the right, before noise.
    if (spec.luminance_ramp != 0.0) {
        const double denom = spec.width > 1 ? spec.width - 1.0 : 1.0;
        for (int py = 0; py < spec.height; ++py) {
            for (int px = 0; px < spec.width; ++px) {
                const double gain = 1.0 + spec.luminance_ramp * (2.0 * px / denom - 1.0);
                RgbPixel& p = image.at(px, py);
                p = {clamp_channel(std::round(p.r * gain)), clamp_channel(std::round(p.g * gain)),
                     clamp_channel(std::round(p.b * gain))};
            }
        }
    }

    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (RgbPixel& p : image.pixels()) {
            p = {clamp_channel(p.r + noise(rng)), clamp_channel(p.g + noise(rng)),
                 clamp_channel(p.b + noise(rng))};
        }
    }

    return {std::move(image), std::move(truth)};
}

namespace {

RgbPixel parse_color(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3) {
        throw FormatError("scene " + what + " must be a [r,g,b] array");
    }
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 255) {
            throw FormatError("scene " + what + " channels must be integers in [0,255]");
        }
    }
    return {j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>()};
}

}  // namespace

SceneSpec parse_scene(const std::string& json_text, const std::string& name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(name + ": " + e.what());
    }
    try {
        SceneSpec spec;
        spec.width = j.value("width", spec.width);
        spec.height = j.value("height", spec.height);
        if (j.contains("background")) {
            spec.background = parse_color(j["background"], "background");
        }
        spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
        spec.luminance_ramp = j.value("luminance_ramp", spec.luminance_ramp);
        spec.seed = j.value("seed", spec.seed);
        for (const auto& obj : j.value("objects", nlohmann::json::array())) {
            const std::string shape = obj.value("shape", "");
            if (shape == "disk") {
                DiskSpec disk;
                disk.center = {obj.at("center").at(0).get<double>(),
                               obj.at("center").at(1).get<double>()};
                disk.radius = obj.at("radius").get<double>();
                disk.color = parse_color(obj.at("color"), "disk color");
                if (obj.contains("occlusion")) {
                    OcclusionSpec occ;
                    occ.boundary_fraction = obj["occlusion"].value("fraction", 0.0);
                    occ.angle_deg = obj["occlusion"].value("angle_deg", 0.0);
                    if (obj["occlusion"].contains("color")) {
                        occ.color = parse_color(obj["occlusion"]["color"], "occlusion color");
                    }
                    disk.occlusion = occ;
                }
                spec.objects.push_back(disk);
            } else if (shape == "rect") {
                RectSpec rect;
                rect.x0 = obj.at("min").at(0).get<double>();
                rect.y0 = obj.at("min").at(1).get<double>();
                rect.x1 = obj.at("max").at(0).get<double>();
                rect.y1 = obj.at("max").at(1).get<double>();
                rect.color = parse_color(obj.at("color"), "rect color");
                spec.objects.push_back(rect);
            } else {
                throw FormatError(name + ": object shape must be \"disk\" or \"rect\"");
            }
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(name + ": " + e.what());
    }
}

SceneSpec load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scene(buffer.str(), path.string());
}

std::string scene_to_json(const SceneSpec& spec) {
    nlohmann::json j;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["background"] = {spec.background.r, spec.background.g, spec.background.b};
    j["noise_sigma"] = spec.noise_sigma;
    j["luminance_ramp"] = spec.luminance_ramp;
    j["seed"] = spec.seed;
    j["objects"] = nlohmann::json::array();
    for (const ObjectSpec& object : spec.objects) {
        nlohmann::json o;
        if (const auto* disk = std::get_if<DiskSpec>(&object)) {
            o["shape"] = "disk";
            o["center"] = {disk->center.x, disk->center.y};
            o["radius"] = disk->radius;
            o["color"] = {disk->color.r, disk->color.g, disk->color.b};
            if (disk->occlusion) {
                o["occlusion"]["fraction"] = disk->occlusion->boundary_fraction;
                o["occlusion"]["angle_deg"] = disk->occlusion->angle_deg;
                if (disk->occlusion->color) {
                    o["occlusion"]["color"] = {disk->occlusion->color->r,
                                               disk->occlusion->color->g,
                                               disk->occlusion->color->b};
                }
            }
        } else {
            const RectSpec& rect = std::get<RectSpec>(object);
            o["shape"] = "rect";
            o["min"] = {rect.x0, rect.y0};
            o["max"] = {rect.x1, rect.y1};
            o["color"] = {rect.color.r, rect.color.g, rect.color.b};
        }
        j["objects"].push_back(o);
    }
    return j.dump(2);
}

ProjectedRender render_projected(const BallPose& ball, const CameraIntrinsics& intr,
                                 RgbPixel color, RgbPixel background, double noise_sigma,
                                 std::uint64_t seed) {
    intr.validate();
    if (ball.ball_radius <= 0.0) {
        throw std::invalid_argument("projected ball needs a positive radius");
    }
    if (ball.z <= ball.ball_radius) {
        throw std::invalid_argument("ball must be fully in front of the camera");
    }
    const double f = intr.focal();
    const Circle projected{intr.cx + f * ball.x / ball.z, intr.cy + f * ball.y / ball.z,
                           f * ball.ball_radius /
                               std::sqrt(ball.z * ball.z - ball.ball_radius * ball.ball_radius)};

    SceneSpec spec;
    spec.width = intr.image_width;
    spec.height = intr.image_height;
    spec.background = background;
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    spec.objects.push_back(DiskSpec{{projected.cx, projected.cy}, projected.r, color, {}});
    RenderResult result = render(spec);
    return {std::move(result.image), projected};
}

void draw_circle(RgbImage& image, const Circle& c, RgbPixel color) {
    const int steps = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * c.r)));
    for (int i = 0; i < steps; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / steps;
        const int x = static_cast<int>(std::lround(c.cx + c.r * std::cos(angle)));
        const int y = static_cast<int>(std::lround(c.cy + c.r * std::sin(angle)));
        if (image.contains(x, y)) {
            image.at(x, y) = color;
        }
    }
}

void draw_cross(RgbImage& image, Vec2 center, int arm, RgbPixel color) {
    const int cx = static_cast<int>(std::lround(center.x));
    const int cy = static_cast<int>(std::lround(center.y));
    for (int d = -arm; d <= arm; ++d) {
        if (image.contains(cx + d, cy)) {
            image.at(cx + d, cy) = color;
        }
        if (image.contains(cx, cy + d)) {
            image.at(cx, cy + d) = color;
        }
    }
}

}  // namespace balltrack
