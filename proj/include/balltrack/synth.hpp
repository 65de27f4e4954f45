#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "balltrack/camera.hpp"
#include "balltrack/geometry.hpp"
#include "balltrack/image.hpp"

namespace balltrack {

// Covers part of a disk with a straight cut so that exactly
// `boundary_fraction` of the circle boundary is hidden. The cut half-plane
// faces `angle_deg`; the covered area is painted `color` (scene background
// when unset), which makes "occluded by background" scenes one-liners.
struct OcclusionSpec {
    double boundary_fraction = 0.0;  // in [0,1)
    double angle_deg = 0.0;
    std::optional<RgbPixel> color;
};

struct DiskSpec {
    Vec2 center;
    double radius = 0.0;
    RgbPixel color;
    std::optional<OcclusionSpec> occlusion;
};

struct RectSpec {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // half-open box
    RgbPixel color;
};

using ObjectSpec = std::variant<DiskSpec, RectSpec>;

struct SceneSpec {
    int width = 640;
    int height = 480;
    RgbPixel background{64, 64, 64};
    std::vector<ObjectSpec> objects;  // painter's order
    double noise_sigma = 0.0;         // additive Gaussian, 8-bit units
    double luminance_ramp = 0.0;      // gain 1 +/- ramp across the width
    std::uint64_t seed = 0;
};

struct RenderResult {
    RgbImage image;
    std::vector<Circle> truth;  // one per disk, in object order
};

// Deterministic render: 4x4 supersampled coverage, then the luminance ramp,
// then seeded per-channel noise, clamped to 8 bits.
RenderResult render(const SceneSpec& spec);

// JSON scene file.
SceneSpec load_scene(const std::filesystem::path& path);
SceneSpec parse_scene(const std::string& json_text, const std::string& name = "<string>");
std::string scene_to_json(const SceneSpec& spec);

struct ProjectedRender {
    RgbImage image;
    Circle truth;
};

// Projects a sphere through the pinhole model and renders the resulting disk:
// center (cx + f*x/z, cy + f*y/z), apparent radius f*R/sqrt(z^2 - R^2).
// Throws std::invalid_argument when the ball is not fully in front of the
// camera (z <= ball radius).
ProjectedRender render_projected(const BallPose& ball, const CameraIntrinsics& intr,
                                 RgbPixel color, RgbPixel background = {64, 64, 64},
                                 double noise_sigma = 0.0, std::uint64_t seed = 0);

// Overlay helpers for the CLI's annotated output.
void draw_circle(RgbImage& image, const Circle& c, RgbPixel color);
void draw_cross(RgbImage& image, Vec2 center, int arm, RgbPixel color);

}  // namespace balltrack
