#include "balltrack/camera.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "balltrack/config.hpp"

namespace balltrack {

void CameraIntrinsics::validate() const {
    if (fx <= 0.0 || fy <= 0.0) {
        throw std::invalid_argument("focal lengths must be positive");
    }
    if (image_width <= 0 || image_height <= 0) {
        throw std::invalid_argument("image dimensions must be positive");
    }
    if (cx < 0.0 || cx >= image_width || cy < 0.0 || cy >= image_height) {
        throw std::invalid_argument("principal point must lie inside the image");
    }
}

UndistortMap::UndistortMap(int width, int height, std::vector<Vec2> corrected)
    : width_(width), height_(height), table_(std::move(corrected)) {
    if (table_.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("undistortion table size does not match its dimensions");
    }
}

UndistortMap build_undistort_map(const CameraIntrinsics& intr) {
    intr.validate();
    std::vector<Vec2> table;
    table.reserve(static_cast<std::size_t>(intr.image_width) * intr.image_height);
    for (int v = 0; v < intr.image_height; ++v) {
        const double yn = (v - intr.cy) / intr.fy;
        for (int u = 0; u < intr.image_width; ++u) {
            const double xn = (u - intr.cx) / intr.fx;
            const double r2 = xn * xn + yn * yn;
            const double scale = 1.0 + intr.k1 * r2 + intr.k2 * r2 * r2;
            table.push_back({intr.cx + intr.fx * xn * scale, intr.cy + intr.fy * yn * scale});
        }
    }
    return UndistortMap(intr.image_width, intr.image_height, std::move(table));
}

BallPose pose_from_circle(const Circle& circle, const CameraIntrinsics& intr,
                          double ball_radius_m) {
    if (circle.r <= 0.0) {
        throw std::invalid_argument("pose recovery needs a positive apparent radius");
    }
    if (ball_radius_m <= 0.0) {
        throw std::invalid_argument("ball radius must be positive");
    }
    const double f = intr.focal();
    BallPose pose;
    pose.ball_radius = ball_radius_m;
    pose.z = ball_radius_m * std::sqrt(1.0 + (f * f) / (circle.r * circle.r));
    pose.x = circle.cx * pose.z / f;
    pose.y = circle.cy * pose.z / f;
    return pose;
}

CameraConfig load_camera_config(const std::filesystem::path& path) {
    const Config config = Config::load(path);
    CameraConfig camera;
    camera.intrinsics.fx = config.get_double("fx");
    camera.intrinsics.fy = config.get_double("fy");
    camera.intrinsics.cx = config.get_double("cx");
    camera.intrinsics.cy = config.get_double("cy");
    camera.intrinsics.k1 = config.get_double("k1", 0.0);
    camera.intrinsics.k2 = config.get_double("k2", 0.0);
    camera.intrinsics.image_width = config.get_int("width");
    camera.intrinsics.image_height = config.get_int("height");
    camera.ball_radius_m = config.get_double("ball_radius_m", 0.0);
    camera.intrinsics.validate();
    return camera;
}

}  // namespace balltrack
