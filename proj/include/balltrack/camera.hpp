#pragma once

#include <filesystem>
#include <vector>

#include "balltrack/geometry.hpp"

namespace balltrack {

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;  // focal lengths, pixels
    double cx = 0.0, cy = 0.0;  // principal point, pixels
    double k1 = 0.0, k2 = 0.0;  // radial distortion coefficients
    int image_width = 0;
    int image_height = 0;

    // Isotropic focal length used by the single-f pose model.
    double focal() const { return 0.5 * (fx + fy); }

    // Throws std::invalid_argument when the invariants do not hold.
    void validate() const;
};

// Per-pixel table of corrected (undistorted) coordinates. Built once, queried
// per boundary pixel at runtime; the frame itself is never resampled.
class UndistortMap {
public:
    UndistortMap(int width, int height, std::vector<Vec2> corrected);

    int width() const { return width_; }
    int height() const { return height_; }

    Vec2 corrected(int u, int v) const {
        return table_[static_cast<std::size_t>(v) * width_ + u];
    }

private:
    int width_;
    int height_;
    std::vector<Vec2> table_;
};

// Evaluates the radial model x_c = x * (1 + k1*r^2 + k2*r^4) at every integer
// pixel, in normalized coordinates, and stores the corrected pixel position.
UndistortMap build_undistort_map(const CameraIntrinsics& intr);

// Metric ball center in the camera frame.
struct BallPose {
    double x = 0.0, y = 0.0, z = 0.0;  // meters
    double ball_radius = 0.0;          // meters
};

// Perspective depth recovery:
//   z = R * sqrt(1 + f^2 / c_r^2),  x = c_x * z / f,  y = c_y * z / f
// Circle coordinates must already be relative to the principal point.
// Throws std::invalid_argument when circle.r <= 0.
BallPose pose_from_circle(const Circle& circle, const CameraIntrinsics& intr,
                          double ball_radius_m);

struct CameraConfig {
    CameraIntrinsics intrinsics;
    double ball_radius_m = 0.0;
};

// Reads a UTF-8 `key = value` file with keys fx, fy, cx, cy, k1, k2, width,
// height, ball_radius_m.
CameraConfig load_camera_config(const std::filesystem::path& path);

}  // namespace balltrack
