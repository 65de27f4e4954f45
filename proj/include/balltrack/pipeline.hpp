#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "balltrack/camera.hpp"
#include "balltrack/color_lut.hpp"
#include "balltrack/detect.hpp"
#include "balltrack/refine.hpp"
#include "balltrack/track.hpp"

namespace balltrack {

struct PipelineParams {
    DetectParams detect;
    RefineParams refine;
    TrackParams track;
};

struct StageTimings {
    std::int64_t classify_us = 0;
    std::int64_t components_us = 0;  // includes the morphological cleanup
    std::int64_t vote_us = 0;
    std::int64_t refine_us = 0;      // includes luminance conversion and pose
    std::int64_t total_us = 0;
};

struct PipelineDetection {
    Region region;
    VoteResult vote;
    Circle circle;   // refined when possible, otherwise the voted circle
    bool refined = false;
    std::optional<BallPose> pose;
};

struct FrameResult {
    std::vector<PipelineDetection> detections;  // sorted by Q_c descending
    StageTimings timings;
};

// One frame through classify -> cleanup+components -> vote -> refine (+pose),
// with per-stage wall times. The undistortion table and quality threshold are
// resolved once at construction.
class FrameProcessor {
public:
    FrameProcessor(ColorLut lut, CameraConfig camera, PipelineParams params);

    FrameResult process(const RgbImage& frame, std::uint64_t seed) const;

    const PipelineParams& params() const { return params_; }
    const CameraConfig& camera() const { return camera_; }
    double quality_threshold() const { return quality_threshold_; }

    std::vector<TrackObservation> observations(const FrameResult& result) const;

private:
    ColorLut lut_;
    CameraConfig camera_;
    PipelineParams params_;
    UndistortMap undistort_;
    double quality_threshold_;
};

}  // namespace balltrack
