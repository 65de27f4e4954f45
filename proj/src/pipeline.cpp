#include "balltrack/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace balltrack {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
}

}  // namespace

FrameProcessor::FrameProcessor(ColorLut lut, CameraConfig camera, PipelineParams params)
    : lut_(std::move(lut)),
      camera_(camera),
      params_(params),
      undistort_(build_undistort_map(camera.intrinsics)),
      quality_threshold_(0.0) {
    VoteParams vote = params_.detect.vote;
    vote.image_width = camera_.intrinsics.image_width;
    vote.image_height = camera_.intrinsics.image_height;
    quality_threshold_ = resolve_quality_threshold(vote);
}

FrameResult FrameProcessor::process(const RgbImage& frame, std::uint64_t seed) const {
    FrameResult result;
    const auto frame_start = Clock::now();

    VoteParams vote_params = params_.detect.vote;
    vote_params.image_width = frame.width();
    vote_params.image_height = frame.height();

    auto stage_start = Clock::now();
    const ClassMap raw = classify(frame, lut_);
    result.timings.classify_us = elapsed_us(stage_start);

    stage_start = Clock::now();
    const ClassMap cleaned = detail::cleanup_classes(
        raw, params_.detect.morph_open_radius, params_.detect.morph_close_radius,
        static_cast<std::uint16_t>(lut_.classes()));
    std::vector<Region> regions = connected_components(cleaned, vote_params.min_region_size);
    result.timings.components_us = elapsed_us(stage_start);

    stage_start = Clock::now();
    const bool in_camera_frame = frame.width() == undistort_.width() &&
                                 frame.height() == undistort_.height();
    std::vector<PipelineDetection> detections;
    for (Region& region : regions) {
        std::vector<Vec2> boundary;
        if (in_camera_frame) {
            boundary = detail::undistorted_boundary(region, undistort_);
        } else {
            boundary.reserve(region.boundary.size());
            for (const auto& p : region.boundary) {
                boundary.push_back({static_cast<double>(p[0]), static_cast<double>(p[1])});
            }
        }
        const auto vote =
            vote_circle(boundary, vote_params, detail::mix_seed(seed, region.label));
        if (!vote || vote->quality < quality_threshold_) {
            continue;
        }
        PipelineDetection det;
        det.region = std::move(region);
        det.vote = *vote;
        det.circle = vote->circle;
        detections.push_back(std::move(det));
    }
    std::stable_sort(detections.begin(), detections.end(),
                     [](const PipelineDetection& a, const PipelineDetection& b) {
                         return a.vote.quality > b.vote.quality;
                     });
    result.timings.vote_us = elapsed_us(stage_start);

    stage_start = Clock::now();
    if (!detections.empty()) {
        const GrayImage gray = luminance(frame);
        for (PipelineDetection& det : detections) {
            const RefineResult refined = refine_circle(gray, det.vote.circle, params_.refine);
            det.circle = refined.circle;
            det.refined = refined.refined;
            if (camera_.ball_radius_m > 0.0) {
                const Circle centered{det.circle.cx - camera_.intrinsics.cx,
                                      det.circle.cy - camera_.intrinsics.cy, det.circle.r};
                det.pose = pose_from_circle(centered, camera_.intrinsics, camera_.ball_radius_m);
            }
        }
    }
    result.timings.refine_us = elapsed_us(stage_start);

    result.detections = std::move(detections);
    result.timings.total_us = elapsed_us(frame_start);
    return result;
}

std::vector<TrackObservation> FrameProcessor::observations(const FrameResult& result) const {
    std::vector<TrackObservation> out;
    out.reserve(result.detections.size());
    for (const PipelineDetection& det : result.detections) {
        out.push_back({det.circle, det.vote.quality, det.pose});
    }
    return out;
}

}  // namespace balltrack
