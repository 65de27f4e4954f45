#pragma once

#include <optional>
#include <span>

#include "balltrack/camera.hpp"
#include "balltrack/geometry.hpp"

namespace balltrack {

enum class TrackStatus { Tracking, Coasting, Lost };

const char* to_string(TrackStatus status);

struct TrackParams {
    double gate_radius = 60.0;  // pixels, association gate at 640x480
    int coast_limit = 5;        // frames bridged before the track drops
};

struct TrackObservation {
    Circle circle;
    double quality = 0.0;
    std::optional<BallPose> pose;
};

struct TrackState {
    std::optional<Circle> last_circle;
    std::optional<BallPose> last_pose;
    int frames_since_seen = 0;
    TrackStatus status = TrackStatus::Lost;

    static TrackState initial(const TrackParams& params);
};

struct TrackUpdate {
    TrackState state;
    std::optional<std::size_t> selected;  // index into the observations
};

// Pure transition. With history, picks the nearest observation within the
// gate; without history, the highest-quality one. Misses advance
// frames_since_seen through Coasting into Lost; the remembered position is
// held frozen while coasting and cleared once the track is lost so a
// reappearing ball can be re-acquired anywhere.
TrackUpdate track_update(const TrackState& state, std::span<const TrackObservation> observations,
                         const TrackParams& params);

}  // namespace balltrack
