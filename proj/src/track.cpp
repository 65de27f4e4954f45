#include "balltrack/track.hpp"

#include <limits>

namespace balltrack {

const char* to_string(TrackStatus status) {
    switch (status) {
        case TrackStatus::Tracking:
            return "TRACKING";
        case TrackStatus::Coasting:
            return "COASTING";
        case TrackStatus::Lost:
            return "LOST";
    }
    return "UNKNOWN";
}

TrackState TrackState::initial(const TrackParams& params) {
    TrackState state;
    state.frames_since_seen = params.coast_limit + 1;
    state.status = TrackStatus::Lost;
    return state;
}

TrackUpdate track_update(const TrackState& state, std::span<const TrackObservation> observations,
                         const TrackParams& params) {
    std::optional<std::size_t> selected;
    if (state.last_circle) {
        // Nearest within the gate; ties go to the earlier (higher-Q_c) entry.
        double best = params.gate_radius;
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const Circle& c = observations[i].circle;
            const double d = distance({c.cx, c.cy},
                                      {state.last_circle->cx, state.last_circle->cy});
            if (d < best || (d == best && !selected)) {
                best = d;
                selected = i;
            }
        }
    } else if (!observations.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < observations.size(); ++i) {
            if (observations[i].quality > observations[best].quality) {
                best = i;
            }
        }
        selected = best;
    }

    TrackUpdate update;
    update.selected = selected;
    if (selected) {
        const TrackObservation& obs = observations[*selected];
        update.state.last_circle = obs.circle;
        update.state.last_pose = obs.pose;
        update.state.frames_since_seen = 0;
        update.state.status = TrackStatus::Tracking;
        return update;
    }

    update.state = state;
    if (update.state.frames_since_seen < std::numeric_limits<int>::max()) {
        ++update.state.frames_since_seen;
    }
    if (update.state.frames_since_seen > params.coast_limit) {
        update.state.status = TrackStatus::Lost;
        // Forget the stale position so a reappearing ball is picked up by
        // quality instead of being gated away.
        update.state.last_circle.reset();
        update.state.last_pose.reset();
    } else {
        update.state.status = TrackStatus::Coasting;
    }
    return update;
}

}  // namespace balltrack
