#pragma once

#include <optional>
#include <string>

#include "balltrack/camera.hpp"
#include "balltrack/geometry.hpp"
#include "balltrack/pipeline.hpp"

namespace balltrack {

// One row of the per-frame tracking report.
struct FrameRecord {
    std::string frame_id;
    std::optional<Circle> circle;
    std::optional<double> quality;
    std::optional<BallPose> pose;
    std::string status;  // TRACKING / COASTING / LOST / ERROR
    StageTimings timings;
};

// CSV schema: frame,cx,cy,cr,qc,x_m,y_m,z_m,status,
//             t_classify_us,t_components_us,t_vote_us,t_refine_us,t_total_us
std::string csv_header();
std::string csv_row(const FrameRecord& record);

}  // namespace balltrack
