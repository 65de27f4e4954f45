#include "balltrack/report.hpp"

#include <cstdio>

namespace balltrack {

namespace {

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

}  // namespace

std::string csv_header() {
    return "frame,cx,cy,cr,qc,x_m,y_m,z_m,status,"
           "t_classify_us,t_components_us,t_vote_us,t_refine_us,t_total_us";
}

std::string csv_row(const FrameRecord& record) {
    std::string row = record.frame_id;
    if (record.circle) {
        row += ',' + fixed(record.circle->cx, 4);
        row += ',' + fixed(record.circle->cy, 4);
        row += ',' + fixed(record.circle->r, 4);
    } else {
        row += ",,,";
    }
    row += record.quality ? ',' + fixed(*record.quality, 6) : ",";
    if (record.pose) {
        row += ',' + fixed(record.pose->x, 4);
        row += ',' + fixed(record.pose->y, 4);
        row += ',' + fixed(record.pose->z, 4);
    } else {
        row += ",,,";
    }
    row += ',' + record.status;
    row += ',' + std::to_string(record.timings.classify_us);
    row += ',' + std::to_string(record.timings.components_us);
    row += ',' + std::to_string(record.timings.vote_us);
    row += ',' + std::to_string(record.timings.refine_us);
    row += ',' + std::to_string(record.timings.total_us);
    return row;
}

}  // namespace balltrack
