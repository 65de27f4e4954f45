#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "balltrack/camera.hpp"
#include "balltrack/color_lut.hpp"
#include "balltrack/geometry.hpp"
#include "balltrack/image.hpp"

namespace balltrack {

struct VoteParams {
    int center_threshold = 16;   // accumulator count that ends voting early
    int max_votes = 1200;        // cap on random triples per region
    double quality_threshold = 0.0;  // <= 0: auto, 0.5 x circular baseline
    int min_region_size = 25;    // pixels
    int image_width = 640;
    int image_height = 480;
    double margin_fraction = 0.10;  // accumulator margin on each side
};

// Center of the circle through three points; nullopt when the denominator
// magnitude falls below 1e-9 (collinear points).
std::optional<Vec2> circumcenter(Vec2 p1, Vec2 p2, Vec2 p3);

struct CenterVote {
    Vec2 center;          // peak accumulator bin
    int c_max = 0;        // count in the peak bin
    int n_votes = 0;      // random triples drawn
    bool converged = false;  // threshold reached before the vote cap
};

// Randomized center voting over boundary points. nullopt when fewer than
// three boundary points exist or no vote landed inside the accumulator.
std::optional<CenterVote> vote_center(std::span<const Vec2> boundary, const VoteParams& params,
                                      std::uint64_t seed);
std::optional<CenterVote> vote_center(const Region& region, const VoteParams& params,
                                      std::uint64_t seed);

// Deterministic radius vote: histogram of rounded point-to-center distances.
// Returns {radius bin, peak count}; ties resolve to the smaller radius.
std::pair<double, int> vote_radius(std::span<const Vec2> boundary, Vec2 center,
                                   const VoteParams& params);
std::pair<double, int> vote_radius(const Region& region, Vec2 center, const VoteParams& params);

// Q_c = (c_max * r_max) / (n_votes * n_points).
// Throws std::invalid_argument on zero denominators.
double assess_quality(int c_max, int r_max, int n_votes, int n_points);

struct VoteResult {
    Circle circle;
    int c_max = 0;
    int r_max = 0;
    int n_votes = 0;
    int n_points = 0;
    double quality = 0.0;
    bool converged = false;
};

// Full per-region estimate: center vote, radius vote, quality. nullopt when
// the region cannot produce a positive-radius circle.
std::optional<VoteResult> vote_circle(std::span<const Vec2> boundary, const VoteParams& params,
                                      std::uint64_t seed);
std::optional<VoteResult> vote_circle(const Region& region, const VoteParams& params,
                                      std::uint64_t seed);

// Median Q_c of ideal digital circles under these parameters. Used to anchor
// relative quality thresholds (the fit ratio and the detection cutoff).
double circular_quality_baseline(double radius, const VoteParams& params);

// params.quality_threshold when positive, otherwise half the median baseline
// over a spread of radii. Cached per parameter set.
double resolve_quality_threshold(const VoteParams& params);

struct DetectParams {
    VoteParams vote;
    int morph_open_radius = 1;   // 0 disables the opening pass
    int morph_close_radius = 1;  // 0 disables the closing pass
    std::uint64_t seed = 0;      // reproducibility contract: always explicit
};

struct Detection {
    Region region;
    VoteResult vote;
};

// classify -> morphological cleanup -> components -> undistort boundaries ->
// per-region vote; keeps results with Q_c >= threshold, sorted descending.
std::vector<Detection> detect_balls(const RgbImage& frame, const ColorLut& lut,
                                    const CameraIntrinsics& intr, const DetectParams& params);
std::vector<Detection> detect_balls(const RgbImage& frame, const ColorLut& lut,
                                    const UndistortMap& map, const DetectParams& params);

namespace detail {

// Per-class open+close noise cleanup; classes merged back lowest-first.
ClassMap cleanup_classes(const ClassMap& map, int open_radius, int close_radius,
                         std::uint16_t num_classes);

std::vector<Vec2> undistorted_boundary(const Region& region, const UndistortMap& map);

// Stable per-region RNG stream independent of processing order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace detail

}  // namespace balltrack
