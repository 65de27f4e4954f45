#include "balltrack/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <tuple>

namespace balltrack {

std::optional<Vec2> circumcenter(Vec2 p1, Vec2 p2, Vec2 p3) {
    // Standard perpendicular-bisector form, translated so p1 is the origin.
    // For integer pixel inputs every intermediate below stays exact in
    // doubles, so the result is the correctly rounded exact center.
    const double ax = p2.x - p1.x;
    const double ay = p2.y - p1.y;
    const double bx = p3.x - p1.x;
    const double by = p3.y - p1.y;
    const double den = 2.0 * (ax * by - ay * bx);
    if (std::abs(den) < 1e-9) {
        return std::nullopt;
    }
    const double da = ax * ax + ay * ay;
    const double db = bx * bx + by * by;
    return Vec2{p1.x + (by * da - ay * db) / den, p1.y + (ax * db - bx * da) / den};
}

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over the combined words.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

namespace {

std::vector<Vec2> boundary_points(const Region& region) {
    std::vector<Vec2> points;
    points.reserve(region.boundary.size());
    for (const auto& p : region.boundary) {
        points.push_back({static_cast<double>(p[0]), static_cast<double>(p[1])});
    }
    return points;
}

struct Accumulator {
    int offset_x = 0, offset_y = 0;  // bin (0,0) corresponds to pixel (-offset)
    int width = 0, height = 0;
    std::vector<std::int32_t> counts;

    explicit Accumulator(const VoteParams& params) {
        offset_x = static_cast<int>(std::lround(params.margin_fraction * params.image_width));
        offset_y = static_cast<int>(std::lround(params.margin_fraction * params.image_height));
        width = params.image_width + 2 * offset_x;
        height = params.image_height + 2 * offset_y;
        counts.assign(static_cast<std::size_t>(width) * height, 0);
    }

    // Returns the new count, or -1 when the vote lands outside.
    int add(Vec2 center) {
        const long bx = std::lround(center.x) + offset_x;
        const long by = std::lround(center.y) + offset_y;
        if (bx < 0 || bx >= width || by < 0 || by >= height) {
            return -1;
        }
        return ++counts[static_cast<std::size_t>(by) * width + bx];
    }

    Vec2 bin_position(std::size_t index) const {
        return {static_cast<double>(static_cast<long>(index % width) - offset_x),
                static_cast<double>(static_cast<long>(index / width) - offset_y)};
    }
};

}  // namespace

std::optional<CenterVote> vote_center(std::span<const Vec2> boundary, const VoteParams& params,
                                      std::uint64_t seed) {
    const std::size_t n = boundary.size();
    if (n < 3) {
        return std::nullopt;
    }
    Accumulator acc(params);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    int best_count = 0;
    std::size_t best_bin = 0;
    int votes = 0;
    while (votes < params.max_votes) {
        ++votes;
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        while (j == i) {
            j = pick(rng);
        }
        std::size_t k = pick(rng);
        while (k == i || k == j) {
            k = pick(rng);
        }
        const auto center = circumcenter(boundary[i], boundary[j], boundary[k]);
        if (!center) {
            continue;
        }
        const int count = acc.add(*center);
        if (count < 0) {
            continue;
        }
        if (count > best_count) {
            best_count = count;
            best_bin = static_cast<std::size_t>(std::lround(center->y) + acc.offset_y) *
                           acc.width +
                       static_cast<std::size_t>(std::lround(center->x) + acc.offset_x);
        }
        if (count >= params.center_threshold) {
            return CenterVote{acc.bin_position(best_bin), best_count, votes, true};
        }
    }
    if (best_count == 0) {
        return std::nullopt;  // nothing landed in bounds
    }
    return CenterVote{acc.bin_position(best_bin), best_count, votes, false};
}

std::optional<CenterVote> vote_center(const Region& region, const VoteParams& params,
                                      std::uint64_t seed) {
    return vote_center(boundary_points(region), params, seed);
}

std::pair<double, int> vote_radius(std::span<const Vec2> boundary, Vec2 center,
                                   const VoteParams& params) {
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
        throw std::invalid_argument("radius vote needs a finite center");
    }
    const std::size_t bins = static_cast<std::size_t>(
        std::ceil(std::hypot(params.image_width, params.image_height))) + 1;
    std::vector<int> histogram(bins, 0);
    for (const Vec2& p : boundary) {
        const long bin = std::lround(distance(p, center));
        if (bin >= 0 && static_cast<std::size_t>(bin) < bins) {
            ++histogram[static_cast<std::size_t>(bin)];
        }
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < bins; ++r) {
        if (histogram[r] > histogram[best]) {
            best = r;  // strict: ties keep the smaller radius
        }
    }
    return {static_cast<double>(best), histogram[best]};
}

std::pair<double, int> vote_radius(const Region& region, Vec2 center, const VoteParams& params) {
    return vote_radius(boundary_points(region), center, params);
}

double assess_quality(int c_max, int r_max, int n_votes, int n_points) {
    if (n_votes <= 0 || n_points <= 0) {
        throw std::invalid_argument("quality is undefined for empty votes or boundaries");
    }
    return (static_cast<double>(c_max) * r_max) / (static_cast<double>(n_votes) * n_points);
}

std::optional<VoteResult> vote_circle(std::span<const Vec2> boundary, const VoteParams& params,
                                      std::uint64_t seed) {
    const auto center = vote_center(boundary, params, seed);
    if (!center) {
        return std::nullopt;
    }
    const auto [radius, r_max] = vote_radius(boundary, center->center, params);
    if (radius <= 0.0) {
        return std::nullopt;
    }
    VoteResult result;
    result.circle = {center->center.x, center->center.y, radius};
    result.c_max = center->c_max;
    result.r_max = r_max;
    result.n_votes = center->n_votes;
    result.n_points = static_cast<int>(boundary.size());
    result.quality = assess_quality(result.c_max, result.r_max, result.n_votes, result.n_points);
    result.converged = center->converged;
    return result;
}

std::optional<VoteResult> vote_circle(const Region& region, const VoteParams& params,
                                      std::uint64_t seed) {
    return vote_circle(boundary_points(region), params, seed);
}

namespace {

// Boundary of a digital circle centered at a sub-pixel offset: pixels inside
// the disk that have an outside 4-neighbor. The offset matters because real
// regions are digitized at arbitrary sub-pixel positions, which spreads the
// radius histogram over neighboring bins; a perfectly centered lattice circle
// would overstate the achievable quality.
std::vector<Vec2> digital_circle_boundary(double radius, Vec2 offset) {
    const int r = std::max(3, static_cast<int>(std::lround(radius)));
    const int c = r + 2;
    const int size = 2 * c + 1;
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(size) * size, 0);
    auto in_disk = [&](int x, int y) {
        if (x < 0 || x >= size || y < 0 || y >= size) {
            return false;
        }
        const double dx = x - c - offset.x;
        const double dy = y - c - offset.y;
        return dx * dx + dy * dy <= static_cast<double>(r) * r;
    };
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            inside[static_cast<std::size_t>(y) * size + x] = in_disk(x, y);
        }
    }
    std::vector<Vec2> boundary;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            if (!inside[static_cast<std::size_t>(y) * size + x]) {
                continue;
            }
            if (!in_disk(x - 1, y) || !in_disk(x + 1, y) || !in_disk(x, y - 1) ||
                !in_disk(x, y + 1)) {
                boundary.push_back({static_cast<double>(x), static_cast<double>(y)});
            }
        }
    }
    return boundary;
}

}  // namespace

double circular_quality_baseline(double radius, const VoteParams& params) {
    VoteParams local = params;
    const int r = std::max(3, static_cast<int>(std::lround(radius)));
    local.image_width = std::max(params.image_width, 2 * r + 8);
    local.image_height = std::max(params.image_height, 2 * r + 8);
    // Median over sub-pixel placements so the anchor reflects what digitized
    // full circles actually score.
    constexpr Vec2 kOffsets[5] = {{0.0, 0.0}, {0.25, 0.25}, {0.5, 0.25}, {0.25, 0.5}, {0.5, 0.5}};
    std::vector<double> qualities;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto boundary = digital_circle_boundary(r, kOffsets[seed - 1]);
        if (const auto vote = vote_circle(boundary, local, seed)) {
            qualities.push_back(vote->quality);
        }
    }
    if (qualities.empty()) {
        return 0.0;
    }
    std::sort(qualities.begin(), qualities.end());
    return qualities[qualities.size() / 2];
}

double resolve_quality_threshold(const VoteParams& params) {
    if (params.quality_threshold > 0.0) {
        return params.quality_threshold;
    }
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int, int, double>, double> cache;
    const auto key = std::make_tuple(params.center_threshold, params.max_votes,
                                     params.image_width, params.image_height,
                                     params.margin_fraction);
    std::lock_guard lock(mutex);
    if (const auto it = cache.find(key); it != cache.end()) {
        return it->second;
    }
    std::vector<double> baselines;
    for (const double radius : {15.0, 25.0, 40.0, 60.0, 90.0}) {
        baselines.push_back(circular_quality_baseline(radius, params));
    }
    std::sort(baselines.begin(), baselines.end());
    // Heavily occluded balls still have to clear the cutoff: they score about
    // an order of magnitude below a full circle, while non-circular clutter
    // sits another 2-4x lower. 0.05 of the full-circle baseline splits the
    // two populations with even margins on both sides.
    const double threshold = 0.05 * baselines[baselines.size() / 2];
    cache[key] = threshold;
    return threshold;
}

namespace detail {

ClassMap cleanup_classes(const ClassMap& map, int open_radius, int close_radius,
                         std::uint16_t num_classes) {
    if (open_radius <= 0 && close_radius <= 0) {
        return map;
    }
    ClassMap out(map.width(), map.height());
    for (std::uint16_t cls = 1; cls <= num_classes; ++cls) {
        ClassMap mask = class_mask(map, cls);
        if (open_radius > 0) {
            mask = morph(mask, MorphOp::Open, open_radius);
        }
        if (close_radius > 0) {
            mask = morph(mask, MorphOp::Close, close_radius);
        }
        auto src = mask.classes();
        auto dst = out.classes();
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (src[i] != 0) {
                dst[i] = cls;  // later classes overwrite on rare overlaps
            }
        }
    }
    return out;
}

std::vector<Vec2> undistorted_boundary(const Region& region, const UndistortMap& map) {
    std::vector<Vec2> points;
    points.reserve(region.boundary.size());
    for (const auto& p : region.boundary) {
        points.push_back(map.corrected(p[0], p[1]));
    }
    return points;
}

}  // namespace detail

std::vector<Detection> detect_balls(const RgbImage& frame, const ColorLut& lut,
                                    const UndistortMap& map, const DetectParams& params) {
    VoteParams vote_params = params.vote;
    vote_params.image_width = frame.width();
    vote_params.image_height = frame.height();
    const double threshold = resolve_quality_threshold(vote_params);

    const ClassMap raw = classify(frame, lut);
    const ClassMap cleaned =
        detail::cleanup_classes(raw, params.morph_open_radius, params.morph_close_radius,
                                static_cast<std::uint16_t>(lut.classes()));
    std::vector<Region> regions = connected_components(cleaned, vote_params.min_region_size);

    std::vector<Detection> detections;
    for (Region& region : regions) {
        const auto boundary = detail::undistorted_boundary(region, map);
        const auto vote = vote_circle(boundary, vote_params,
                                      detail::mix_seed(params.seed, region.label));
        if (!vote || vote->quality < threshold) {
            continue;
        }
        detections.push_back({std::move(region), *vote});
    }
    std::stable_sort(detections.begin(), detections.end(),
                     [](const Detection& a, const Detection& b) {
                         return a.vote.quality > b.vote.quality;
                     });
    return detections;
}

std::vector<Detection> detect_balls(const RgbImage& frame, const ColorLut& lut,
                                    const CameraIntrinsics& intr, const DetectParams& params) {
    return detect_balls(frame, lut, build_undistort_map(intr), params);
}

}  // namespace balltrack
