#include "balltrack/colorcal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "balltrack/error.hpp"

namespace balltrack {

namespace {

double srgb_to_linear(double v) {
    const double c = v / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// D65 white point in the 1976 UCS diagram.
constexpr double kWhiteU = 0.19783982;
constexpr double kWhiteV = 0.46833630;

}  // namespace

Chroma rgb_to_chroma(double r, double g, double b) {
    const double lr = srgb_to_linear(r);
    const double lg = srgb_to_linear(g);
    const double lb = srgb_to_linear(b);
    const double x = 0.4124564 * lr + 0.3575761 * lg + 0.1804375 * lb;
    const double y = 0.2126729 * lr + 0.7151522 * lg + 0.0721750 * lb;
    const double z = 0.0193339 * lr + 0.1191920 * lg + 0.9503041 * lb;
    const double denom = x + 15.0 * y + 3.0 * z;
    if (denom <= 1e-12) {
        return {kWhiteU, kWhiteV};  // black carries no chroma
    }
    return {4.0 * x / denom, 9.0 * y / denom};
}

Chroma rgb_to_chroma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return rgb_to_chroma(static_cast<double>(r), static_cast<double>(g), static_cast<double>(b));
}

std::array<double, 2> chroma_to_grid(Chroma c) {
    const double scale = kChromaBins / (kChromaMax - kChromaMin);
    return {(c.alpha - kChromaMin) * scale, (c.beta - kChromaMin) * scale};
}

std::array<int, 2> chroma_bin(Chroma c) {
    const auto grid = chroma_to_grid(c);
    return {std::clamp(static_cast<int>(grid[0]), 0, kChromaBins - 1),
            std::clamp(static_cast<int>(grid[1]), 0, kChromaBins - 1)};
}

std::uint64_t ChromaDistribution::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ClassMap meanshift_segment(const RgbImage& image, double spatial_bw, double chroma_bw) {
    if (spatial_bw <= 0.0 || chroma_bw <= 0.0) {
        throw std::invalid_argument("mean-shift bandwidths must be positive");
    }
    const int w = image.width();
    const int h = image.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;

    // Per-pixel chroma in grid units, so both bandwidths live in natural units.
    std::vector<std::array<float, 2>> chroma(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const RgbPixel& p = image.at(x, y);
            const auto grid = chroma_to_grid(rgb_to_chroma(p.r, p.g, p.b));
            chroma[static_cast<std::size_t>(y) * w + x] = {static_cast<float>(grid[0]),
                                                           static_cast<float>(grid[1])};
        }
    }

    const double sbw2 = spatial_bw * spatial_bw;
    const double cbw2 = chroma_bw * chroma_bw;
    constexpr int kMaxIterations = 20;
    constexpr double kConvergence = 0.1;

    std::vector<std::array<float, 2>> modes(n);
    for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
            const std::size_t idx = static_cast<std::size_t>(py) * w + px;
            double mx = px;
            double my = py;
            double ma = chroma[idx][0];
            double mb = chroma[idx][1];
            for (int iter = 0; iter < kMaxIterations; ++iter) {
                const int wx0 = std::max(0, static_cast<int>(std::ceil(mx - spatial_bw)));
                const int wx1 = std::min(w - 1, static_cast<int>(std::floor(mx + spatial_bw)));
                const int wy0 = std::max(0, static_cast<int>(std::ceil(my - spatial_bw)));
                const int wy1 = std::min(h - 1, static_cast<int>(std::floor(my + spatial_bw)));
                double sx = 0.0, sy = 0.0, sa = 0.0, sb = 0.0;
                int count = 0;
                for (int qy = wy0; qy <= wy1; ++qy) {
                    const double dy = qy - my;
                    for (int qx = wx0; qx <= wx1; ++qx) {
                        const double dx = qx - mx;
                        if (dx * dx + dy * dy > sbw2) {
                            continue;
                        }
                        const auto& qc = chroma[static_cast<std::size_t>(qy) * w + qx];
                        const double da = qc[0] - ma;
                        const double db = qc[1] - mb;
                        if (da * da + db * db > cbw2) {
                            continue;
                        }
                        sx += qx;
                        sy += qy;
                        sa += qc[0];
                        sb += qc[1];
                        ++count;
                    }
                }
                if (count == 0) {
                    break;
                }
                const double nx = sx / count;
                const double ny = sy / count;
                const double na = sa / count;
                const double nb = sb / count;
                const double spatial_shift = std::hypot(nx - mx, ny - my);
                const double chroma_shift = std::hypot(na - ma, nb - mb);
                mx = nx;
                my = ny;
                ma = na;
                mb = nb;
                if (std::max(spatial_shift, chroma_shift) < kConvergence) {
                    break;
                }
            }
            modes[idx] = {static_cast<float>(ma), static_cast<float>(mb)};
        }
    }

    // Group converged modes by chroma alone: same color, one label, anywhere
    // in the frame. First-comer's chroma represents the group.
    std::vector<std::array<float, 2>> groups;
    ClassMap labels(w, h);
    auto out = labels.classes();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& m = modes[i];
        std::uint16_t label = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double da = m[0] - groups[g][0];
            const double db = m[1] - groups[g][1];
            if (da * da + db * db <= cbw2) {
                label = static_cast<std::uint16_t>(g + 1);
                break;
            }
        }
        if (label == 0) {
            if (groups.size() >= 65535) {
                throw std::runtime_error(
                    "mean-shift produced too many chroma modes; increase chroma bandwidth");
            }
            groups.push_back(m);
            label = static_cast<std::uint16_t>(groups.size());
        }
        out[i] = label;
    }
    return labels;
}

namespace {

// Support mask of a chroma histogram as a 64x64 binary map.
ClassMap distribution_support(const ChromaDistribution& dist) {
    ClassMap mask(kChromaBins, kChromaBins);
    for (int b = 0; b < kChromaBins; ++b) {
        for (int a = 0; a < kChromaBins; ++a) {
            mask.at(a, b) = dist.at(a, b) > 0 ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace

CalibrationResult calibrate(const RgbImage& image, const CalibParams& params) {
    VoteParams vote_params = params.vote;
    vote_params.image_width = image.width();
    vote_params.image_height = image.height();

    const ClassMap segmented =
        meanshift_segment(image, params.spatial_bandwidth, params.chroma_bandwidth);
    const ComponentAnalysis analysis = analyze_components(segmented);

    CalibrationResult result;
    std::map<double, double> baseline_cache;
    auto baseline_for = [&](double radius) {
        const double key = std::round(radius);
        const auto it = baseline_cache.find(key);
        if (it != baseline_cache.end()) {
            return it->second;
        }
        const double value = circular_quality_baseline(key, vote_params);
        baseline_cache.emplace(key, value);
        return value;
    };

    // Fit every sufficiently large region and keep the circular ones.
    struct Ball {
        const Region* region;
        Circle circle;
    };
    std::map<std::uint16_t, std::vector<Ball>> balls_by_segment;
    for (const Region& region : analysis.regions) {
        if (region.pixel_count < params.min_region_size) {
            continue;
        }
        RegionFitReport report;
        report.region_label = region.label;
        report.segment_class = region.class_index;
        report.pixel_count = region.pixel_count;
        report.vote = vote_circle(region, vote_params,
                                  detail::mix_seed(params.seed, region.label));
        if (report.vote) {
            const double baseline = baseline_for(report.vote->circle.r);
            report.fit_ratio = baseline > 0.0 ? report.vote->quality / baseline : 0.0;
            report.accepted = report.fit_ratio >= params.fit_ratio_threshold;
        }
        if (report.accepted) {
            balls_by_segment[region.class_index].push_back({&region, report.vote->circle});
        }
        result.regions.push_back(std::move(report));
    }

    if (balls_by_segment.empty()) {
        std::ostringstream msg;
        msg << "no circular region found among " << result.regions.size() << " candidates;";
        for (const auto& report : result.regions) {
            msg << " region " << report.region_label << " fit " << report.fit_ratio << ";";
        }
        throw CalibrationError(msg.str());
    }
    if (static_cast<int>(balls_by_segment.size()) > params.max_classes) {
        // Keep the most sampled colors; drop the rest deterministically.
        std::vector<std::pair<std::uint64_t, std::uint16_t>> sizes;
        for (const auto& [segment, balls] : balls_by_segment) {
            std::uint64_t pixels = 0;
            for (const Ball& ball : balls) {
                pixels += static_cast<std::uint64_t>(ball.region->pixel_count);
            }
            sizes.push_back({pixels, segment});
        }
        std::sort(sizes.begin(), sizes.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) {
                return a.first > b.first;
            }
            return a.second < b.second;
        });
        for (std::size_t i = params.max_classes; i < sizes.size(); ++i) {
            balls_by_segment.erase(sizes[i].second);
        }
    }

    // Accumulate interior chroma samples per color class. Classes are numbered
    // in segment-label order, which is deterministic.
    std::vector<ChromaDistribution> distributions;
    result.class_sample_counts.assign(1, 0);
    for (const auto& [segment, balls] : balls_by_segment) {
        ChromaDistribution dist;
        dist.class_index = static_cast<std::uint16_t>(distributions.size() + 1);
        std::uint64_t samples = 0;
        for (const Ball& ball : balls) {
            const Circle& c = ball.circle;
            const double sample_radius = c.r - params.interior_margin;
            if (sample_radius <= 0.0) {
                continue;
            }
            const int x0 = std::max(0, static_cast<int>(std::floor(c.cx - sample_radius)));
            const int x1 =
                std::min(image.width() - 1, static_cast<int>(std::ceil(c.cx + sample_radius)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.cy - sample_radius)));
            const int y1 =
                std::min(image.height() - 1, static_cast<int>(std::ceil(c.cy + sample_radius)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    if (std::hypot(x - c.cx, y - c.cy) > sample_radius) {
                        continue;
                    }
                    if (analysis.labels[static_cast<std::size_t>(y) * image.width() + x] !=
                        ball.region->label) {
                        continue;
                    }
                    const RgbPixel& p = image.at(x, y);
                    const auto bin = chroma_bin(rgb_to_chroma(p.r, p.g, p.b));
                    ++dist.at(bin[0], bin[1]);
                    ++samples;
                }
            }
        }
        if (samples == 0) {
            continue;  // circle too small to sample; drop the class
        }
        result.class_sample_counts.push_back(samples);
        distributions.push_back(std::move(dist));
    }
    if (distributions.empty()) {
        throw CalibrationError("circular regions found but none yielded interior color samples");
    }

    // Close each distribution to fill pinholes, then project the 64^3 RGB
    // cells through their chroma onto the learned classes.
    std::vector<ClassMap> closed;
    closed.reserve(distributions.size());
    for (const ChromaDistribution& dist : distributions) {
        closed.push_back(morph(distribution_support(dist), MorphOp::Close, params.closing_radius));
    }

    std::vector<std::uint8_t> table(ColorLut::kTableSize, 0);
    for (int r6 = 0; r6 < ColorLut::kCells; ++r6) {
        for (int g6 = 0; g6 < ColorLut::kCells; ++g6) {
            for (int b6 = 0; b6 < ColorLut::kCells; ++b6) {
                const auto bin = chroma_bin(rgb_to_chroma(
                    r6 * 4 + 1.5, g6 * 4 + 1.5, b6 * 4 + 1.5));
                std::uint8_t chosen = 0;
                std::uint32_t best_count = 0;
                for (std::size_t k = 0; k < distributions.size(); ++k) {
                    if (closed[k].at(bin[0], bin[1]) == 0) {
                        continue;
                    }
                    const std::uint32_t count = distributions[k].at(bin[0], bin[1]);
                    // Higher raw count wins; ties keep the lower class index.
                    if (chosen == 0 || count > best_count) {
                        chosen = static_cast<std::uint8_t>(k + 1);
                        best_count = count;
                    }
                }
                table[(static_cast<std::size_t>(r6) << 12) |
                      (static_cast<std::size_t>(g6) << 6) | static_cast<std::size_t>(b6)] = chosen;
            }
        }
    }
    result.lut = ColorLut(static_cast<std::uint16_t>(distributions.size()), std::move(table));
    return result;
}

ColorLut make_chroma_lut(std::span<const std::array<std::uint8_t, 3>> colors,
                         double radius_units) {
    if (colors.empty() || colors.size() > 250) {
        throw std::invalid_argument("make_chroma_lut needs between 1 and 250 colors");
    }
    std::vector<std::array<double, 2>> targets;
    targets.reserve(colors.size());
    for (const auto& c : colors) {
        targets.push_back(chroma_to_grid(rgb_to_chroma(c[0], c[1], c[2])));
    }
    std::vector<std::uint8_t> table(ColorLut::kTableSize, 0);
    for (int r6 = 0; r6 < ColorLut::kCells; ++r6) {
        for (int g6 = 0; g6 < ColorLut::kCells; ++g6) {
            for (int b6 = 0; b6 < ColorLut::kCells; ++b6) {
                const auto grid = chroma_to_grid(rgb_to_chroma(
                    r6 * 4 + 1.5, g6 * 4 + 1.5, b6 * 4 + 1.5));
                std::uint8_t chosen = 0;
                double best = radius_units * radius_units;
                for (std::size_t k = 0; k < targets.size(); ++k) {
                    const double da = grid[0] - targets[k][0];
                    const double db = grid[1] - targets[k][1];
                    const double d2 = da * da + db * db;
                    if (d2 <= best) {
                        best = d2;
                        chosen = static_cast<std::uint8_t>(k + 1);
                    }
                }
                table[(static_cast<std::size_t>(r6) << 12) |
                      (static_cast<std::size_t>(g6) << 6) | static_cast<std::size_t>(b6)] = chosen;
            }
        }
    }
    return ColorLut(static_cast<std::uint16_t>(colors.size()), std::move(table));
}

}  // namespace balltrack
