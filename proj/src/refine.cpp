#include "balltrack/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace balltrack {

double point_circle_distance(Vec2 p, const Circle& c) {
    return std::hypot(p.x - c.cx, p.y - c.cy) - c.r;
}

std::optional<std::vector<AnnulusSample>> collect_annulus(const GrayImage& image, const Circle& c,
                                                          double half_width,
                                                          double top_fraction) {
    if (half_width < 1.0) {
        throw std::invalid_argument("annulus half-width must be at least one pixel");
    }
    // Gradient is defined on the interior only; clip the scan accordingly.
    const int x0 = std::max(1, static_cast<int>(std::floor(c.cx - c.r - half_width)));
    const int x1 = std::min(image.width() - 2, static_cast<int>(std::ceil(c.cx + c.r + half_width)));
    const int y0 = std::max(1, static_cast<int>(std::floor(c.cy - c.r - half_width)));
    const int y1 = std::min(image.height() - 2, static_cast<int>(std::ceil(c.cy + c.r + half_width)));

    std::vector<AnnulusSample> candidates;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dist =
                point_circle_distance({static_cast<double>(x), static_cast<double>(y)}, c);
            if (std::abs(dist) > half_width) {
                continue;
            }
            const auto [gx, gy] = gradient_at(image, x, y);
            const double weight = gx * gx + gy * gy;
            if (weight <= 0.0) {
                continue;
            }
            candidates.push_back(
                {static_cast<double>(x), static_cast<double>(y), weight, dist});
        }
    }
    if (candidates.size() < 6) {
        return std::nullopt;
    }
    const std::size_t keep = std::max<std::size_t>(
        6, static_cast<std::size_t>(std::lround(top_fraction * candidates.size())));
    if (keep < candidates.size()) {
        // Deterministic order: by weight descending, scan order on ties.
        std::sort(candidates.begin(), candidates.end(),
                  [](const AnnulusSample& a, const AnnulusSample& b) {
                      if (a.weight != b.weight) {
                          return a.weight > b.weight;
                      }
                      return std::tie(a.y, a.x) < std::tie(b.y, b.x);
                  });
        candidates.resize(keep);
    }
    return candidates;
}

double annulus_energy(std::span<const AnnulusSample> samples, const Circle& c) {
    double energy = 0.0;
    for (const AnnulusSample& s : samples) {
        const double dist = point_circle_distance({s.x, s.y}, c);
        energy += s.weight * dist * dist;
    }
    return energy;
}

namespace {

// Inverse of a symmetric 3x3 via the adjugate. Returns false when the matrix
// is singular or its infinity-norm condition estimate reaches 1e12.
bool invert3(const double a[3][3], double inv[3][3]) {
    const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    if (det == 0.0 || !std::isfinite(det)) {
        return false;
    }
    inv[0][0] = c00 / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = c01 / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = c02 / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;

    double norm_a = 0.0;
    double norm_inv = 0.0;
    for (int i = 0; i < 3; ++i) {
        double row_a = 0.0;
        double row_inv = 0.0;
        for (int j = 0; j < 3; ++j) {
            row_a += std::abs(a[i][j]);
            row_inv += std::abs(inv[i][j]);
        }
        norm_a = std::max(norm_a, row_a);
        norm_inv = std::max(norm_inv, row_inv);
    }
    return norm_a * norm_inv < 1e12;
}

}  // namespace

std::optional<std::array<double, 3>> gauss_newton_step(std::span<const AnnulusSample> samples,
                                                       const Circle& c) {
    // Normal equations of the weighted linearized problem:
    //   A = J^T W J, b = J^T W C, dc = -A^{-1} b
    double a[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    std::size_t used = 0;
    for (const AnnulusSample& s : samples) {
        const double dx = c.cx - s.x;
        const double dy = c.cy - s.y;
        const double d = std::hypot(dx, dy);
        if (d <= 0.0) {
            continue;  // the row is undefined at the center
        }
        const double row[3] = {dx / d, dy / d, -1.0};
        const double residual = d - c.r;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                a[i][j] += s.weight * row[i] * row[j];
            }
            b[i] += s.weight * row[i] * residual;
        }
        ++used;
    }
    if (used < 6) {
        return std::nullopt;
    }
    a[1][0] = a[0][1];
    a[2][0] = a[0][2];
    a[2][1] = a[1][2];

    double inv[3][3];
    if (!invert3(a, inv)) {
        return std::nullopt;
    }
    std::array<double, 3> delta{};
    for (int i = 0; i < 3; ++i) {
        delta[i] = -(inv[i][0] * b[0] + inv[i][1] * b[1] + inv[i][2] * b[2]);
    }
    return delta;
}

RefineResult refine_circle(const GrayImage& image, const Circle& c, const RefineParams& params) {
    Circle current = c;
    bool refined = false;
    for (int iter = 0; iter < params.iterations; ++iter) {
        const auto samples =
            collect_annulus(image, current, params.half_width, params.top_fraction);
        if (!samples) {
            break;
        }
        const auto delta = gauss_newton_step(*samples, current);
        if (!delta) {
            break;
        }
        // Clamp each component; a step past the annulus chased wrong edges.
        const double limit = params.half_width;
        current.cx += std::clamp((*delta)[0], -limit, limit);
        current.cy += std::clamp((*delta)[1], -limit, limit);
        current.r += std::clamp((*delta)[2], -limit, limit);
        if (current.r <= 0.0) {
            return {c, false};
        }
        refined = true;
    }
    return {refined ? current : c, refined};
}

}  // namespace balltrack
