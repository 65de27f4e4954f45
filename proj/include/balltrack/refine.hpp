#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "balltrack/geometry.hpp"
#include "balltrack/image.hpp"

namespace balltrack {

struct AnnulusSample {
    double x = 0.0, y = 0.0;   // pixel coordinates
    double weight = 0.0;       // squared gradient magnitude
    double distance = 0.0;     // signed point-to-circle distance at selection
};

// Signed distance to the circle: negative inside, positive outside.
double point_circle_distance(Vec2 p, const Circle& c);

struct RefineParams {
    double half_width = 4.0;     // annulus half-width, pixels
    double top_fraction = 0.5;   // fraction of gradient-bearing pixels kept
    int iterations = 1;          // single step suffices in practice
};

// Gathers annulus pixels with |distance| <= half_width, weights them by the
// squared central-difference gradient, and keeps the strongest top_fraction
// (never fewer than 6). nullopt when fewer than 6 gradient-bearing pixels
// exist, which callers treat as refinement-not-possible.
std::optional<std::vector<AnnulusSample>> collect_annulus(const GrayImage& image, const Circle& c,
                                                          double half_width, double top_fraction);

// One weighted Gauss-Newton increment
//   dc = -(J^T W J)^{-1} (J^T W C),  J row = ((cx-px)/d, (cy-py)/d, -1)
// nullopt when fewer than 6 usable samples remain or the 3x3 normal matrix is
// ill-conditioned (condition estimate >= 1e12). Samples at d == 0 are dropped.
std::optional<std::array<double, 3>> gauss_newton_step(std::span<const AnnulusSample> samples,
                                                       const Circle& c);

// Weighted residual energy sum(w * C(c)^2) over the samples.
double annulus_energy(std::span<const AnnulusSample> samples, const Circle& c);

struct RefineResult {
    Circle circle;
    bool refined = false;  // false: inputs returned unchanged
};

// collect_annulus + gauss_newton_step, params.iterations times, each step
// component-clamped to half_width. Falls back to the input circle when
// refinement is not possible.
RefineResult refine_circle(const GrayImage& image, const Circle& c, const RefineParams& params);

}  // namespace balltrack
