#pragma once

#include <span>
#include <vector>

namespace circrect {

// Position in the horizontal (x, z) plane of the rig. Heights are ignored.
struct GroundPoint {
  double x{};
  double z{};
};

struct Circle {
  double x_cen{};
  double z_cen{};
  double r{1.0};
};

struct FitResult {
  Circle circle;
  double residual{};
  int iterations{};
  std::vector<double> per_camera_distance;
};

// Sum over points of (distance to centre - r)^2.
auto circle_objective(std::span<const GroundPoint> points, const Circle &circle) -> double;

// Algebraic fit of x^2 + z^2 + D x + E z + F = 0. Used as the seed of fit_circle.
auto kasa_fit(std::span<const GroundPoint> points) -> Circle;

// Geometric least-squares circle (Gauss-Newton with step halving, Kasa seed).
// Throws DegenerateInput for fewer than three distinct points and
// CollinearCameras when the best radius exceeds 1e6 times the point spread.
auto fit_circle(std::span<const GroundPoint> points) -> FitResult;

// Nearest point of the circle. Throws AtCenter when `pos` is the centre.
auto snap_to_circle(const GroundPoint &pos, const Circle &circle) -> GroundPoint;

// Angle with cos = (z - z_cen) / r and sin = (x - x_cen) / r, in (-pi, pi].
// Throws NotOnCircle when the point is more than 1e-6 r off the circle.
auto camera_angle(const GroundPoint &pos_on_circle, const Circle &circle) -> double;

} // namespace circrect
