#pragma once

#include <circrect/camera_model.hpp>
#include <circrect/rectify.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace circrect {

// Two views of a circularly rectified rig. Construction checks that f_x, o_y
// and r are bit-identical and caches sin/cos of the angle difference.
class CircularPair {
public:
  CircularPair(const CircularCameraParams &a, const CircularCameraParams &b);

  [[nodiscard]] auto fx() const noexcept { return m_fx; }
  [[nodiscard]] auto oy() const noexcept { return m_oy; }
  [[nodiscard]] auto r() const noexcept { return m_r; }
  [[nodiscard]] auto ox_a() const noexcept { return m_oxA; }
  [[nodiscard]] auto ox_b() const noexcept { return m_oxB; }
  [[nodiscard]] auto delta_alpha() const noexcept { return m_deltaAlpha; }
  [[nodiscard]] auto sin_delta() const noexcept { return m_sin; }
  [[nodiscard]] auto cos_delta() const noexcept { return m_cos; }

  // Pair for the opposite direction (B -> A).
  [[nodiscard]] auto reversed() const -> CircularPair;

private:
  CircularPair() = default;

  double m_fx{};
  double m_oy{};
  double m_r{};
  double m_oxA{};
  double m_oxB{};
  double m_deltaAlpha{};
  double m_sin{};
  double m_cos{1.0};
};

// Depth, then height, then column: y and x both divide by the new depth.
// Returns false when the destination depth is not above 1e-9 r.
inline auto project_circular_kernel(const CircularPair &pair, double dx, double dy, double zA,
                                    ImagePoint &out) noexcept -> bool {
  const auto zB = dx * (zA / pair.fx()) * pair.sin_delta() + (zA - pair.r()) * pair.cos_delta() +
                  pair.r();
  if (!(zB > 1e-9 * pair.r())) {
    return false;
  }
  out.z = zB;
  out.y = pair.oy() + (zA / zB) * dy;
  out.x = pair.ox_b() +
          (1.0 / zB) * (dx * zA * pair.cos_delta() - (zA - pair.r()) * pair.fx() * pair.sin_delta());
  return true;
}

inline auto try_project_circular(const CircularPair &pair, const ImagePoint &p,
                                 ImagePoint &out) noexcept -> bool {
  return project_circular_kernel(pair, p.x - pair.ox_a(), p.y - pair.oy(), p.z, out);
}

// Throws BehindCamera when the point does not land in front of view B.
auto project_circular(const CircularPair &pair, const ImagePoint &p) -> ImagePoint;

struct BatchResult {
  std::vector<ImagePoint> points;
  std::vector<std::uint8_t> valid;
};

auto project_circular_batch(const CircularPair &pair, std::span<const ImagePoint> points)
    -> BatchResult;

// Dense pixel grid: point (col, row) has x = col, y = row and depth
// depth[row * width + col]. Column and row offsets are computed once.
auto project_circular_grid(const CircularPair &pair, std::span<const double> depth, int width,
                           int height) -> BatchResult;
void project_circular_grid(const CircularPair &pair, std::span<const double> depth, int width,
                           int height, std::span<ImagePoint> points,
                           std::span<std::uint8_t> valid);

// Parameters of a linearly rectified pair: shared f_x, per-view o_x and the
// difference of the world-offset x translations (t_xB - t_xA).
struct LinearPair {
  double fx{1.0};
  double ox_a{0.0};
  double ox_b{0.0};
  double tx{0.0};
};

// x_B = x_A + (o_xB - o_xA) + f_x t_x / z_A; y and z unchanged.
auto disparity_predict(const LinearPair &pair, const ImagePoint &p) -> ImagePoint;

// Linear description of two arbitrary cameras, ignoring their relative
// rotation: t_x is minus the x coordinate of camera B's centre in camera A's
// frame and f_x is the mean of both focal lengths.
auto linear_pair_from_cameras(const CameraParams &a, const CameraParams &b) -> LinearPair;

} // namespace circrect
