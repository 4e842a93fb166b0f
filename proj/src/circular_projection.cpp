#include <circrect/circular_projection.hpp>
#include <circrect/error.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace circrect {

CircularPair::CircularPair(const CircularCameraParams &a, const CircularCameraParams &b) {
  if (a.fx != b.fx || a.oy != b.oy || a.r != b.r) {
    throw Error{ErrorKind::InvalidArgument,
                "circular pair must share bit-identical f_x, o_y and r"};
  }
  if (!(a.fx > 0.0) || !(a.r > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "f_x and r must be positive"};
  }
  m_fx = a.fx;
  m_oy = a.oy;
  m_r = a.r;
  m_oxA = a.ox;
  m_oxB = b.ox;
  m_deltaAlpha = b.alpha - a.alpha;
  if (!(std::abs(m_deltaAlpha) < 2.0 * std::numbers::pi)) {
    throw Error{ErrorKind::InvalidArgument, "angle difference must lie in (-2 pi, 2 pi)"};
  }
  m_sin = std::sin(m_deltaAlpha);
  m_cos = std::cos(m_deltaAlpha);
}

auto CircularPair::reversed() const -> CircularPair {
  auto out = *this;
  out.m_oxA = m_oxB;
  out.m_oxB = m_oxA;
  out.m_deltaAlpha = -m_deltaAlpha;
  out.m_sin = std::sin(out.m_deltaAlpha);
  out.m_cos = std::cos(out.m_deltaAlpha);
  return out;
}

auto project_circular(const CircularPair &pair, const ImagePoint &p) -> ImagePoint {
  if (!(p.z > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "source depth must be positive"};
  }
  auto out = ImagePoint{};
  if (!try_project_circular(pair, p, out)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ", " << p.z << ") lands behind view B";
    throw Error{ErrorKind::BehindCamera, msg.str()};
  }
  return out;
}

auto project_circular_batch(const CircularPair &pair, std::span<const ImagePoint> points)
    -> BatchResult {
  auto result = BatchResult{};
  result.points.resize(points.size());
  result.valid.resize(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    const auto &p = points[i];
    result.valid[i] = p.z > 0.0 && try_project_circular(pair, p, result.points[i]) ? 1 : 0;
  }
  return result;
}

void project_circular_grid(const CircularPair &pair, std::span<const double> depth, int width,
                           int height, std::span<ImagePoint> points,
                           std::span<std::uint8_t> valid) {
  const auto n = static_cast<size_t>(width) * static_cast<size_t>(height);
  if (width < 0 || height < 0 || depth.size() != n || points.size() != n || valid.size() != n) {
    throw Error{ErrorKind::InvalidArgument, "depth plane does not match grid size"};
  }
  auto dx = std::vector<double>(static_cast<size_t>(width));
  for (int col = 0; col < width; ++col) {
    dx[static_cast<size_t>(col)] = static_cast<double>(col) - pair.ox_a();
  }
  for (int row = 0; row < height; ++row) {
    const auto dy = static_cast<double>(row) - pair.oy();
    const auto offset = static_cast<size_t>(row) * static_cast<size_t>(width);
    for (int col = 0; col < width; ++col) {
      const auto i = offset + static_cast<size_t>(col);
      const auto z = depth[i];
      valid[i] = z > 0.0 && project_circular_kernel(pair, dx[static_cast<size_t>(col)], dy, z,
                                                    points[i])
                     ? 1
                     : 0;
    }
  }
}

auto project_circular_grid(const CircularPair &pair, std::span<const double> depth, int width,
                           int height) -> BatchResult {
  if (width < 0 || height < 0) {
    throw Error{ErrorKind::InvalidArgument, "depth plane does not match grid size"};
  }
  const auto n = static_cast<size_t>(width) * static_cast<size_t>(height);
  auto result = BatchResult{};
  result.points.resize(n);
  result.valid.resize(n);
  project_circular_grid(pair, depth, width, height, result.points, result.valid);
  return result;
}

auto disparity_predict(const LinearPair &pair, const ImagePoint &p) -> ImagePoint {
  if (!(p.z > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "source depth must be positive"};
  }
  return {p.x + (pair.ox_b - pair.ox_a) + pair.fx * pair.tx / p.z, p.y, p.z};
}

auto linear_pair_from_cameras(const CameraParams &a, const CameraParams &b) -> LinearPair {
  const Vec3 b_in_a = a.extr.R * b.center() + a.extr.T;
  return {0.5 * (a.intr.fx + b.intr.fx), a.intr.ox, b.intr.ox, -b_in_a.x()};
}

} // namespace circrect
