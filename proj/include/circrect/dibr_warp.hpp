#pragma once

#include <circrect/camera_model.hpp>
#include <circrect/image.hpp>

#include <cmath>
#include <cstdint>
#include <span>

namespace circrect {

// Texture (4:2:0, 8 bit) plus 16-bit normalised inverse depth for one view.
struct ViewFrame {
  Plane8 luma;
  Plane8 chroma_u;
  Plane8 chroma_v;
  Plane16 depth;
  double z_near{1.0};
  double z_far{100.0};

  [[nodiscard]] auto width() const noexcept { return luma.width(); }
  [[nodiscard]] auto height() const noexcept { return luma.height(); }

  friend auto operator==(const ViewFrame &, const ViewFrame &) -> bool = default;
};

auto make_frame(int width, int height, double z_near, double z_far) -> ViewFrame;

// Throws InvalidArgument on odd dimensions, mismatched planes or a bad depth range.
void validate(const ViewFrame &frame);

// 1/z = (v / 65535) (1/z_near - 1/z_far) + 1/z_far
auto depth_sample_to_z(std::uint16_t v, double z_near, double z_far) -> double;
// Inverse of depth_sample_to_z, rounded to nearest and clamped to [0, 65535].
auto z_to_depth_sample(double z, double z_near, double z_far) -> std::uint16_t;

struct WarpedFrame {
  ViewFrame frame;
  Plane8 mask; // 1 = a source pixel landed here
  double hole_fraction{};
  std::size_t degenerate_count{}; // source pixels whose projection was rejected
};

// Destination pixel of a projected coordinate: nearest integer, ties toward -inf.
inline auto round_coordinate(double v) -> double { return std::ceil(v - 0.5); }

// Z-buffered nearest-pixel splat of `src` using precomputed destination
// positions (one per source pixel, row-major). Chroma is duplicated to luma
// resolution, splatted with luma and averaged back over valid samples.
auto splat(const ViewFrame &src, std::span<const ImagePoint> projected,
           std::span<const std::uint8_t> valid, int dst_width, int dst_height) -> WarpedFrame;

// Forward warp through the full projection matrix path.
auto warp_view(const ViewFrame &src, const CameraParams &cam_src, const CameraParams &cam_dst)
    -> WarpedFrame;

// Row-wise two-sided interpolation with background bias: a hole takes the
// distance-weighted mean of the nearest valid samples to its left and right
// unless their depths differ by more than 5% of the depth range, in which
// case the farther sample is copied. Throws AllInvalid when nothing is valid.
auto fill_holes(const WarpedFrame &warped) -> ViewFrame;

inline constexpr double kBackgroundBiasFraction = 0.05;

} // namespace circrect
