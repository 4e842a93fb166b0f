#pragma once

#include <Eigen/Core>

namespace circrect {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Coordinate convention used throughout the library:
//
//   X_cam = R * X_world + T        (R: world -> camera, T: world offset)
//   x     = f_x * X/Z + c * Y/Z + o_x
//   y     = f_y * Y/Z + o_y
//
// The camera looks down +Z and depth is the Z coordinate in camera space
// (distance along the optical axis, not along the ray). The camera centre is
// C = -R^T T.

struct Intrinsics {
  double fx{1.0};
  double fy{1.0};
  double ox{0.0};
  double oy{0.0};
  double skew{0.0};

  [[nodiscard]] auto matrix() const -> Mat3;

  friend auto operator==(const Intrinsics &, const Intrinsics &) -> bool = default;
};

struct Extrinsics {
  Mat3 R{Mat3::Identity()};
  Vec3 T{Vec3::Zero()};

  [[nodiscard]] auto center() const -> Vec3 { return -R.transpose() * T; }
  // World-space direction of the +Z camera axis.
  [[nodiscard]] auto optical_axis() const -> Vec3 { return R.row(2).transpose(); }

  static auto from_center(const Mat3 &R, const Vec3 &center) -> Extrinsics {
    return {R, -R * center};
  }
};

struct CameraParams {
  int id{};
  Intrinsics intr{};
  Extrinsics extr{};
  int width{1};
  int height{1};

  [[nodiscard]] auto center() const -> Vec3 { return extr.center(); }
  [[nodiscard]] auto optical_axis() const -> Vec3 { return extr.optical_axis(); }
};

// Throws Error{InvalidArgument} naming the camera id and the violated bound.
void validate(const CameraParams &cam);
void validate(const Intrinsics &intr);
void validate(const Extrinsics &extr);

// 4x4 matrix [K 0; 0 1] * [R T; 0 1]. The bottom row is exactly (0, 0, 0, 1)
// and the matrix is checked for numerical singularity at construction.
class ProjectionMatrix {
public:
  explicit ProjectionMatrix(const Mat4 &m);

  [[nodiscard]] auto matrix() const -> const Mat4 & { return m_matrix; }

private:
  struct Trusted {};
  ProjectionMatrix(const Mat4 &m, Trusted) : m_matrix{m} {}
  friend auto invert_projection(const ProjectionMatrix &P) -> ProjectionMatrix;

  Mat4 m_matrix;
};

// Point in a view: pixel coordinates plus depth along that view's optical axis.
struct ImagePoint {
  double x{};
  double y{};
  double z{};
};

inline constexpr double kMinReciprocalCondition = 1e-12;

auto build_projection(const CameraParams &cam) -> ProjectionMatrix;
auto invert_projection(const ProjectionMatrix &P) -> ProjectionMatrix;

// P_dst * P_src^-1, the matrix of the full point-correspondence equation.
auto relative_projection(const CameraParams &src, const CameraParams &dst) -> Mat4;

// Applies a relative projection to (z*x, z*y, z, 1). Returns false when the
// resulting depth is not positive.
auto apply_relative_projection(const Mat4 &M, const ImagePoint &p, ImagePoint &out) -> bool;

// Maps a point seen by `src` to the corresponding point in `dst`.
// Throws BehindCamera when the destination depth is not positive and
// SingularProjection when P_src cannot be inverted.
auto project_point(const CameraParams &src, const CameraParams &dst, const ImagePoint &p)
    -> ImagePoint;

auto unproject(const CameraParams &cam, const ImagePoint &p) -> Vec3;
auto project_world(const CameraParams &cam, const Vec3 &world) -> ImagePoint;

} // namespace circrect
