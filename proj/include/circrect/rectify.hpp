#pragma once

#include <circrect/camera_model.hpp>
#include <circrect/circle_fit.hpp>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace circrect {

// Reduced per-camera parameter set of a circularly rectified rig. Rotation and
// translation are implied by (alpha, r) and the shared circle.
struct CircularCameraParams {
  int id{};
  double fx{1.0};
  double ox{0.0};
  double oy{0.0};
  double alpha{0.0};
  double r{1.0};
  int width{1};
  int height{1};
};

// Depth at which the original principal pixel is lifted to 3D when solving
// for the new horizontal principal point.
enum class OxPolicy {
  Convergence,  // least-squares closest point to all original optical axes
  CircleCenter, // the fitted circle centre at the common camera height
};

auto to_string(OxPolicy policy) -> std::string_view;
auto parse_ox_policy(std::string_view text) -> OxPolicy;

struct RectifiedRig {
  Circle circle;
  std::vector<CircularCameraParams> cameras;
  std::vector<CameraParams> full_params;
  double common_fy{};
  double camera_height{};
  OxPolicy ox_policy{OxPolicy::Convergence};
  Vec3 ox_target{Vec3::Zero()};
};

// The rotation of the ideal circular arrangement:
//   [ cos a  0  sin a ]
//   [   0    1    0   ]
//   [-sin a  0  cos a ]
auto rectified_rotation(double alpha) -> Mat3;

// World -> camera rotation of a rectified camera at angle `alpha`.
//
// rectified_rotation(alpha) is the orientation of a frame whose z axis points
// radially outwards through the camera position. The camera itself faces the
// circle centre, i.e. that frame turned by pi about y:
//   R_wc = diag(-1, 1, -1) * rectified_rotation(alpha)^T
// With this choice the circular projection formulas agree with the full
// projection matrix path exactly.
auto rectified_world_to_camera(double alpha) -> Mat3;

// Mean height (world y) of the camera centres.
auto mean_camera_height(std::span<const CameraParams> rig) -> double;

// Least-squares point closest to all optical axes of the rig.
auto convergence_point(std::span<const CameraParams> rig) -> Vec3;

// Corrected intrinsics for every camera (zero skew, averaged f_x, f_y, o_y and
// a per-camera o_x that keeps the original principal point's scene content at
// the original o_x column).
auto rectify_intrinsics(std::span<const CameraParams> rig, const Circle &circle,
                        OxPolicy policy = OxPolicy::Convergence) -> std::vector<Intrinsics>;

auto rectify_rig(std::span<const CameraParams> rig, OxPolicy policy = OxPolicy::Convergence)
    -> RectifiedRig;

auto circular_to_full(const CircularCameraParams &c, const Circle &circle, double common_fy,
                      double camera_height) -> CameraParams;

// Extraction used by rectify_rig. The camera must already sit on the circle.
auto full_to_circular(const CameraParams &cam, const Circle &circle) -> CircularCameraParams;

} // namespace circrect
