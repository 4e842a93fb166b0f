#include <circrect/error.hpp>
#include <circrect/rectify.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

namespace circrect {
namespace {
auto ground(const Vec3 &p) -> GroundPoint { return {p.x(), p.z()}; }

auto rectification_failure(const CameraParams &cam, const Error &cause) -> Error {
  std::ostringstream msg;
  msg << "camera " << cam.id << ": " << cause.what();
  return Error{ErrorKind::RectificationFailure, msg.str()};
}

template <typename Field> auto mean_of(std::span<const CameraParams> rig, Field field) -> double {
  auto sum = 0.0;
  for (const auto &cam : rig) {
    sum += field(cam);
  }
  return sum / static_cast<double>(rig.size());
}
} // namespace

auto to_string(OxPolicy policy) -> std::string_view {
  switch (policy) {
  case OxPolicy::Convergence:
    return "convergence";
  case OxPolicy::CircleCenter:
    return "circle-center";
  }
  return "convergence";
}

auto parse_ox_policy(std::string_view text) -> OxPolicy {
  if (text == "convergence") {
    return OxPolicy::Convergence;
  }
  if (text == "circle-center") {
    return OxPolicy::CircleCenter;
  }
  throw Error{ErrorKind::InvalidArgument,
              "unknown o_x policy '" + std::string{text} + "' (expected convergence|circle-center)"};
}

auto rectified_rotation(double alpha) -> Mat3 {
  const auto c = std::cos(alpha);
  const auto s = std::sin(alpha);
  Mat3 R;
  R << c, 0.0, s, //
      0.0, 1.0, 0.0,
      -s, 0.0, c;
  return R;
}

auto rectified_world_to_camera(double alpha) -> Mat3 {
  const Mat3 flip = Eigen::Vector3d{-1.0, 1.0, -1.0}.asDiagonal();
  return flip * rectified_rotation(alpha).transpose();
}

auto mean_camera_height(std::span<const CameraParams> rig) -> double {
  return mean_of(rig, [](const CameraParams &c) { return c.center().y(); });
}

auto convergence_point(std::span<const CameraParams> rig) -> Vec3 {
  Mat3 A = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto &cam : rig) {
    const Vec3 d = cam.optical_axis().normalized();
    const Mat3 proj = Mat3::Identity() - d * d.transpose();
    A += proj;
    b += proj * cam.center();
  }
  const Eigen::ColPivHouseholderQR<Mat3> qr{A};
  if (qr.rank() < 3) {
    throw Error{ErrorKind::IllConditioned,
                "optical axes are parallel; no convergence point (use the circle-center policy)"};
  }
  return qr.solve(b);
}

auto rectify_intrinsics(std::span<const CameraParams> rig, const Circle &circle, OxPolicy policy)
    -> std::vector<Intrinsics> {
  if (rig.empty()) {
    throw Error{ErrorKind::InvalidArgument, "rig is empty"};
  }
  const auto height = mean_camera_height(rig);
  const auto fx = mean_of(rig, [](const CameraParams &c) { return c.intr.fx; });
  const auto fy = mean_of(rig, [](const CameraParams &c) { return c.intr.fy; });
  const auto oy = mean_of(rig, [](const CameraParams &c) { return c.intr.oy; });

  const Vec3 target = policy == OxPolicy::Convergence ? convergence_point(rig)
                                                      : Vec3{circle.x_cen, height, circle.z_cen};

  auto result = std::vector<Intrinsics>{};
  result.reserve(rig.size());
  for (const auto &cam : rig) {
    const Vec3 center = cam.center();
    const Vec3 axis = cam.optical_axis();
    const auto depth = axis.dot(target - center);
    if (!(depth > 0.0)) {
      std::ostringstream msg;
      msg << "camera " << cam.id << ": o_x target lies behind the original camera";
      throw Error{ErrorKind::PointBehindCamera, msg.str()};
    }
    const Vec3 q = center + depth * axis;

    const auto snapped = snap_to_circle(ground(center), circle);
    const auto alpha = camera_angle(snapped, circle);
    const Vec3 new_center{snapped.x, height, snapped.z};
    const Vec3 qc = rectified_world_to_camera(alpha) * (q - new_center);
    if (!(qc.z() > 0.0)) {
      std::ostringstream msg;
      msg << "camera " << cam.id << ": lifted principal point has depth " << qc.z()
          << " in the rectified camera";
      throw Error{ErrorKind::PointBehindCamera, msg.str()};
    }
    result.push_back({fx, fy, cam.intr.ox - fx * qc.x() / qc.z(), oy, 0.0});
  }
  return result;
}

auto circular_to_full(const CircularCameraParams &c, const Circle &circle, double common_fy,
                      double camera_height) -> CameraParams {
  const Vec3 center{circle.x_cen + c.r * std::sin(c.alpha), camera_height,
                    circle.z_cen + c.r * std::cos(c.alpha)};
  auto cam = CameraParams{};
  cam.id = c.id;
  cam.intr = {c.fx, common_fy, c.ox, c.oy, 0.0};
  cam.extr = Extrinsics::from_center(rectified_world_to_camera(c.alpha), center);
  cam.width = c.width;
  cam.height = c.height;
  return cam;
}

auto full_to_circular(const CameraParams &cam, const Circle &circle) -> CircularCameraParams {
  return {cam.id,          cam.intr.fx,
          cam.intr.ox,     cam.intr.oy,
          camera_angle(ground(cam.center()), circle),
          circle.r,        cam.width,
          cam.height};
}

auto rectify_rig(std::span<const CameraParams> rig, OxPolicy policy) -> RectifiedRig {
  if (rig.size() < 3) {
    throw Error{ErrorKind::DegenerateInput, "rectification needs at least three cameras"};
  }
  auto positions = std::vector<GroundPoint>{};
  positions.reserve(rig.size());
  for (const auto &cam : rig) {
    validate(cam);
    positions.push_back(ground(cam.center()));
  }

  auto out = RectifiedRig{};
  out.circle = fit_circle(positions).circle;
  out.camera_height = mean_camera_height(rig);
  out.ox_policy = policy;
  out.ox_target = policy == OxPolicy::Convergence
                      ? convergence_point(rig)
                      : Vec3{out.circle.x_cen, out.camera_height, out.circle.z_cen};

  auto intrinsics = std::vector<Intrinsics>{};
  try {
    intrinsics = rectify_intrinsics(rig, out.circle, policy);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::IllConditioned) {
      throw;
    }
    throw Error{ErrorKind::RectificationFailure, e.what()};
  }
  out.common_fy = intrinsics.front().fy;

  for (size_t i = 0; i < rig.size(); ++i) {
    const auto &cam = rig[i];
    try {
      const auto snapped = snap_to_circle(ground(cam.center()), out.circle);
      auto circ = CircularCameraParams{};
      circ.id = cam.id;
      circ.fx = intrinsics[i].fx;
      circ.ox = intrinsics[i].ox;
      circ.oy = intrinsics[i].oy;
      circ.alpha = camera_angle(snapped, out.circle);
      circ.r = out.circle.r;
      circ.width = cam.width;
      circ.height = cam.height;
      out.cameras.push_back(circ);
      out.full_params.push_back(
          circular_to_full(circ, out.circle, out.common_fy, out.camera_height));
    } catch (const Error &e) {
      throw rectification_failure(cam, e);
    }
  }
  return out;
}

} // namespace circrect
