#pragma once

#include <circrect/camera_model.hpp>
#include <circrect/error.hpp>
#include <circrect/rectify.hpp>
#include <circrect/rng.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

namespace testing {

using namespace circrect;

inline auto random_rotation(SplitMix64 &rng) -> Mat3 {
  Eigen::Quaterniond q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  q.normalize();
  return q.toRotationMatrix();
}

inline auto random_camera(SplitMix64 &rng, int id = 0) -> CameraParams {
  auto cam = CameraParams{};
  cam.id = id;
  cam.intr = {rng.uniform(300.0, 1500.0), rng.uniform(300.0, 1500.0), rng.uniform(200.0, 700.0),
              rng.uniform(150.0, 500.0), rng.uniform(-2.0, 2.0)};
  cam.extr = Extrinsics::from_center(random_rotation(rng),
                                     {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)});
  cam.width = 1024;
  cam.height = 768;
  return cam;
}

// Camera looking roughly at the origin from a random direction at distance d.
inline auto camera_facing_origin(SplitMix64 &rng, double d, int id = 0) -> CameraParams {
  Vec3 c{rng.normal(), rng.normal() * 0.3, rng.normal()};
  c = c.normalized() * d;
  const Vec3 z = (-c).normalized();
  Vec3 x = Vec3::UnitY().cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.row(0) = x.transpose();
  R.row(1) = y.transpose();
  R.row(2) = z.transpose();
  const Mat3 jitter = Eigen::AngleAxisd{rng.uniform(-0.05, 0.05), Vec3::UnitY()}.toRotationMatrix();
  auto cam = CameraParams{};
  cam.id = id;
  cam.intr = {rng.uniform(400.0, 1200.0), rng.uniform(400.0, 1200.0), rng.uniform(300.0, 340.0),
              rng.uniform(220.0, 260.0), rng.uniform(-1.0, 1.0)};
  cam.extr = Extrinsics::from_center(jitter * R, c);
  cam.width = 640;
  cam.height = 480;
  return cam;
}

// Two views of a rectified rig with shared f_x, o_y and r.
struct RandomCircularPair {
  CircularCameraParams a;
  CircularCameraParams b;
  Circle circle;
  double common_fy{};
  double camera_height{};
};

inline auto random_circular_pair(SplitMix64 &rng) -> RandomCircularPair {
  auto p = RandomCircularPair{};
  p.circle = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(1.0, 20.0)};
  p.common_fy = rng.uniform(300.0, 1500.0);
  p.camera_height = rng.uniform(-3, 3);
  const auto fx = rng.uniform(300.0, 1500.0);
  const auto oy = rng.uniform(100.0, 600.0);
  p.a = {0, fx, rng.uniform(100.0, 900.0), oy, rng.uniform(-std::numbers::pi, std::numbers::pi),
         p.circle.r, 1024, 768};
  p.b = {1, fx, rng.uniform(100.0, 900.0), oy,
         p.a.alpha + rng.uniform(-std::numbers::pi / 3, std::numbers::pi / 3), p.circle.r, 1024,
         768};
  return p;
}

template <typename F> void check_throws_kind(F &&f, ErrorKind kind) {
  try {
    f();
    FAIL("expected ", to_string(kind));
  } catch (const Error &e) {
    CHECK_MESSAGE(e.kind() == kind, e.what());
  }
}

template <typename F> auto error_message(F &&f) -> std::string {
  try {
    f();
  } catch (const std::exception &e) {
    return e.what();
  }
  return {};
}

} // namespace testing
