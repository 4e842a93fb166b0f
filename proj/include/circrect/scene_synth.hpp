#pragma once

#include <circrect/camera_model.hpp>
#include <circrect/dibr_warp.hpp>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace circrect {

struct RigSpec {
  int n_cameras{8};
  double radius{5.0};
  double x_cen{0.0};
  double z_cen{0.0};
  double camera_height{0.0};
  double arc_span{2.0 * std::numbers::pi};
  double arc_center{0.0}; // angle of the middle of the arc
  double position_noise{0.0};
  double rotation_noise{0.0}; // radians, per axis
  std::uint64_t seed{1};
  Intrinsics intrinsics{500.0, 500.0, 320.0, 240.0, 0.0};
  int image_width{640};
  int image_height{480};

  friend auto operator==(const RigSpec &, const RigSpec &) -> bool = default;
};

void validate(const RigSpec &spec);

// Cameras at equally spaced angles facing the circle centre. A full circle
// (arc_span = 2 pi) spaces them by 2 pi / n; a partial arc puts the first and
// last camera on its ends. Noise draws six standard normals per camera, in
// order: position x, y, z, then rotation vector x, y, z.
auto synth_rig(const RigSpec &spec) -> std::vector<CameraParams>;

enum class TextureKind { Checker, Gradient, Noise };
enum class PrimitiveKind { Plane, Sphere, Box };

auto to_string(TextureKind kind) -> std::string_view;
auto to_string(PrimitiveKind kind) -> std::string_view;
auto parse_texture_kind(std::string_view text) -> TextureKind;
auto parse_primitive_kind(std::string_view text) -> PrimitiveKind;

// Solid texture evaluated at world positions, so every view samples the same
// surface colour.
struct Texture {
  TextureKind kind{TextureKind::Noise};
  double luma{128.0};
  double luma_amplitude{60.0};
  double chroma_u{128.0};
  double chroma_v{128.0};
  double chroma_amplitude{16.0};
  double scale{1.0}; // checker cell, noise lattice spacing or ramp half-length
  Vec3 direction{1.0, 0.0, 0.0}; // gradient direction
  std::uint64_t seed{1};

  friend auto operator==(const Texture &, const Texture &) -> bool = default;
};

struct YuvSample {
  double y{};
  double u{};
  double v{};
};

auto sample_texture(const Texture &texture, const Vec3 &world) -> YuvSample;

struct Primitive {
  PrimitiveKind kind{PrimitiveKind::Sphere};
  Vec3 center{Vec3::Zero()};
  Vec3 normal{0.0, 0.0, 1.0};       // plane
  double radius{1.0};               // sphere
  Vec3 half_extents{1.0, 1.0, 1.0}; // box
  double yaw{0.0};                  // box rotation about world y
  Texture texture{};

  friend auto operator==(const Primitive &, const Primitive &) -> bool = default;
};

struct SceneSpec {
  std::vector<Primitive> primitives;
  double background_depth{100.0};
  double background_luma{16.0};
  double z_near{1.0};
  double z_far{100.0};

  friend auto operator==(const SceneSpec &, const SceneSpec &) -> bool = default;
};

void validate(const SceneSpec &spec);

// Nearest hit distance along origin + t * dir (t > 0), if any.
auto intersect(const Primitive &primitive, const Vec3 &origin, const Vec3 &dir)
    -> std::optional<double>;

// One ray per pixel centre (integer pixel coordinates). Depth is the camera
// z of the nearest hit; missed rays get the background.
auto render(const SceneSpec &scene, const CameraParams &cam) -> ViewFrame;

// Scene used by the bundled experiment: back wall, floor, two spheres and a
// box around the origin, lit for a rig of radius ~5 facing the origin.
auto default_scene() -> SceneSpec;

} // namespace circrect
