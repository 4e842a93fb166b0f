#include <circrect/error.hpp>
#include <circrect/rectify.hpp>
#include <circrect/rng.hpp>
#include <circrect/scene_synth.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace circrect {
namespace {
auto wrap_angle(double a) -> double {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) {
    a += 2.0 * std::numbers::pi;
  }
  return a;
}

auto mix(std::uint64_t z) -> std::uint64_t {
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

// Lattice value in [-1, 1].
auto lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t iz) -> double {
  auto h = mix(seed + 0x9E3779B97F4A7C15ULL);
  h = mix(h ^ static_cast<std::uint64_t>(ix));
  h = mix(h ^ static_cast<std::uint64_t>(iy));
  h = mix(h ^ static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11U) * 0x1.0p-52 - 1.0;
}

auto smooth(double t) -> double { return t * t * (3.0 - 2.0 * t); }

// Trilinear value noise with smoothstep weights, continuous everywhere.
auto value_noise(std::uint64_t seed, const Vec3 &p) -> double {
  const auto fx = std::floor(p.x());
  const auto fy = std::floor(p.y());
  const auto fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const auto tx = smooth(p.x() - fx);
  const auto ty = smooth(p.y() - fy);
  const auto tz = smooth(p.z() - fz);

  auto acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const auto w = (dx != 0 ? tx : 1.0 - tx) * (dy != 0 ? ty : 1.0 - ty) *
                       (dz != 0 ? tz : 1.0 - tz);
        acc += w * lattice(seed, ix + dx, iy + dy, iz + dz);
      }
    }
  }
  return acc;
}

auto clamp8(double v) -> std::uint8_t {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}
} // namespace

void validate(const RigSpec &spec) {
  if (spec.n_cameras < 3) {
    throw Error{ErrorKind::InvalidArgument, "rig needs at least three cameras"};
  }
  if (!(spec.radius > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "rig radius must be positive"};
  }
  if (!(spec.arc_span > 0.0 && spec.arc_span <= 2.0 * std::numbers::pi)) {
    throw Error{ErrorKind::InvalidArgument, "arc_span must lie in (0, 2 pi]"};
  }
  if (spec.position_noise < 0.0 || spec.rotation_noise < 0.0) {
    throw Error{ErrorKind::InvalidArgument, "noise scales must be non-negative"};
  }
  if (spec.image_width <= 0 || spec.image_height <= 0 || spec.image_width % 2 != 0 ||
      spec.image_height % 2 != 0) {
    throw Error{ErrorKind::InvalidArgument, "image size must be positive and even"};
  }
  validate(spec.intrinsics);
}

auto synth_rig(const RigSpec &spec) -> std::vector<CameraParams> {
  validate(spec);
  auto rng = SplitMix64{spec.seed};
  const auto full = spec.arc_span >= 2.0 * std::numbers::pi - 1e-12;
  const auto n = spec.n_cameras;

  auto rig = std::vector<CameraParams>{};
  rig.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto alpha = wrap_angle(
        full ? spec.arc_center + i * spec.arc_span / n
             : spec.arc_center - 0.5 * spec.arc_span + i * spec.arc_span / (n - 1));

    Vec3 noise_pos;
    Vec3 noise_rot;
    for (int k = 0; k < 3; ++k) {
      noise_pos[k] = rng.normal();
    }
    for (int k = 0; k < 3; ++k) {
      noise_rot[k] = rng.normal();
    }

    Vec3 center{spec.x_cen + spec.radius * std::sin(alpha), spec.camera_height,
                spec.z_cen + spec.radius * std::cos(alpha)};
    Mat3 R = rectified_world_to_camera(alpha);
    if (spec.position_noise > 0.0) {
      center += spec.position_noise * noise_pos;
    }
    if (spec.rotation_noise > 0.0) {
      const Vec3 v = spec.rotation_noise * noise_rot;
      const Mat3 dR = Eigen::AngleAxisd{v.norm(), v.normalized()}.toRotationMatrix();
      R = dR * R;
    }

    auto cam = CameraParams{};
    cam.id = i;
    cam.intr = spec.intrinsics;
    cam.extr = Extrinsics::from_center(R, center);
    cam.width = spec.image_width;
    cam.height = spec.image_height;
    rig.push_back(cam);
  }
  return rig;
}

auto to_string(TextureKind kind) -> std::string_view {
  switch (kind) {
  case TextureKind::Checker:
    return "checker";
  case TextureKind::Gradient:
    return "gradient";
  case TextureKind::Noise:
    return "noise";
  }
  return "noise";
}

auto to_string(PrimitiveKind kind) -> std::string_view {
  switch (kind) {
  case PrimitiveKind::Plane:
    return "plane";
  case PrimitiveKind::Sphere:
    return "sphere";
  case PrimitiveKind::Box:
    return "box";
  }
  return "sphere";
}

auto parse_texture_kind(std::string_view text) -> TextureKind {
  for (const auto k : {TextureKind::Checker, TextureKind::Gradient, TextureKind::Noise}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  throw Error{ErrorKind::InvalidArgument, "unknown texture kind '" + std::string{text} + "'"};
}

auto parse_primitive_kind(std::string_view text) -> PrimitiveKind {
  for (const auto k : {PrimitiveKind::Plane, PrimitiveKind::Sphere, PrimitiveKind::Box}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  throw Error{ErrorKind::InvalidArgument, "unknown primitive kind '" + std::string{text} + "'"};
}

auto sample_texture(const Texture &t, const Vec3 &world) -> YuvSample {
  auto pattern = 0.0;
  auto pattern2 = 0.0;
  switch (t.kind) {
  case TextureKind::Checker: {
    const Vec3 cell = (world / t.scale).array().floor();
    const auto parity = static_cast<std::int64_t>(cell.x() + cell.y() + cell.z());
    pattern = (parity % 2 == 0) ? 1.0 : -1.0;
    pattern2 = -pattern;
    break;
  }
  case TextureKind::Gradient:
    pattern = std::clamp(t.direction.normalized().dot(world) / t.scale, -1.0, 1.0);
    pattern2 = -pattern;
    break;
  case TextureKind::Noise:
    pattern = value_noise(t.seed, world / t.scale);
    pattern2 = value_noise(t.seed ^ 0xA5A5A5A5ULL, world / t.scale);
    break;
  }
  return {t.luma + t.luma_amplitude * pattern, t.chroma_u + t.chroma_amplitude * pattern2,
          t.chroma_v - t.chroma_amplitude * pattern};
}

void validate(const SceneSpec &spec) {
  if (!(spec.z_near > 0.0) || !(spec.z_near < spec.z_far)) {
    throw Error{ErrorKind::InvalidArgument, "scene depth range must satisfy 0 < z_near < z_far"};
  }
  if (!(spec.background_depth > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "background depth must be positive"};
  }
  for (const auto &p : spec.primitives) {
    if (p.kind == PrimitiveKind::Sphere && !(p.radius > 0.0)) {
      throw Error{ErrorKind::InvalidArgument, "sphere radius must be positive"};
    }
    if (p.kind == PrimitiveKind::Plane && !(p.normal.norm() > 0.0)) {
      throw Error{ErrorKind::InvalidArgument, "plane normal must be non-zero"};
    }
    if (p.kind == PrimitiveKind::Box && !(p.half_extents.minCoeff() > 0.0)) {
      throw Error{ErrorKind::InvalidArgument, "box extents must be positive"};
    }
    if (!(p.texture.scale > 0.0)) {
      throw Error{ErrorKind::InvalidArgument, "texture scale must be positive"};
    }
  }
}

auto intersect(const Primitive &primitive, const Vec3 &origin, const Vec3 &dir)
    -> std::optional<double> {
  constexpr auto eps = 1e-9;
  switch (primitive.kind) {
  case PrimitiveKind::Plane: {
    const Vec3 n = primitive.normal.normalized();
    const auto denom = n.dot(dir);
    if (std::abs(denom) < 1e-12) {
      return std::nullopt;
    }
    const auto t = n.dot(primitive.center - origin) / denom;
    return t > eps ? std::optional{t} : std::nullopt;
  }
  case PrimitiveKind::Sphere: {
    const Vec3 oc = origin - primitive.center;
    const auto a = dir.squaredNorm();
    const auto b = oc.dot(dir);
    const auto c = oc.squaredNorm() - primitive.radius * primitive.radius;
    const auto disc = b * b - a * c;
    if (disc < 0.0) {
      return std::nullopt;
    }
    const auto sq = std::sqrt(disc);
    if (const auto t0 = (-b - sq) / a; t0 > eps) {
      return t0;
    }
    if (const auto t1 = (-b + sq) / a; t1 > eps) {
      return t1;
    }
    return std::nullopt;
  }
  case PrimitiveKind::Box: {
    const Mat3 to_local = Eigen::AngleAxisd{-primitive.yaw, Vec3::UnitY()}.toRotationMatrix();
    const Vec3 o = to_local * (origin - primitive.center);
    const Vec3 d = to_local * dir;
    auto t_enter = -std::numeric_limits<double>::infinity();
    auto t_exit = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      const auto h = primitive.half_extents[k];
      if (std::abs(d[k]) < 1e-15) {
        if (o[k] < -h || o[k] > h) {
          return std::nullopt;
        }
        continue;
      }
      auto t0 = (-h - o[k]) / d[k];
      auto t1 = (h - o[k]) / d[k];
      if (t0 > t1) {
        std::swap(t0, t1);
      }
      t_enter = std::max(t_enter, t0);
      t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit) {
      return std::nullopt;
    }
    if (t_enter > eps) {
      return t_enter;
    }
    return t_exit > eps ? std::optional{t_exit} : std::nullopt;
  }
  }
  return std::nullopt;
}

constexpr int kFootprint = 4;

auto render(const SceneSpec &scene, const CameraParams &cam) -> ViewFrame {
  validate(scene);
  validate(cam);
  auto frame = make_frame(cam.width, cam.height, scene.z_near, scene.z_far);
  validate(frame);

  const auto w = cam.width;
  const auto h = cam.height;
  auto full_u = Plane<double>{w, h};
  auto full_v = Plane<double>{w, h};

  const Vec3 origin = cam.center();
  const Mat3 cam_to_world = cam.extr.R.transpose();
  const auto &k = cam.intr;

  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      // Camera-space direction with unit z, so the hit distance is the depth.
      const auto Y = (row - k.oy) / k.fy;
      const auto X = (col - k.ox - k.skew * Y) / k.fx;
      const Vec3 dir = cam_to_world * Vec3{X, Y, 1.0};

      auto best = std::numeric_limits<double>::infinity();
      const Primitive *hit = nullptr;
      for (const auto &p : scene.primitives) {
        if (const auto t = intersect(p, origin, dir); t && *t < best) {
          best = *t;
          hit = &p;
        }
      }

      if (hit == nullptr) {
        frame.luma(row, col) = clamp8(scene.background_luma);
        frame.depth(row, col) = z_to_depth_sample(scene.background_depth, scene.z_near, scene.z_far);
        full_u(row, col) = 128.0;
        full_v(row, col) = 128.0;
        continue;
      }
      // Texture is box-filtered over the pixel footprint on the hit primitive
      // only; depth stays the centre sample so silhouettes are not mixed.
      auto s = YuvSample{};
      auto taken = 0;
      for (int sy = 0; sy < kFootprint; ++sy) {
        for (int sx = 0; sx < kFootprint; ++sx) {
          const auto dy = (sy + 0.5) / kFootprint - 0.5;
          const auto dx = (sx + 0.5) / kFootprint - 0.5;
          const auto Ys = (row + dy - k.oy) / k.fy;
          const auto Xs = (col + dx - k.ox - k.skew * Ys) / k.fx;
          const Vec3 sub = cam_to_world * Vec3{Xs, Ys, 1.0};
          if (const auto t = intersect(*hit, origin, sub)) {
            const auto v = sample_texture(hit->texture, origin + *t * sub);
            s.y += v.y;
            s.u += v.u;
            s.v += v.v;
            ++taken;
          }
        }
      }
      if (taken == 0) {
        s = sample_texture(hit->texture, origin + best * dir);
      } else {
        s.y /= taken;
        s.u /= taken;
        s.v /= taken;
      }
      frame.luma(row, col) = clamp8(s.y);
      frame.depth(row, col) = z_to_depth_sample(best, scene.z_near, scene.z_far);
      full_u(row, col) = s.u;
      full_v(row, col) = s.v;
    }
  }

  for (int y = 0; y < h / 2; ++y) {
    for (int x = 0; x < w / 2; ++x) {
      const auto u = 0.25 * (full_u(2 * y, 2 * x) + full_u(2 * y, 2 * x + 1) +
                             full_u(2 * y + 1, 2 * x) + full_u(2 * y + 1, 2 * x + 1));
      const auto v = 0.25 * (full_v(2 * y, 2 * x) + full_v(2 * y, 2 * x + 1) +
                             full_v(2 * y + 1, 2 * x) + full_v(2 * y + 1, 2 * x + 1));
      frame.chroma_u(y, x) = clamp8(u);
      frame.chroma_v(y, x) = clamp8(v);
    }
  }
  return frame;
}

auto default_scene() -> SceneSpec {
  auto scene = SceneSpec{};
  scene.z_near = 1.0;
  scene.z_far = 40.0;
  scene.background_depth = 40.0;
  scene.background_luma = 16.0;

  // Wall and floor are finite so every surface stays inside [z_near, z_far]
  // from any camera on a radius-5 ring.
  auto wall = Primitive{};
  wall.kind = PrimitiveKind::Box;
  wall.center = {0.0, -1.0, -6.25};
  wall.half_extents = {8.0, 2.75, 0.25};
  wall.texture = {TextureKind::Noise, 120.0, 50.0, 110.0, 140.0, 12.0, 1.6, {1.0, 0.0, 0.0}, 11};

  auto floor = Primitive{};
  floor.kind = PrimitiveKind::Box;
  floor.center = {0.0, 1.75, 0.0};
  floor.half_extents = {9.0, 0.25, 9.0};
  floor.texture = {TextureKind::Gradient, 90.0, 40.0, 128.0, 118.0, 10.0, 8.0, {0.3, 0.0, 1.0}, 3};

  auto left = Primitive{};
  left.kind = PrimitiveKind::Sphere;
  left.center = {-1.2, 0.2, 0.0};
  left.radius = 0.8;
  left.texture = {TextureKind::Gradient, 160.0, 45.0, 100.0, 150.0, 14.0, 1.0, {1.0, 1.0, 0.0}, 5};

  auto right = Primitive{};
  right.kind = PrimitiveKind::Sphere;
  right.center = {1.3, -0.2, 1.0};
  right.radius = 0.6;
  right.texture = {TextureKind::Noise, 140.0, 50.0, 150.0, 100.0, 14.0, 0.7, {1.0, 0.0, 0.0}, 7};

  auto box = Primitive{};
  box.kind = PrimitiveKind::Box;
  box.center = {0.3, 0.5, -1.8};
  box.half_extents = {0.7, 1.0, 0.5};
  box.yaw = 0.4;
  box.texture = {TextureKind::Noise, 100.0, 45.0, 130.0, 128.0, 12.0, 0.9, {1.0, 0.0, 0.0}, 9};

  scene.primitives = {wall, floor, left, right, box};
  return scene;
}

} // namespace circrect
