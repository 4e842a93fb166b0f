#include <circrect/dibr_warp.hpp>
#include <circrect/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace circrect {
namespace {
constexpr auto kMaxSample = 65535.0;

// How one hole pixel of a row is filled: either a weighted mix of two columns
// or (right < 0) a copy of `left`.
struct FillSource {
  int left{-1};
  int right{-1};
  double w_left{1.0};
  double w_right{0.0};
};

// Per-pixel fill plan for a plane with the given validity mask and depths.
// Rows without any valid pixel get no plan and are copied afterwards.
struct FillPlan {
  int width{};
  int height{};
  std::vector<FillSource> sources; // only meaningful for invalid pixels
  std::vector<std::uint8_t> row_has_valid;
};

auto make_fill_plan(const Plane8 &mask, const std::vector<double> &z, double z_threshold)
    -> FillPlan {
  auto plan = FillPlan{mask.width(), mask.height(), {}, {}};
  plan.sources.resize(mask.size());
  plan.row_has_valid.assign(static_cast<size_t>(mask.height()), 0);

  const auto w = mask.width();
  auto left_valid = std::vector<int>(static_cast<size_t>(w));
  auto right_valid = std::vector<int>(static_cast<size_t>(w));

  for (int row = 0; row < mask.height(); ++row) {
    auto last = -1;
    for (int col = 0; col < w; ++col) {
      if (mask(row, col) != 0) {
        last = col;
      }
      left_valid[static_cast<size_t>(col)] = last;
    }
    if (last < 0) {
      continue;
    }
    plan.row_has_valid[static_cast<size_t>(row)] = 1;
    auto next = -1;
    for (int col = w - 1; col >= 0; --col) {
      if (mask(row, col) != 0) {
        next = col;
      }
      right_valid[static_cast<size_t>(col)] = next;
    }

    const auto base = static_cast<size_t>(row) * static_cast<size_t>(w);
    for (int col = 0; col < w; ++col) {
      if (mask(row, col) != 0) {
        continue;
      }
      auto &src = plan.sources[base + static_cast<size_t>(col)];
      const auto l = left_valid[static_cast<size_t>(col)];
      const auto r = right_valid[static_cast<size_t>(col)];
      if (l < 0 || r < 0) {
        src = {l < 0 ? r : l, -1, 1.0, 0.0};
        continue;
      }
      const auto zl = z[base + static_cast<size_t>(l)];
      const auto zr = z[base + static_cast<size_t>(r)];
      if (std::abs(zl - zr) > z_threshold) {
        src = {zl > zr ? l : r, -1, 1.0, 0.0};
        continue;
      }
      const auto dl = static_cast<double>(col - l);
      const auto dr = static_cast<double>(r - col);
      src = {l, r, dr / (dl + dr), dl / (dl + dr)};
    }
  }
  return plan;
}

template <typename T> void apply_fill_plan(const FillPlan &plan, const Plane8 &mask, Plane<T> &p) {
  const auto w = plan.width;
  for (int row = 0; row < plan.height; ++row) {
    if (plan.row_has_valid[static_cast<size_t>(row)] == 0) {
      continue;
    }
    const auto base = static_cast<size_t>(row) * static_cast<size_t>(w);
    for (int col = 0; col < w; ++col) {
      if (mask(row, col) != 0) {
        continue;
      }
      const auto &src = plan.sources[base + static_cast<size_t>(col)];
      if (src.right < 0) {
        p(row, col) = p(row, src.left);
      } else {
        const auto v = src.w_left * static_cast<double>(p(row, src.left)) +
                       src.w_right * static_cast<double>(p(row, src.right));
        p(row, col) = static_cast<T>(std::lround(v));
      }
    }
  }

  // Rows that had nothing to interpolate from take the nearest filled row.
  auto filled_rows = std::vector<int>{};
  for (int row = 0; row < plan.height; ++row) {
    if (plan.row_has_valid[static_cast<size_t>(row)] != 0) {
      filled_rows.push_back(row);
    }
  }
  for (int row = 0; row < plan.height; ++row) {
    if (plan.row_has_valid[static_cast<size_t>(row)] != 0) {
      continue;
    }
    auto best = filled_rows.front();
    for (const auto candidate : filled_rows) {
      if (std::abs(candidate - row) < std::abs(best - row)) {
        best = candidate;
      }
    }
    for (int col = 0; col < w; ++col) {
      p(row, col) = p(best, col);
    }
  }
}
} // namespace

auto make_frame(int width, int height, double z_near, double z_far) -> ViewFrame {
  auto f = ViewFrame{};
  f.luma = Plane8{width, height};
  f.chroma_u = Plane8{width / 2, height / 2, 128};
  f.chroma_v = Plane8{width / 2, height / 2, 128};
  f.depth = Plane16{width, height};
  f.z_near = z_near;
  f.z_far = z_far;
  return f;
}

void validate(const ViewFrame &frame) {
  const auto w = frame.luma.width();
  const auto h = frame.luma.height();
  if (w <= 0 || h <= 0 || w % 2 != 0 || h % 2 != 0) {
    std::ostringstream msg;
    msg << "frame dimensions " << w << "x" << h << " must be positive and even";
    throw Error{ErrorKind::InvalidArgument, msg.str()};
  }
  if (frame.chroma_u.width() != w / 2 || frame.chroma_u.height() != h / 2 ||
      frame.chroma_v.width() != w / 2 || frame.chroma_v.height() != h / 2) {
    throw Error{ErrorKind::InvalidArgument, "chroma planes must be half the luma size"};
  }
  if (frame.depth.width() != w || frame.depth.height() != h) {
    throw Error{ErrorKind::InvalidArgument, "depth plane must match the luma size"};
  }
  if (!(frame.z_near > 0.0) || !(frame.z_near < frame.z_far) || !std::isfinite(frame.z_far)) {
    throw Error{ErrorKind::InvalidArgument, "depth range must satisfy 0 < z_near < z_far"};
  }
}

auto depth_sample_to_z(std::uint16_t v, double z_near, double z_far) -> double {
  if (v == 65535) {
    return z_near;
  }
  if (v == 0) {
    return z_far;
  }
  const auto inv = (static_cast<double>(v) / kMaxSample) * (1.0 / z_near - 1.0 / z_far) +
                   1.0 / z_far;
  return 1.0 / inv;
}

auto z_to_depth_sample(double z, double z_near, double z_far) -> std::uint16_t {
  if (!(z > 0.0)) {
    return 0;
  }
  const auto v = kMaxSample * (1.0 / z - 1.0 / z_far) / (1.0 / z_near - 1.0 / z_far);
  return static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, kMaxSample));
}

auto splat(const ViewFrame &src, std::span<const ImagePoint> projected,
           std::span<const std::uint8_t> valid, int dst_width, int dst_height) -> WarpedFrame {
  validate(src);
  const auto w = src.width();
  const auto h = src.height();
  if (projected.size() != src.luma.size() || valid.size() != src.luma.size()) {
    throw Error{ErrorKind::InvalidArgument, "projection plane does not match the source frame"};
  }

  auto out = WarpedFrame{};
  out.frame = make_frame(dst_width, dst_height, src.z_near, src.z_far);
  validate(out.frame);

  auto zbuf = Plane<double>{dst_width, dst_height, std::numeric_limits<double>::infinity()};
  auto u_full = Plane8{dst_width, dst_height};
  auto v_full = Plane8{dst_width, dst_height};

  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const auto i = static_cast<size_t>(row) * static_cast<size_t>(w) + static_cast<size_t>(col);
      if (valid[i] == 0) {
        ++out.degenerate_count;
        continue;
      }
      const auto &p = projected[i];
      const auto dc = round_coordinate(p.x);
      const auto dr = round_coordinate(p.y);
      if (!(dc >= 0.0 && dc < dst_width && dr >= 0.0 && dr < dst_height)) {
        continue;
      }
      const auto x = static_cast<int>(dc);
      const auto y = static_cast<int>(dr);
      if (p.z < zbuf(y, x)) {
        zbuf(y, x) = p.z;
        out.frame.luma(y, x) = src.luma(row, col);
        u_full(y, x) = src.chroma_u(row / 2, col / 2);
        v_full(y, x) = src.chroma_v(row / 2, col / 2);
        out.frame.depth(y, x) = z_to_depth_sample(p.z, src.z_near, src.z_far);
      }
    }
  }

  out.mask = Plane8{dst_width, dst_height};
  auto holes = size_t{0};
  for (int y = 0; y < dst_height; ++y) {
    for (int x = 0; x < dst_width; ++x) {
      const auto hit = std::isfinite(zbuf(y, x));
      out.mask(y, x) = hit ? 1 : 0;
      holes += hit ? 0 : 1;
    }
  }
  out.hole_fraction = static_cast<double>(holes) / static_cast<double>(out.mask.size());

  for (int y = 0; y < dst_height / 2; ++y) {
    for (int x = 0; x < dst_width / 2; ++x) {
      auto n = 0;
      auto su = 0;
      auto sv = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          if (out.mask(2 * y + dy, 2 * x + dx) != 0) {
            ++n;
            su += u_full(2 * y + dy, 2 * x + dx);
            sv += v_full(2 * y + dy, 2 * x + dx);
          }
        }
      }
      out.frame.chroma_u(y, x) = n == 0 ? 0 : static_cast<std::uint8_t>((su + n / 2) / n);
      out.frame.chroma_v(y, x) = n == 0 ? 0 : static_cast<std::uint8_t>((sv + n / 2) / n);
    }
  }
  return out;
}

auto warp_view(const ViewFrame &src, const CameraParams &cam_src, const CameraParams &cam_dst)
    -> WarpedFrame {
  validate(src);
  if (cam_src.width != src.width() || cam_src.height != src.height()) {
    throw Error{ErrorKind::InvalidArgument, "source camera and frame sizes differ"};
  }
  const Mat4 M = relative_projection(cam_src, cam_dst);

  const auto n = src.luma.size();
  auto projected = std::vector<ImagePoint>(n);
  auto valid = std::vector<std::uint8_t>(n);
  for (int row = 0; row < src.height(); ++row) {
    for (int col = 0; col < src.width(); ++col) {
      const auto i =
          static_cast<size_t>(row) * static_cast<size_t>(src.width()) + static_cast<size_t>(col);
      const auto z = depth_sample_to_z(src.depth(row, col), src.z_near, src.z_far);
      valid[i] = apply_relative_projection(M, {static_cast<double>(col), static_cast<double>(row), z},
                                           projected[i])
                     ? 1
                     : 0;
    }
  }
  return splat(src, projected, valid, cam_dst.width, cam_dst.height);
}

auto fill_holes(const WarpedFrame &warped) -> ViewFrame {
  const auto &f = warped.frame;
  validate(f);
  const auto any_valid =
      std::any_of(warped.mask.data().begin(), warped.mask.data().end(), [](auto m) { return m != 0; });
  if (!any_valid) {
    throw Error{ErrorKind::AllInvalid, "warped frame has no valid pixel to interpolate from"};
  }

  auto out = f;
  const auto threshold = kBackgroundBiasFraction * (f.z_far - f.z_near);

  auto z = std::vector<double>(f.luma.size());
  for (size_t i = 0; i < z.size(); ++i) {
    z[i] = depth_sample_to_z(f.depth.data()[i], f.z_near, f.z_far);
  }
  const auto plan = make_fill_plan(warped.mask, z, threshold);
  apply_fill_plan(plan, warped.mask, out.luma);
  apply_fill_plan(plan, warped.mask, out.depth);

  // Chroma: a sample is valid when any of its four luma samples is; its depth
  // is the mean depth of those.
  const auto cw = f.chroma_u.width();
  const auto ch = f.chroma_u.height();
  auto cmask = Plane8{cw, ch};
  auto cz = std::vector<double>(static_cast<size_t>(cw) * static_cast<size_t>(ch));
  for (int y = 0; y < ch; ++y) {
    for (int x = 0; x < cw; ++x) {
      auto n = 0;
      auto sum = 0.0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          if (warped.mask(2 * y + dy, 2 * x + dx) != 0) {
            ++n;
            sum += z[static_cast<size_t>(2 * y + dy) * static_cast<size_t>(f.width()) +
                     static_cast<size_t>(2 * x + dx)];
          }
        }
      }
      cmask(y, x) = n > 0 ? 1 : 0;
      cz[static_cast<size_t>(y) * static_cast<size_t>(cw) + static_cast<size_t>(x)] =
          n > 0 ? sum / n : 0.0;
    }
  }
  const auto cplan = make_fill_plan(cmask, cz, threshold);
  apply_fill_plan(cplan, cmask, out.chroma_u);
  apply_fill_plan(cplan, cmask, out.chroma_v);
  return out;
}

} // namespace circrect
