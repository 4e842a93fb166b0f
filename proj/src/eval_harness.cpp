#include <circrect/error.hpp>
#include <circrect/eval_harness.hpp>
#include <circrect/io.hpp>
#include <circrect/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace circrect {
namespace {
using Clock = std::chrono::steady_clock;

auto elapsed_ns(Clock::time_point since) -> double {
  return std::chrono::duration<double, std::nano>(Clock::now() - since).count();
}

auto median(std::vector<double> v) -> double {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

auto mismatch(std::string_view what) -> Error {
  return Error{ErrorKind::PredictorMismatch, std::string{what}};
}

auto make_circular_pair(const PairCameras &cams) -> CircularPair {
  if (!cams.circular_src || !cams.circular_dst) {
    throw mismatch("circular predictor needs circular camera parameters for both views");
  }
  try {
    return CircularPair{*cams.circular_src, *cams.circular_dst};
  } catch (const Error &e) {
    throw mismatch(e.what());
  }
}

// Polynomial c0 + c1 t + c2 t^2 + c3 t^3 fitted to log10(rate) against the
// PSNR offset t = psnr - shift.
struct Cubic {
  Eigen::Vector4d c;
  double shift{};

  [[nodiscard]] auto integral(double lo, double hi) const -> double {
    const auto prim = [&](double p) {
      const auto t = p - shift;
      return t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * c[3] / 4.0)));
    };
    return prim(hi) - prim(lo);
  }
};

auto fit_log_rate(const RdCurve &curve, double shift) -> Cubic {
  const auto n = static_cast<Eigen::Index>(curve.points.size());
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &pt = curve.points[static_cast<size_t>(i)];
    const auto t = pt.psnr - shift;
    A(i, 0) = 1.0;
    A(i, 1) = t;
    A(i, 2) = t * t;
    A(i, 3) = t * t * t;
    b(i) = std::log10(pt.bitrate);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr{A};
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    throw Error{ErrorKind::IllConditioned, "rate-distortion fit matrix is rank deficient"};
  }
  return {qr.solve(b), shift};
}

auto stage_error(std::string_view stage, const std::exception &e) -> Error {
  return Error{ErrorKind::StageFailure, "stage " + std::string{stage} + ": " + e.what()};
}
} // namespace

auto to_string(Predictor p) -> std::string_view {
  switch (p) {
  case Predictor::Disparity:
    return "disparity";
  case Predictor::Circular:
    return "circular";
  case Predictor::FullProjection:
    return "full-projection";
  }
  return "full-projection";
}

auto parse_predictor(std::string_view text) -> Predictor {
  for (const auto p : {Predictor::Disparity, Predictor::Circular, Predictor::FullProjection}) {
    if (to_string(p) == text) {
      return p;
    }
  }
  throw Error{ErrorKind::InvalidArgument, "unknown predictor '" + std::string{text} + "'"};
}

auto psnr_from_sse(double sse, std::int64_t pixel_count) -> double {
  if (pixel_count <= 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (sse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(255.0 * 255.0 * static_cast<double>(pixel_count) / sse);
}

auto project_frame(const ViewFrame &src, const PairCameras &cams, Predictor predictor)
    -> ProjectedPlane {
  validate(src);
  const auto w = src.width();
  const auto h = src.height();
  const auto n = src.luma.size();

  auto z = std::vector<double>(n);
  for (size_t i = 0; i < n; ++i) {
    z[i] = depth_sample_to_z(src.depth.data()[i], src.z_near, src.z_far);
  }

  auto out = ProjectedPlane{};
  out.points.resize(n);
  out.valid.resize(n);

  switch (predictor) {
  case Predictor::Circular: {
    const auto pair = make_circular_pair(cams);
    const auto start = Clock::now();
    project_circular_grid(pair, z, w, h, out.points, out.valid);
    out.ns_per_point = elapsed_ns(start) / static_cast<double>(n);
    break;
  }
  case Predictor::FullProjection: {
    const auto start = Clock::now();
    const Mat4 M = relative_projection(cams.src, cams.dst);
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        const auto i = static_cast<size_t>(row) * static_cast<size_t>(w) + static_cast<size_t>(col);
        out.valid[i] = apply_relative_projection(
                           M, {static_cast<double>(col), static_cast<double>(row), z[i]},
                           out.points[i])
                           ? 1
                           : 0;
      }
    }
    out.ns_per_point = elapsed_ns(start) / static_cast<double>(n);
    break;
  }
  case Predictor::Disparity: {
    if (!cams.linear) {
      throw mismatch("disparity predictor needs linear-setup parameters");
    }
    const auto &lin = *cams.linear;
    if (!(lin.fx > 0.0) || !std::isfinite(lin.tx)) {
      throw mismatch("linear-setup parameters are invalid");
    }
    const auto start = Clock::now();
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        const auto i = static_cast<size_t>(row) * static_cast<size_t>(w) + static_cast<size_t>(col);
        out.points[i] = disparity_predict(lin, {static_cast<double>(col), static_cast<double>(row), z[i]});
        out.valid[i] = 1;
      }
    }
    out.ns_per_point = elapsed_ns(start) / static_cast<double>(n);
    break;
  }
  }
  return out;
}

auto predict_view(const ViewFrame &src, const ViewFrame &dst_truth, const PairCameras &cams,
                  Predictor predictor) -> PredictionRecord {
  validate(dst_truth);
  if (cams.dst.width != dst_truth.width() || cams.dst.height != dst_truth.height()) {
    throw mismatch("destination camera and frame sizes differ");
  }
  const auto projected = project_frame(src, cams, predictor);
  const auto warped =
      splat(src, projected.points, projected.valid, dst_truth.width(), dst_truth.height());

  auto sse = 0.0;
  auto count = std::int64_t{0};
  for (size_t i = 0; i < warped.mask.size(); ++i) {
    if (warped.mask.data()[i] == 0) {
      continue;
    }
    const auto d = static_cast<double>(warped.frame.luma.data()[i]) -
                   static_cast<double>(dst_truth.luma.data()[i]);
    sse += d * d;
    ++count;
  }

  auto record = PredictionRecord{};
  record.predictor = predictor;
  record.sse = sse;
  record.pixel_count = count;
  record.psnr_db = psnr_from_sse(sse, count);
  record.hole_fraction = warped.hole_fraction;
  record.ns_per_point = projected.ns_per_point;
  return record;
}

void validate(const RdCurve &curve) {
  if (curve.points.size() < 4) {
    throw Error{ErrorKind::InvalidArgument, "rate-distortion curve needs at least 4 points"};
  }
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const auto &p = curve.points[i];
    if (!std::isfinite(p.bitrate) || !std::isfinite(p.psnr) || !(p.bitrate > 0.0)) {
      throw Error{ErrorKind::InvalidArgument, "rate-distortion points must be finite, rate > 0"};
    }
    if (i > 0 && !(p.bitrate > curve.points[i - 1].bitrate)) {
      throw Error{ErrorKind::InvalidArgument, "bitrates must be strictly increasing"};
    }
  }
}

auto bd_rate(const RdCurve &anchor, const RdCurve &test) -> double {
  validate(anchor);
  validate(test);
  const auto [a_lo, a_hi] = std::minmax_element(
      anchor.points.begin(), anchor.points.end(),
      [](const RdPoint &l, const RdPoint &r) { return l.psnr < r.psnr; });
  const auto [t_lo, t_hi] = std::minmax_element(
      test.points.begin(), test.points.end(),
      [](const RdPoint &l, const RdPoint &r) { return l.psnr < r.psnr; });
  const auto lo = std::max(a_lo->psnr, t_lo->psnr);
  const auto hi = std::min(a_hi->psnr, t_hi->psnr);
  if (!(hi > lo)) {
    throw Error{ErrorKind::NoOverlap, "PSNR ranges of the two curves do not overlap"};
  }

  const auto shift = 0.5 * (lo + hi);
  const auto fa = fit_log_rate(anchor, shift);
  const auto ft = fit_log_rate(test, shift);
  const auto avg_diff = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

auto benchmark_projection(const CircularCameraParams &a, const CircularCameraParams &b,
                          const Circle &circle, double common_fy, double camera_height,
                          std::size_t n_points, int repetitions, std::uint64_t seed)
    -> BenchmarkRecord {
  auto record = BenchmarkRecord{};
  record.n_points = n_points;
  record.repetitions = repetitions;
  if (n_points == 0 || repetitions <= 0) {
    return record;
  }

  const auto pair = CircularPair{a, b};
  const auto full_a = circular_to_full(a, circle, common_fy, camera_height);
  const auto full_b = circular_to_full(b, circle, common_fy, camera_height);
  const Mat4 M = relative_projection(full_a, full_b);

  auto rng = SplitMix64{seed};
  auto points = std::vector<ImagePoint>{};
  points.reserve(n_points);
  while (points.size() < n_points) {
    const auto p = ImagePoint{rng.uniform(0.0, a.width), rng.uniform(0.0, a.height),
                              rng.uniform(0.5 * a.r, 1.5 * a.r)};
    auto q = ImagePoint{};
    if (try_project_circular(pair, p, q) && q.z > 0.05 * a.r) {
      points.push_back(p);
    }
  }

  auto sink = 0.0;
  const auto time_pass = [&](auto &&project) {
    const auto start = Clock::now();
    for (const auto &p : points) {
      const auto q = project(p);
      sink += q.x + q.y + q.z;
    }
    return elapsed_ns(start);
  };
  const auto circular = [&](const ImagePoint &p) {
    auto q = ImagePoint{};
    try_project_circular(pair, p, q);
    return q;
  };
  const auto full = [&](const ImagePoint &p) { return project_point(full_a, full_b, p); };
  const auto precomputed = [&](const ImagePoint &p) {
    auto q = ImagePoint{};
    apply_relative_projection(M, p, q);
    return q;
  };

  auto t_circ = std::vector<double>{};
  auto t_full = std::vector<double>{};
  auto t_pre = std::vector<double>{};
  time_pass(circular);
  time_pass(full);
  time_pass(precomputed);
  for (int rep = 0; rep < repetitions; ++rep) {
    t_circ.push_back(time_pass(circular));
    t_full.push_back(time_pass(full));
    t_pre.push_back(time_pass(precomputed));
  }

  const auto n = static_cast<double>(n_points);
  record.circular_ns = median(t_circ) / n;
  record.full_ns = median(t_full) / n;
  record.full_precomputed_ns = median(t_pre) / n;
  record.ratio = record.full_ns / record.circular_ns;
  record.precomputed_ratio = record.full_precomputed_ns / record.circular_ns;
  record.reduction_percent = (record.circular_ns / record.full_ns - 1.0) * 100.0;
  record.checksum = sink;
  return record;
}

auto run_experiment(const ExperimentConfig &config) -> ExperimentReport {
  auto report = ExperimentReport{};
  try {
    report.config_json = io::format_experiment_config(config);
  } catch (const std::exception &e) {
    throw stage_error("config", e);
  }

  // Stage 1: original cameras and frames.
  auto cameras = std::vector<CameraParams>{};
  auto frames = std::vector<ViewFrame>{};
  auto rectified = std::optional<RectifiedRig>{};
  if (config.files) {
    try {
      const auto &src = *config.files;
      const auto set = io::parse_camera_file(io::read_text(src.cameras));
      cameras = set.cameras;
      if (src.views.size() != cameras.size()) {
        throw Error{ErrorKind::InvalidArgument, "config lists " + std::to_string(src.views.size()) +
                                                    " views but the camera file has " +
                                                    std::to_string(cameras.size())};
      }
      for (size_t i = 0; i < cameras.size(); ++i) {
        const auto &view = src.views[i];
        if (view.id != cameras[i].id) {
          throw Error{ErrorKind::InvalidArgument,
                      "view " + std::to_string(view.id) + " does not match camera " +
                          std::to_string(cameras[i].id)};
        }
        for (const auto &path : {view.texture, view.depth}) {
          if (!std::filesystem::exists(path)) {
            throw Error{ErrorKind::InvalidArgument, "missing file " + path.string()};
          }
        }
        frames.push_back(io::load_view_frame(view.texture, view.depth, cameras[i].width,
                                             cameras[i].height, src.frame, set.depth_ranges[i]));
      }
    } catch (const std::exception &e) {
      throw stage_error("load", e);
    }
    try {
      if (config.files->circular) {
        rectified = io::parse_circular_file(io::read_text(*config.files->circular)).first;
      }
      if (config.files->rectified && rectified) {
        const auto full = io::parse_camera_file(io::read_text(*config.files->rectified));
        if (full.cameras.size() != rectified->full_params.size()) {
          throw Error{ErrorKind::InvalidArgument, "rectified and circular files disagree"};
        }
        rectified->full_params = full.cameras;
      }
    } catch (const std::exception &e) {
      throw stage_error("load-rectified", e);
    }
  } else {
    if (!config.rig) {
      throw Error{ErrorKind::StageFailure, "stage config: neither files nor a rig spec given"};
    }
    try {
      const auto scene = config.scene ? *config.scene : default_scene();
      cameras = synth_rig(*config.rig);
      for (const auto &cam : cameras) {
        frames.push_back(render(scene, cam));
      }
    } catch (const std::exception &e) {
      throw stage_error("synth", e);
    }
  }

  // Stage 2: rectification.
  if (!rectified) {
    try {
      rectified = rectify_rig(cameras, config.ox_policy);
    } catch (const std::exception &e) {
      throw stage_error("rectify", e);
    }
  }

  // Stage 3: move every view onto its rectified camera.
  auto rect_frames = std::vector<ViewFrame>{};
  try {
    for (size_t i = 0; i < cameras.size(); ++i) {
      const auto warped = warp_view(frames[i], cameras[i], rectified->full_params[i]);
      rect_frames.push_back(config.fill_holes ? fill_holes(warped) : warped.frame);
    }
  } catch (const std::exception &e) {
    throw stage_error("warp", e);
  }

  // Stage 4: inter-view prediction arms.
  auto pairs = config.pairs;
  if (pairs.empty()) {
    for (size_t i = 0; i + 1 < cameras.size(); ++i) {
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
    }
  }
  try {
    for (const auto &[a, b] : pairs) {
      const auto n = static_cast<int>(cameras.size());
      if (a < 0 || b < 0 || a >= n || b >= n) {
        throw Error{ErrorKind::InvalidArgument, "pair index out of range"};
      }
      const auto ia = static_cast<size_t>(a);
      const auto ib = static_cast<size_t>(b);
      auto cams = PairCameras{};
      cams.src = rectified->full_params[ia];
      cams.dst = rectified->full_params[ib];
      cams.circular_src = rectified->cameras[ia];
      cams.circular_dst = rectified->cameras[ib];
      cams.linear = linear_pair_from_cameras(cams.src, cams.dst);

      for (const auto predictor : config.predictors) {
        auto record = predict_view(rect_frames[ia], rect_frames[ib], cams, predictor);
        record.sequence = config.sequence;
        record.pair = std::to_string(cameras[ia].id) + "-" + std::to_string(cameras[ib].id);
        report.records.push_back(std::move(record));
      }
    }
  } catch (const std::exception &e) {
    throw stage_error("predict", e);
  }
  return report;
}

} // namespace circrect
