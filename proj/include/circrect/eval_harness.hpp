#pragma once

#include <circrect/circular_projection.hpp>
#include <circrect/dibr_warp.hpp>
#include <circrect/rectify.hpp>
#include <circrect/scene_synth.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace circrect {

enum class Predictor { Disparity, Circular, FullProjection };

auto to_string(Predictor p) -> std::string_view;
auto parse_predictor(std::string_view text) -> Predictor;

// Written at the top of every report: prediction PSNR stands in for coded
// bitrate, which needs a real 3D-HEVC encoder.
inline constexpr std::string_view kReportNote =
    "prediction-residual PSNR of the luma plane is a proxy for coded bitrate; "
    "no video encoder is run";

struct PredictionRecord {
  std::string sequence;
  std::string pair;
  Predictor predictor{Predictor::FullProjection};
  double sse{};
  std::int64_t pixel_count{};
  double psnr_db{};
  double hole_fraction{};
  double ns_per_point{};
};

// 10 log10(255^2 N / SSE); +infinity when SSE is zero.
auto psnr_from_sse(double sse, std::int64_t pixel_count) -> double;

// Geometry available for one source/destination pair. Each predictor needs
// its own parameter set.
struct PairCameras {
  CameraParams src;
  CameraParams dst;
  std::optional<CircularCameraParams> circular_src;
  std::optional<CircularCameraParams> circular_dst;
  std::optional<LinearPair> linear;
};

// Source-pixel destinations under one predictor, without splatting.
struct ProjectedPlane {
  std::vector<ImagePoint> points;
  std::vector<std::uint8_t> valid;
  double ns_per_point{};
};

auto project_frame(const ViewFrame &src, const PairCameras &cams, Predictor predictor)
    -> ProjectedPlane;

// Warps `src` with the predictor's geometry and compares luma against
// `dst_truth` over the pixels the warp reached. Throws PredictorMismatch when
// the predictor's parameters are missing or inconsistent.
auto predict_view(const ViewFrame &src, const ViewFrame &dst_truth, const PairCameras &cams,
                  Predictor predictor) -> PredictionRecord;

struct RdPoint {
  double bitrate{}; // kbps
  double psnr{};    // dB
};

struct RdCurve {
  std::vector<RdPoint> points;
};

void validate(const RdCurve &curve);

// Bjontegaard delta rate in percent (negative = test saves bitrate). Cubic
// fit of log10(rate) against PSNR, integrated exactly over the shared PSNR
// interval. Throws NoOverlap or IllConditioned.
auto bd_rate(const RdCurve &anchor, const RdCurve &test) -> double;

struct BenchmarkRecord {
  std::size_t n_points{};
  int repetitions{};
  double circular_ns{};             // median per point, circular formulas
  double full_ns{};                 // median per point, project_point per call
  double full_precomputed_ns{};     // median per point, cached 4x4 relative matrix
  double ratio{};                   // full_ns / circular_ns
  double precomputed_ratio{};       // full_precomputed_ns / circular_ns
  double reduction_percent{};       // (circular_ns / full_ns - 1) * 100
  double checksum{};
};

inline constexpr double kReferenceSpeedup = 44.0;          // inter-view prediction, full encoder
inline constexpr double kReferenceReductionPercent = -97.74;

// Median wall-clock per point over `repetitions` timed passes (one untimed
// warm-up pass first). Points are seeded random pixels with depths in
// [0.5 r, 1.5 r] that stay in front of both views.
auto benchmark_projection(const CircularCameraParams &a, const CircularCameraParams &b,
                          const Circle &circle, double common_fy, double camera_height,
                          std::size_t n_points, int repetitions, std::uint64_t seed = 1)
    -> BenchmarkRecord;

struct ViewFiles {
  int id{};
  std::filesystem::path texture;
  std::filesystem::path depth;
};

// Pre-computed inputs on disk: original cameras plus one texture/depth pair
// per view; optionally the rectified rig produced by `rectify`.
struct FileSource {
  std::filesystem::path cameras;
  std::optional<std::filesystem::path> rectified;
  std::optional<std::filesystem::path> circular;
  std::vector<ViewFiles> views;
  int frame{0};
};

struct ExperimentConfig {
  std::string sequence{"synthetic"};
  std::optional<RigSpec> rig;
  std::optional<SceneSpec> scene;
  std::optional<FileSource> files;
  std::vector<std::pair<int, int>> pairs; // view indices; empty = adjacent views
  std::vector<Predictor> predictors{Predictor::Disparity, Predictor::Circular,
                                    Predictor::FullProjection};
  OxPolicy ox_policy{OxPolicy::Convergence};
  bool fill_holes{true};
};

struct ExperimentReport {
  std::string note{kReportNote};
  std::string config_json;
  std::vector<PredictionRecord> records;
};

// Rectify, warp every view onto its rectified camera, fill holes, then run
// each predictor on each pair. Failures are rethrown as StageFailure naming
// the stage.
auto run_experiment(const ExperimentConfig &config) -> ExperimentReport;

} // namespace circrect
