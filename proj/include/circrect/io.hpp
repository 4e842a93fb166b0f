#pragma once

#include <circrect/dibr_warp.hpp>
#include <circrect/eval_harness.hpp>
#include <circrect/rectify.hpp>
#include <circrect/scene_synth.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace circrect::io {

inline constexpr int kFormatVersion = 1;

// How T is stored in a camera file. The library always works with the
// world-offset form (X_cam = R X_world + T); camera-center files store the
// camera centre C and are converted with T = -R C on load.
enum class TranslationConvention { WorldOffset, CameraCenter };

auto to_string(TranslationConvention c) -> std::string_view;

struct DepthRange {
  double z_near{1.0};
  double z_far{100.0};

  friend auto operator==(const DepthRange &, const DepthRange &) -> bool = default;
};

struct CameraSet {
  std::vector<CameraParams> cameras;
  std::vector<DepthRange> depth_ranges; // one per camera
};

// Camera file (JSON):
//   { "format_version": 1, "convention": "world-offset" | "camera-center",
//     "cameras": [ { "id", "width", "height", "K": [9], "R": [9], "T": [3],
//                    "z_near", "z_far" } ] }
// K and R are row-major. Unknown fields are rejected and every camera is
// validated; errors name the JSON path and camera id.
auto parse_camera_file(std::string_view text) -> CameraSet;
auto format_camera_file(const CameraSet &set,
                        TranslationConvention convention = TranslationConvention::WorldOffset)
    -> std::string;

// Circular camera file (JSON): the reduced parameter set plus what is needed
// to rebuild full cameras.
//   { "format_version": 1,
//     "shared": { "f_x", "f_y_common", "o_y", "r", "x_cen", "z_cen",
//                 "camera_height", "width", "height", "z_near", "z_far",
//                 "ox_policy" },
//     "cameras": [ { "id", "o_x", "alpha" } ] }
auto parse_circular_file(std::string_view text) -> std::pair<RectifiedRig, DepthRange>;
auto format_circular_file(const RectifiedRig &rig, const DepthRange &range) -> std::string;

auto parse_rig_spec(std::string_view text) -> RigSpec;
auto format_rig_spec(const RigSpec &spec) -> std::string;
auto parse_scene_spec(std::string_view text) -> SceneSpec;
auto format_scene_spec(const SceneSpec &spec) -> std::string;

// Paths inside the config are resolved against `base_dir`.
auto parse_experiment_config(std::string_view text, const std::filesystem::path &base_dir)
    -> ExperimentConfig;
auto format_experiment_config(const ExperimentConfig &config) -> std::string;

auto read_text(const std::filesystem::path &path) -> std::string;
void write_text(const std::filesystem::path &path, std::string_view text);

// Raw video. Texture: planar 4:2:0, 8 bit, Y then U then V per frame, frames
// back to back. Depth: one 16-bit little-endian plane per frame. The frame
// count is the file size divided by the frame size; a remainder is an error.
struct TextureFrame {
  Plane8 y;
  Plane8 u;
  Plane8 v;

  friend auto operator==(const TextureFrame &, const TextureFrame &) -> bool = default;
};

auto texture_frame_bytes(int width, int height) -> std::size_t;
auto depth_frame_bytes(int width, int height) -> std::size_t;

auto read_texture_file(const std::filesystem::path &path, int width, int height)
    -> std::vector<TextureFrame>;
void write_texture_file(const std::filesystem::path &path, const std::vector<TextureFrame> &frames);
auto read_depth_file(const std::filesystem::path &path, int width, int height)
    -> std::vector<Plane16>;
void write_depth_file(const std::filesystem::path &path, const std::vector<Plane16> &frames);

auto load_view_frame(const std::filesystem::path &texture, const std::filesystem::path &depth,
                     int width, int height, int frame_index, const DepthRange &range) -> ViewFrame;
void save_view_frame(const ViewFrame &frame, const std::filesystem::path &texture,
                     const std::filesystem::path &depth);

// Prediction report, CSV: a '#' note line, then the header
//   sequence,pair,predictor,sse,psnr_db,hole_fraction,ns_per_point
// Reals use 17 significant digits; an infinite PSNR is written as "inf".
void write_report_csv(std::ostream &out, const ExperimentReport &report);
auto parse_report_csv(std::string_view text) -> std::vector<PredictionRecord>;
// JSON mirror of the CSV plus the note, the echoed config and pixel counts.
auto format_report_json(const ExperimentReport &report) -> std::string;
auto parse_report_json(std::string_view text) -> ExperimentReport;

// Rate-distortion curve CSV with header "bitrate,psnr".
auto parse_rd_curve(std::string_view text) -> RdCurve;

void write_benchmark_csv(std::ostream &out, const BenchmarkRecord &record);

// 17 significant digits; "inf"/"-inf"/"nan" for non-finite values.
auto format_real(double v) -> std::string;
auto parse_real(std::string_view text) -> double;

} // namespace circrect::io
