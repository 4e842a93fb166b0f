#include <circrect/circle_fit.hpp>
#include <circrect/error.hpp>
#include <circrect/eval_harness.hpp>
#include <circrect/io.hpp>
#include <circrect/rectify.hpp>
#include <circrect/scene_synth.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace circrect;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `f`, prefixing any failure with the stage name.
template <typename F> auto stage(const std::string &name, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError &) {
    throw;
  } catch (const std::exception &e) {
    throw StageError{"stage " + name + ": " + e.what()};
  }
}

void write_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  io::write_text(path, text);
}

auto shared_range(const io::CameraSet &set) -> io::DepthRange {
  auto range = set.depth_ranges.front();
  for (const auto &r : set.depth_ranges) {
    range.z_near = std::min(range.z_near, r.z_near);
    range.z_far = std::max(range.z_far, r.z_far);
  }
  return range;
}

auto find_view(const io::CameraSet &set, int id) -> size_t {
  for (size_t i = 0; i < set.cameras.size(); ++i) {
    if (set.cameras[i].id == id) {
      return i;
    }
  }
  throw Error{ErrorKind::InvalidArgument, "no camera with id " + std::to_string(id)};
}

auto percent(double v) -> std::string {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  std::string s = buf;
  if (s == "-0.00%") {
    s = "0.00%";
  }
  return s;
}

// --- fit-circle ---------------------------------------------------------

struct FitArgs {
  std::string cameras;
  std::string report;
};

void run_fit(const FitArgs &a) {
  const auto set = stage("load", [&] { return io::parse_camera_file(io::read_text(a.cameras)); });
  const auto fit = stage("fit", [&] {
    auto pts = std::vector<GroundPoint>{};
    for (const auto &c : set.cameras) {
      pts.push_back({c.center().x(), c.center().z()});
    }
    return fit_circle(pts);
  });
  std::cout << "x_cen " << io::format_real(fit.circle.x_cen) << "\n"
            << "z_cen " << io::format_real(fit.circle.z_cen) << "\n"
            << "r " << io::format_real(fit.circle.r) << "\n"
            << "residual " << io::format_real(fit.residual) << "\n"
            << "iterations " << fit.iterations << "\n";
  if (!a.report.empty()) {
    stage("write", [&] {
      std::ostringstream out;
      out << "camera_id,signed_distance\n";
      for (size_t i = 0; i < set.cameras.size(); ++i) {
        out << set.cameras[i].id << ',' << io::format_real(fit.per_camera_distance[i]) << "\n";
      }
      out << "# x_cen=" << io::format_real(fit.circle.x_cen)
          << " z_cen=" << io::format_real(fit.circle.z_cen) << " r=" << io::format_real(fit.circle.r)
          << " residual=" << io::format_real(fit.residual) << "\n";
      write_file(a.report, out.str());
    });
  }
}

// --- rectify ------------------------------------------------------------

struct RectifyArgs {
  std::string cameras;
  std::string out_circular;
  std::string out_full;
  std::string ox_policy{"convergence"};
};

void run_rectify(const RectifyArgs &a) {
  const auto set = stage("load", [&] { return io::parse_camera_file(io::read_text(a.cameras)); });
  const auto rig = stage("rectify", [&] {
    return rectify_rig(set.cameras, parse_ox_policy(a.ox_policy));
  });
  stage("write", [&] {
    write_file(a.out_circular, io::format_circular_file(rig, shared_range(set)));
    auto full = io::CameraSet{rig.full_params, set.depth_ranges};
    write_file(a.out_full, io::format_camera_file(full));
  });
  std::cout << "circle x_cen " << io::format_real(rig.circle.x_cen) << " z_cen "
            << io::format_real(rig.circle.z_cen) << " r " << io::format_real(rig.circle.r) << "\n"
            << "cameras " << rig.cameras.size() << "\n";
}

// --- warp ---------------------------------------------------------------

struct WarpArgs {
  std::string cameras;
  std::string rectified;
  std::string texture;
  std::string depth;
  std::string out;
  std::string out_depth;
  int view{0};
  int frame{0};
  bool fill{false};
};

void run_warp(const WarpArgs &a) {
  const auto orig = stage("load", [&] { return io::parse_camera_file(io::read_text(a.cameras)); });
  const auto rect = stage("load-rectified", [&] { return io::parse_camera_file(io::read_text(a.rectified)); });
  const auto i = stage("load", [&] { return find_view(orig, a.view); });
  const auto j = stage("load-rectified", [&] { return find_view(rect, a.view); });
  const auto src = stage("load", [&] {
    return io::load_view_frame(a.texture, a.depth, orig.cameras[i].width, orig.cameras[i].height,
                               a.frame, orig.depth_ranges[i]);
  });
  auto warped = stage("warp", [&] { return warp_view(src, orig.cameras[i], rect.cameras[j]); });
  const auto out = a.fill ? stage("fill", [&] { return fill_holes(warped); }) : warped.frame;
  stage("write", [&] {
    if (fs::path{a.out}.has_parent_path()) {
      fs::create_directories(fs::path{a.out}.parent_path());
    }
    io::write_texture_file(a.out, {{out.luma, out.chroma_u, out.chroma_v}});
    if (!a.out_depth.empty()) {
      io::write_depth_file(a.out_depth, {out.depth});
    }
  });
  std::cout << "hole_fraction " << io::format_real(warped.hole_fraction) << "\n";
}

// --- predict ------------------------------------------------------------

struct PredictArgs {
  std::string config;
  std::string out;
  std::string json;
};

void run_predict(const PredictArgs &a, std::optional<std::uint64_t> seed) {
  auto config = stage("config", [&] {
    const fs::path path{a.config};
    return io::parse_experiment_config(io::read_text(path), path.parent_path());
  });
  if (seed && config.rig) {
    config.rig->seed = *seed;
  }
  const auto report = run_experiment(config); // stage-attributed already
  stage("write", [&] {
    std::ostringstream csv;
    io::write_report_csv(csv, report);
    write_file(a.out, csv.str());
    if (!a.json.empty()) {
      write_file(a.json, io::format_report_json(report));
    }
  });
  for (const auto &r : report.records) {
    std::cout << r.pair << ' ' << to_string(r.predictor) << " psnr " << io::format_real(r.psnr_db)
              << "\n";
  }
}

// --- bench --------------------------------------------------------------

struct BenchArgs {
  std::size_t points{1'000'000};
  int reps{7};
  std::string out;
};

void run_bench(const BenchArgs &a, std::uint64_t seed) {
  const auto rig = stage("rectify", [&] {
    auto spec = RigSpec{};
    spec.n_cameras = 36;
    return rectify_rig(synth_rig(spec));
  });
  const auto rec = stage("bench", [&] {
    return benchmark_projection(rig.cameras[0], rig.cameras[1], rig.circle, rig.common_fy,
                                rig.camera_height, a.points, a.reps, seed);
  });
  if (!a.out.empty()) {
    stage("write", [&] {
      std::ostringstream out;
      io::write_benchmark_csv(out, rec);
      write_file(a.out, out.str());
    });
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "circular %.3f ns/pt, full %.3f ns/pt (precomputed matrix %.3f ns/pt)\n"
                "speedup %.2fx (precomputed %.2fx), reduction %.2f%%; reference %.0fx / %.2f%%\n",
                rec.circular_ns, rec.full_ns, rec.full_precomputed_ns, rec.ratio,
                rec.precomputed_ratio, rec.reduction_percent, kReferenceSpeedup,
                kReferenceReductionPercent);
  std::cout << buf;
}

// --- synth --------------------------------------------------------------

struct SynthArgs {
  std::string rig_spec;
  std::string scene_spec;
  std::string out_dir;
};

void run_synth(const SynthArgs &a, std::optional<std::uint64_t> seed) {
  auto spec = stage("config", [&] { return io::parse_rig_spec(io::read_text(a.rig_spec)); });
  const auto scene = stage("config", [&] {
    return a.scene_spec.empty() ? default_scene() : io::parse_scene_spec(io::read_text(a.scene_spec));
  });
  if (seed) {
    spec.seed = *seed;
  }
  const fs::path dir{a.out_dir};
  const auto cameras = stage("synth", [&] { return synth_rig(spec); });
  stage("write", [&] {
    fs::create_directories(dir);
    auto set = io::CameraSet{};
    set.cameras = cameras;
    set.depth_ranges.assign(cameras.size(), {scene.z_near, scene.z_far});
    io::write_text(dir / "cameras.json", io::format_camera_file(set));
  });

  auto files = FileSource{};
  files.cameras = "cameras.json";
  files.circular = "circular.json";
  files.rectified = "rectified.json";
  for (const auto &cam : cameras) {
    const auto stem = "view_" + std::to_string(cam.id);
    const auto frame = stage("synth", [&] { return render(scene, cam); });
    stage("write", [&] {
      io::save_view_frame(frame, dir / (stem + ".yuv"), dir / (stem + "_depth.raw"));
    });
    files.views.push_back({cam.id, stem + ".yuv", stem + "_depth.raw"});
  }
  auto config = ExperimentConfig{};
  config.files = files;
  stage("write", [&] { io::write_text(dir / "predict.json", io::format_experiment_config(config)); });
  std::cout << "wrote " << cameras.size() << " views to " << dir.string() << "\n";
}

// --- bd-rate ------------------------------------------------------------

struct BdArgs {
  std::string anchor;
  std::string test;
};

void run_bd(const BdArgs &a) {
  const auto anchor = stage("load", [&] { return io::parse_rd_curve(io::read_text(a.anchor)); });
  const auto test = stage("load", [&] { return io::parse_rd_curve(io::read_text(a.test)); });
  const auto r = stage("bd-rate", [&] { return bd_rate(anchor, test); });
  std::cout << percent(r) << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Circular rectification of multiview rigs and circular inter-view projection"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = kDefaultSeed;
  auto *seed_opt = app.add_option("--seed", seed, "Seed for all randomness")
                       ->default_val(kDefaultSeed)
                       ->capture_default_str();

  FitArgs fit;
  auto *fit_cmd = app.add_subcommand("fit-circle", "Fit a circle to the camera centres");
  fit_cmd->add_option("--cameras", fit.cameras, "Camera file")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--report", fit.report, "Per-camera distance CSV");

  RectifyArgs rect;
  auto *rect_cmd = app.add_subcommand("rectify", "Rectify a rig onto its fitted circle");
  rect_cmd->add_option("--cameras", rect.cameras, "Camera file")->required()->check(CLI::ExistingFile);
  rect_cmd->add_option("--out-circular", rect.out_circular, "Circular camera file")->required();
  rect_cmd->add_option("--out-full", rect.out_full, "Rectified full camera file")->required();
  rect_cmd->add_option("--ox-policy", rect.ox_policy, "Principal-point target")
      ->check(CLI::IsMember({"convergence", "circle-center"}))
      ->capture_default_str();

  WarpArgs warp;
  auto *warp_cmd = app.add_subcommand("warp", "Warp one view onto its rectified camera");
  warp_cmd->add_option("--cameras", warp.cameras, "Original camera file")->required()->check(CLI::ExistingFile);
  warp_cmd->add_option("--rectified", warp.rectified, "Rectified camera file")->required()->check(CLI::ExistingFile);
  warp_cmd->add_option("--texture", warp.texture, "Raw 4:2:0 texture")->required()->check(CLI::ExistingFile);
  warp_cmd->add_option("--depth", warp.depth, "Raw 16-bit depth")->required()->check(CLI::ExistingFile);
  warp_cmd->add_option("--view", warp.view, "Camera id")->required();
  warp_cmd->add_option("--out", warp.out, "Output texture")->required();
  warp_cmd->add_option("--out-depth", warp.out_depth, "Output depth");
  warp_cmd->add_option("--frame", warp.frame, "Frame index")->capture_default_str();
  warp_cmd->add_flag("--fill-holes", warp.fill, "Fill disocclusions");

  PredictArgs pred;
  auto *pred_cmd = app.add_subcommand("predict", "Run the prediction experiment");
  pred_cmd->add_option("--config", pred.config, "Experiment config")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--out", pred.out, "Report CSV")->required();
  pred_cmd->add_option("--json", pred.json, "Report JSON");

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "Time circular against full projection");
  bench_cmd->add_option("--points", bench.points, "Points per pass")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Timed passes")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Benchmark CSV");

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Render a synthetic rig");
  synth_cmd->add_option("--rig-spec", synth.rig_spec, "Rig spec")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--scene-spec", synth.scene_spec, "Scene spec")->check(CLI::ExistingFile);
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  BdArgs bd;
  auto *bd_cmd = app.add_subcommand("bd-rate", "Bjontegaard delta rate of two RD curves");
  bd_cmd->add_option("--anchor", bd.anchor, "Anchor RD CSV")->required()->check(CLI::ExistingFile);
  bd_cmd->add_option("--test", bd.test, "Test RD CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  const auto explicit_seed = seed_opt->count() > 0 ? std::optional{seed} : std::nullopt;
  try {
    if (*fit_cmd) {
      run_fit(fit);
    } else if (*rect_cmd) {
      run_rectify(rect);
    } else if (*warp_cmd) {
      run_warp(warp);
    } else if (*pred_cmd) {
      run_predict(pred, explicit_seed);
    } else if (*bench_cmd) {
      run_bench(bench, seed);
    } else if (*synth_cmd) {
      run_synth(synth, explicit_seed);
    } else if (*bd_cmd) {
      run_bd(bd);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
