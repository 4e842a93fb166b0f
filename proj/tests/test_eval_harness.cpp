#include "helpers.hpp"
#include "oracles.hpp"

#include <circrect/eval_harness.hpp>
#include <circrect/io.hpp>

#include <filesystem>

using namespace circrect;
using testing::check_throws_kind;

namespace {
auto curve(std::initializer_list<std::pair<double, double>> pts) -> RdCurve {
  auto c = RdCurve{};
  for (const auto &[rate, psnr] : pts) {
    c.points.push_back({rate, psnr});
  }
  return c;
}

auto small_rig_spec() -> RigSpec {
  auto spec = RigSpec{};
  spec.n_cameras = 36;
  spec.image_width = 160;
  spec.image_height = 120;
  spec.intrinsics = {125, 125, 80, 60, 0};
  return spec;
}

const auto kAnchor = curve({{1000, 34.0}, {1800, 36.5}, {3100, 38.9}, {5600, 41.2}});
} // namespace

TEST_SUITE("eval_harness") {

TEST_CASE("psnr from sse") {
  CHECK(std::isinf(psnr_from_sse(0.0, 100)));
  CHECK(std::isnan(psnr_from_sse(1.0, 0)));
  CHECK(psnr_from_sse(255.0 * 255.0, 1) == doctest::Approx(0.0));
  CHECK(psnr_from_sse(100.0, 10000) == doctest::Approx(10 * std::log10(255.0 * 255.0 * 100)));
}

TEST_CASE("bd_rate") {
  SUBCASE("identical curves") { CHECK(std::abs(bd_rate(kAnchor, kAnchor)) <= 1e-12); }

  SUBCASE("uniform rate scaling") {
    auto test = kAnchor;
    for (auto &p : test.points) {
      p.bitrate *= 0.9;
    }
    CHECK(std::abs(bd_rate(kAnchor, test) + 10.0) <= 1e-9);
    CHECK(std::abs(bd_rate(test, kAnchor) - (1.0 / 0.9 - 1.0) * 100) <= 1e-9);
  }

  SUBCASE("antisymmetry") {
    SplitMix64 rng{1};
    for (int i = 0; i < 200; ++i) {
      auto a = RdCurve{};
      auto b = RdCurve{};
      double ra = 500;
      double rb = 500 * rng.uniform(0.7, 1.3);
      double pa = 30;
      double pb = 30 + rng.uniform(-1, 1);
      for (int k = 0; k < 4; ++k) {
        ra *= rng.uniform(1.4, 2.0);
        rb *= rng.uniform(1.4, 2.0);
        pa += rng.uniform(1.5, 3.0);
        pb += rng.uniform(1.5, 3.0);
        a.points.push_back({ra, pa});
        b.points.push_back({rb, pb});
      }
      const auto ab = bd_rate(a, b);
      const auto ba = bd_rate(b, a);
      CHECK(std::abs((1 + ab / 100) * (1 + ba / 100) - 1) <= 1e-6);
    }
  }

  SUBCASE("matches trapezoid integration of the interpolants") {
    const auto b = curve({{900, 34.4}, {1500, 36.6}, {2900, 39.3}, {5000, 41.0}});
    const auto c = curve({{1200, 33.1}, {2000, 35.9}, {3300, 38.2}, {6400, 41.9}});
    for (const auto &[x, y] : {std::pair{kAnchor, b}, std::pair{kAnchor, c}, std::pair{b, c}}) {
      CHECK(std::abs(bd_rate(x, y) - oracle::bd_rate_trapezoid(x, y)) <= 0.01);
    }
  }

  SUBCASE("errors") {
    const auto far = curve({{1000, 50}, {2000, 52}, {3000, 54}, {4000, 56}});
    check_throws_kind([&] { (void)bd_rate(kAnchor, far); }, ErrorKind::NoOverlap);
    const auto flat = curve({{1000, 35}, {2000, 35}, {3000, 35}, {4000, 38}});
    check_throws_kind([&] { (void)bd_rate(kAnchor, flat); }, ErrorKind::IllConditioned);
    check_throws_kind([&] { (void)bd_rate(kAnchor, curve({{1, 1}, {2, 2}, {3, 3}})); },
                      ErrorKind::InvalidArgument);
    check_throws_kind(
        [&] { (void)bd_rate(kAnchor, curve({{1, 30}, {3, 32}, {2, 34}, {4, 36}})); },
        ErrorKind::InvalidArgument);
  }
}

TEST_CASE("predict_view") {
  const auto spec = small_rig_spec();
  const auto rig = rectify_rig(synth_rig(spec));
  const auto scene = default_scene();
  const auto f0 = render(scene, rig.full_params[0]);
  const auto f1 = render(scene, rig.full_params[1]);

  auto same = PairCameras{rig.full_params[0], rig.full_params[0], rig.cameras[0], rig.cameras[0],
                          linear_pair_from_cameras(rig.full_params[0], rig.full_params[0])};
  for (const auto p : {Predictor::Disparity, Predictor::Circular, Predictor::FullProjection}) {
    const auto rec = predict_view(f0, f0, same, p);
    CHECK(rec.sse == 0.0);
    CHECK(std::isinf(rec.psnr_db));
    CHECK(rec.hole_fraction == 0.0);
    CHECK(rec.pixel_count == 160 * 120);
  }

  auto pair = PairCameras{rig.full_params[0], rig.full_params[1], rig.cameras[0], rig.cameras[1],
                          linear_pair_from_cameras(rig.full_params[0], rig.full_params[1])};
  const auto circ = predict_view(f0, f1, pair, Predictor::Circular);
  const auto full = predict_view(f0, f1, pair, Predictor::FullProjection);
  const auto disp = predict_view(f0, f1, pair, Predictor::Disparity);
  CHECK(circ.psnr_db >= full.psnr_db - 0.01);
  CHECK(std::abs(circ.psnr_db - full.psnr_db) <= 0.01);
  CHECK(circ.psnr_db > disp.psnr_db);
  CHECK(circ.psnr_db == doctest::Approx(psnr_from_sse(circ.sse, circ.pixel_count)));

  auto missing = pair;
  missing.circular_src.reset();
  check_throws_kind([&] { (void)predict_view(f0, f1, missing, Predictor::Circular); },
                    ErrorKind::PredictorMismatch);
  missing = pair;
  missing.linear.reset();
  check_throws_kind([&] { (void)predict_view(f0, f1, missing, Predictor::Disparity); },
                    ErrorKind::PredictorMismatch);
  missing = pair;
  missing.circular_dst->fx += 1;
  check_throws_kind([&] { (void)predict_view(f0, f1, missing, Predictor::Circular); },
                    ErrorKind::PredictorMismatch);
}

TEST_CASE("benchmark record") {
  const auto rig = rectify_rig(synth_rig(small_rig_spec()));
  const auto empty = benchmark_projection(rig.cameras[0], rig.cameras[1], rig.circle,
                                          rig.common_fy, rig.camera_height, 0, 9);
  CHECK(empty.n_points == 0);
  CHECK(empty.ratio == 0.0);
  CHECK(empty.circular_ns == 0.0);

  const auto rec = benchmark_projection(rig.cameras[0], rig.cameras[1], rig.circle, rig.common_fy,
                                        rig.camera_height, 20000, 9);
  CHECK(rec.circular_ns > 0);
  CHECK(rec.full_ns > 0);
  CHECK(rec.ratio == doctest::Approx(rec.full_ns / rec.circular_ns));
  CHECK(rec.reduction_percent == doctest::Approx((rec.circular_ns / rec.full_ns - 1) * 100));
  CHECK(std::isfinite(rec.checksum));
}

TEST_CASE("run_experiment") {
  auto config = ExperimentConfig{};
  config.rig = small_rig_spec();
  config.rig->position_noise = 0.02;
  config.rig->rotation_noise = 0.005;
  config.pairs = {{0, 1}, {2, 1}};

  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  REQUIRE(a.records.size() == 6);
  CHECK(a.note == kReportNote);
  CHECK(a.records[0].pair == "0-1");
  CHECK(a.records[3].pair == "2-1");
  CHECK(a.records[1].predictor == Predictor::Circular);
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].sse == b.records[i].sse);
    CHECK(a.records[i].hole_fraction == b.records[i].hole_fraction);
    CHECK(a.records[i].pixel_count == b.records[i].pixel_count);
  }
  CHECK(a.records[1].psnr_db > a.records[0].psnr_db);
  CHECK(std::abs(a.records[1].psnr_db - a.records[2].psnr_db) <= 0.01);

  SUBCASE("stage attribution") {
    auto bad = config;
    bad.pairs = {{0, 99}};
    auto msg = testing::error_message([&] { (void)run_experiment(bad); });
    CHECK(msg.find("stage predict") != std::string::npos);

    bad = config;
    bad.rig->n_cameras = 2;
    msg = testing::error_message([&] { (void)run_experiment(bad); });
    CHECK(msg.find("stage") != std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "circrect_missing_depth";
    std::filesystem::create_directories(dir);
    auto set = io::CameraSet{};
    set.cameras = synth_rig(small_rig_spec());
    set.depth_ranges.assign(set.cameras.size(), {1, 40});
    io::write_text(dir / "cameras.json", io::format_camera_file(set));
    auto files = FileSource{};
    files.cameras = dir / "cameras.json";
    for (const auto &cam : set.cameras) {
      files.views.push_back({cam.id, dir / "t.yuv", dir / "nope.raw"});
    }
    io::write_text(dir / "t.yuv", "");
    auto file_config = ExperimentConfig{};
    file_config.files = files;
    msg = testing::error_message([&] { (void)run_experiment(file_config); });
    CHECK(msg.find("stage load") != std::string::npos);
    CHECK(msg.find("nope.raw") != std::string::npos);
    check_throws_kind([&] { (void)run_experiment(file_config); }, ErrorKind::StageFailure);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("predictor names") {
  for (const auto p : {Predictor::Disparity, Predictor::Circular, Predictor::FullProjection}) {
    CHECK(parse_predictor(to_string(p)) == p);
  }
  check_throws_kind([] { (void)parse_predictor("magic"); }, ErrorKind::InvalidArgument);
}

} // TEST_SUITE
