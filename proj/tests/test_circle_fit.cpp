#include "helpers.hpp"
#include "oracles.hpp"

#include <circrect/circle_fit.hpp>

#include <numbers>

using namespace circrect;
using testing::check_throws_kind;

namespace {
auto ring(double xc, double zc, double r, int n, double sigma, std::uint64_t seed)
    -> std::vector<GroundPoint> {
  SplitMix64 rng{seed};
  auto pts = std::vector<GroundPoint>{};
  for (int i = 0; i < n; ++i) {
    const auto a = 2.0 * std::numbers::pi * i / n;
    pts.push_back({xc + r * std::sin(a) + sigma * rng.normal(),
                   zc + r * std::cos(a) + sigma * rng.normal()});
  }
  return pts;
}
} // namespace

TEST_SUITE("circle_fit") {

TEST_CASE("three points on the unit circle") {
  const std::vector<GroundPoint> pts{{1, 0}, {0, 1}, {-1, 0}};
  const auto fit = fit_circle(pts);
  CHECK(std::abs(fit.circle.x_cen) <= 1e-12);
  CHECK(std::abs(fit.circle.z_cen) <= 1e-12);
  CHECK(std::abs(fit.circle.r - 1) <= 1e-12);
  CHECK(fit.residual <= 1e-18);
}

TEST_CASE("noise-free ring is recovered") {
  const auto pts = ring(1, -2, 5, 8, 0, 1);
  const auto fit = fit_circle(pts);
  CHECK(std::abs(fit.circle.x_cen - 1) <= 1e-9);
  CHECK(std::abs(fit.circle.z_cen + 2) <= 1e-9);
  CHECK(std::abs(fit.circle.r - 5) <= 1e-9);
  CHECK(fit.residual <= 1e-15);
}

TEST_CASE("noisy ring matches the grid oracle") {
  const auto pts = ring(1, -2, 5, 8, 0.01, 7);
  const auto fit = fit_circle(pts);
  CHECK(std::abs(fit.circle.x_cen - 1) <= 0.05);
  CHECK(std::abs(fit.circle.z_cen + 2) <= 0.05);
  CHECK(std::abs(fit.circle.r - 5) <= 0.05);
  const auto grid = oracle::grid_search_circle(pts, 1, -2, 5, 0.2);
  CHECK(std::abs(fit.residual - grid.S) <= 1e-10);
  CHECK(fit.residual <= grid.S + 1e-15);
}

TEST_CASE("result is a stationary point of the objective") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto pts = ring(0.5, 0.3, 3, 6, 0.05, seed);
    const auto fit = fit_circle(pts);
    const auto g = oracle::objective_gradient(pts, fit.circle.x_cen, fit.circle.z_cen, fit.circle.r);
    const auto gmax = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
    CHECK(gmax <= 1e-8 * (1 + fit.residual));
  }
}

TEST_CASE("residual bookkeeping") {
  const auto pts = ring(2, 2, 4, 10, 0.1, 3);
  const auto fit = fit_circle(pts);
  const auto S = oracle::circle_sse(pts, fit.circle.x_cen, fit.circle.z_cen, fit.circle.r);
  CHECK(std::abs(fit.residual - S) <= 1e-12 * S);
  CHECK(fit.residual >= 0);
  REQUIRE(fit.per_camera_distance.size() == pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto d = std::hypot(pts[i].x - fit.circle.x_cen, pts[i].z - fit.circle.z_cen) - fit.circle.r;
    CHECK(std::abs(fit.per_camera_distance[i] - d) <= 1e-12);
  }
  CHECK(fit.iterations >= 1);
  CHECK(fit.iterations <= 100);
}

TEST_CASE("refinement never worsens the algebraic seed") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto pts = ring(0, 0, 5, 8, 0.3, seed);
    const auto seed_circle = kasa_fit(pts);
    CHECK(fit_circle(pts).residual <= circle_objective(pts, seed_circle) * (1 + 1e-12));
  }
}

TEST_CASE("translation and scale equivariance") {
  const auto pts = ring(0.2, -0.1, 2, 7, 0.05, 5);
  const auto base = fit_circle(pts).circle;
  const double s = 3.7;
  const double tx = -12.5;
  const double tz = 40.25;
  auto moved = pts;
  for (auto &p : moved) {
    p = {s * p.x + tx, s * p.z + tz};
  }
  const auto fit = fit_circle(moved).circle;
  CHECK(std::abs(fit.x_cen - (s * base.x_cen + tx)) <= 1e-9 * (1 + std::abs(fit.x_cen)));
  CHECK(std::abs(fit.z_cen - (s * base.z_cen + tz)) <= 1e-9 * (1 + std::abs(fit.z_cen)));
  CHECK(std::abs(fit.r - s * base.r) <= 1e-9 * fit.r);
}

TEST_CASE("partial arc") {
  SplitMix64 rng{9};
  auto pts = std::vector<GroundPoint>{};
  for (int i = 0; i < 8; ++i) {
    const auto a = -std::numbers::pi / 6 + (std::numbers::pi / 3) * i / 7;
    pts.push_back({5 * std::sin(a), 5 * std::cos(a)});
  }
  const auto fit = fit_circle(pts);
  CHECK(std::abs(fit.circle.r - 5) <= 1e-9);
  CHECK(std::abs(fit.circle.x_cen) <= 1e-9);
  CHECK(std::abs(fit.circle.z_cen) <= 1e-9);
}

TEST_CASE("degenerate inputs") {
  check_throws_kind([] { (void)fit_circle(std::vector<GroundPoint>{{0, 0}, {1, 1}}); },
                    ErrorKind::DegenerateInput);
  check_throws_kind(
      [] { (void)fit_circle(std::vector<GroundPoint>{{0, 0}, {1, 1}, {1, 1 + 1e-12}}); },
      ErrorKind::DegenerateInput);
  check_throws_kind([] { (void)fit_circle(std::vector<GroundPoint>{{0, 0}, {1, 0}, {2, 0}, {3, 0}}); },
                    ErrorKind::CollinearCameras);
}

TEST_CASE("snap_to_circle") {
  const Circle c{1, 2, 3};
  SUBCASE("fixed point") {
    const auto p = snap_to_circle({1 + 3, 2}, c);
    CHECK(p.x == doctest::Approx(4));
    CHECK(p.z == doctest::Approx(2));
  }
  SUBCASE("radial scaling") {
    const auto p = snap_to_circle({1 + 6, 2}, c);
    CHECK(std::abs(p.x - 4) <= 1e-12);
    CHECK(std::abs(p.z - 2) <= 1e-12);
  }
  SUBCASE("lands on the circle and is idempotent") {
    SplitMix64 rng{4};
    for (int i = 0; i < 200; ++i) {
      const GroundPoint q{rng.uniform(-10, 10), rng.uniform(-10, 10)};
      const auto p = snap_to_circle(q, c);
      CHECK(std::abs(std::hypot(p.x - c.x_cen, p.z - c.z_cen) - c.r) <= 1e-12 * c.r);
      const auto p2 = snap_to_circle(p, c);
      CHECK(std::abs(p2.x - p.x) <= 1e-12 * c.r);
      CHECK(std::abs(p2.z - p.z) <= 1e-12 * c.r);
    }
  }
  SUBCASE("at the centre") {
    check_throws_kind([&] { (void)snap_to_circle({1, 2}, c); }, ErrorKind::AtCenter);
  }
}

TEST_CASE("camera_angle") {
  const Circle c{-1, 4, 2};
  CHECK(camera_angle({-1, 6}, c) == 0.0);
  CHECK(std::abs(camera_angle({1, 4}, c) - std::numbers::pi / 2) <= 1e-15);
  CHECK(camera_angle({-1, 2}, c) == doctest::Approx(std::numbers::pi));
  SplitMix64 rng{5};
  for (int i = 0; i < 1000; ++i) {
    const auto a0 = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const auto a = camera_angle({c.x_cen + c.r * std::sin(a0), c.z_cen + c.r * std::cos(a0)}, c);
    CHECK(std::abs(a - a0) <= 1e-12);
    CHECK(a > -std::numbers::pi);
    CHECK(a <= std::numbers::pi);
  }
  check_throws_kind([&] { (void)camera_angle({-1, 6.01}, c); }, ErrorKind::NotOnCircle);
}

} // TEST_SUITE
