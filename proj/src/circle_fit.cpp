#include <circrect/circle_fit.hpp>
#include <circrect/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace circrect {
namespace {
constexpr auto kDistinctTolerance = 1e-9;
constexpr auto kMaxIterations = 100;
constexpr auto kMaxHalvings = 60;
constexpr auto kCollinearRatio = 1e6;

auto spread(std::span<const GroundPoint> points) -> double {
  auto diameter = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      diameter = std::max(diameter, std::hypot(points[i].x - points[j].x, points[i].z - points[j].z));
    }
  }
  return diameter;
}

auto count_distinct(std::span<const GroundPoint> points) -> size_t {
  auto distinct = std::vector<GroundPoint>{};
  for (const auto &p : points) {
    const auto seen = std::any_of(distinct.begin(), distinct.end(), [&](const GroundPoint &q) {
      return std::hypot(p.x - q.x, p.z - q.z) <= kDistinctTolerance;
    });
    if (!seen) {
      distinct.push_back(p);
    }
  }
  return distinct.size();
}

struct Normalization {
  double mx{};
  double mz{};
  double scale{1.0};

  [[nodiscard]] auto apply(const GroundPoint &p) const -> GroundPoint {
    return {(p.x - mx) / scale, (p.z - mz) / scale};
  }
  [[nodiscard]] auto restore(const Circle &c) const -> Circle {
    return {mx + scale * c.x_cen, mz + scale * c.z_cen, scale * c.r};
  }
};

auto make_normalization(std::span<const GroundPoint> points) -> Normalization {
  auto n = Normalization{};
  for (const auto &p : points) {
    n.mx += p.x;
    n.mz += p.z;
  }
  n.mx /= static_cast<double>(points.size());
  n.mz /= static_cast<double>(points.size());
  auto rms = 0.0;
  for (const auto &p : points) {
    rms += (p.x - n.mx) * (p.x - n.mx) + (p.z - n.mz) * (p.z - n.mz);
  }
  n.scale = std::sqrt(rms / static_cast<double>(points.size()));
  return n;
}

// Kasa fit on already well-scaled points. Returns false if the linear system
// is rank deficient or yields an imaginary radius.
auto kasa_normalized(std::span<const GroundPoint> points, Circle &out) -> bool {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &p = points[static_cast<size_t>(i)];
    A(i, 0) = p.x;
    A(i, 1) = p.z;
    A(i, 2) = 1.0;
    b(i) = -(p.x * p.x + p.z * p.z);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr{A};
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) {
    return false;
  }
  const Eigen::Vector3d def = qr.solve(b);
  const auto cx = -0.5 * def[0];
  const auto cz = -0.5 * def[1];
  const auto r2 = cx * cx + cz * cz - def[2];
  if (!(r2 > 0.0) || !std::isfinite(r2)) {
    return false;
  }
  out = {cx, cz, std::sqrt(r2)};
  return true;
}

auto collinear_error(double radius, double diameter) -> Error {
  std::ostringstream msg;
  msg << "best-fit radius " << radius << " exceeds " << kCollinearRatio
      << " x point spread " << diameter << "; cameras lie on a line";
  return Error{ErrorKind::CollinearCameras, msg.str()};
}
} // namespace

auto circle_objective(std::span<const GroundPoint> points, const Circle &circle) -> double {
  auto sum = 0.0;
  for (const auto &p : points) {
    const auto d = std::hypot(p.x - circle.x_cen, p.z - circle.z_cen) - circle.r;
    sum += d * d;
  }
  return sum;
}

auto kasa_fit(std::span<const GroundPoint> points) -> Circle {
  if (points.size() < 3 || count_distinct(points) < 3) {
    throw Error{ErrorKind::DegenerateInput, "at least three distinct positions are required"};
  }
  const auto norm = make_normalization(points);
  auto scaled = std::vector<GroundPoint>{};
  scaled.reserve(points.size());
  std::transform(points.begin(), points.end(), std::back_inserter(scaled),
                 [&](const GroundPoint &p) { return norm.apply(p); });
  auto c = Circle{};
  if (!kasa_normalized(scaled, c)) {
    throw collinear_error(std::numeric_limits<double>::infinity(), spread(points));
  }
  return norm.restore(c);
}

auto fit_circle(std::span<const GroundPoint> points) -> FitResult {
  if (points.size() < 3 || count_distinct(points) < 3) {
    throw Error{ErrorKind::DegenerateInput, "at least three distinct positions are required"};
  }
  const auto diameter = spread(points);
  const auto norm = make_normalization(points);
  auto scaled = std::vector<GroundPoint>{};
  scaled.reserve(points.size());
  std::transform(points.begin(), points.end(), std::back_inserter(scaled),
                 [&](const GroundPoint &p) { return norm.apply(p); });

  auto c = Circle{};
  if (!kasa_normalized(scaled, c) || c.r * norm.scale > kCollinearRatio * diameter) {
    throw collinear_error(c.r * norm.scale, diameter);
  }

  const auto n = static_cast<Eigen::Index>(scaled.size());
  auto S = circle_objective(scaled, c);
  auto iterations = 0;

  for (; iterations < kMaxIterations; ++iterations) {
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto &p = scaled[static_cast<size_t>(i)];
      const auto dx = p.x - c.x_cen;
      const auto dz = p.z - c.z_cen;
      const auto rho = std::hypot(dx, dz);
      if (rho == 0.0) {
        J.row(i) << 0.0, 0.0, -1.0;
      } else {
        J.row(i) << -dx / rho, -dz / rho, -1.0;
      }
      d(i) = rho - c.r;
    }
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-d);
    if (!step.allFinite()) {
      break;
    }

    auto lambda = 1.0;
    auto accepted = false;
    auto candidate = c;
    auto S_candidate = S;
    for (int h = 0; h < kMaxHalvings; ++h) {
      candidate = {c.x_cen + lambda * step[0], c.z_cen + lambda * step[1], c.r + lambda * step[2]};
      S_candidate = circle_objective(scaled, candidate);
      // ties within rounding still move towards the stationary point
      if (candidate.r > 0.0 && S_candidate <= S * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      break;
    }
    c = candidate;
    S = S_candidate;

    const auto step_size = lambda * step.cwiseAbs().maxCoeff() * norm.scale;
    if (step_size <= 1e-12 * (1.0 + c.r * norm.scale)) {
      ++iterations;
      break;
    }
  }

  auto result = FitResult{};
  result.circle = norm.restore(c);
  if (!(result.circle.r <= kCollinearRatio * diameter) || !std::isfinite(result.circle.x_cen) ||
      !std::isfinite(result.circle.z_cen)) {
    throw collinear_error(result.circle.r, diameter);
  }
  result.iterations = iterations;
  result.residual = circle_objective(points, result.circle);
  result.per_camera_distance.reserve(points.size());
  for (const auto &p : points) {
    result.per_camera_distance.push_back(
        std::hypot(p.x - result.circle.x_cen, p.z - result.circle.z_cen) - result.circle.r);
  }
  return result;
}

auto snap_to_circle(const GroundPoint &pos, const Circle &circle) -> GroundPoint {
  const auto dx = pos.x - circle.x_cen;
  const auto dz = pos.z - circle.z_cen;
  const auto dist = std::hypot(dx, dz);
  if (dist < 1e-9 * circle.r) {
    throw Error{ErrorKind::AtCenter, "position coincides with the circle centre"};
  }
  return {circle.x_cen + circle.r * dx / dist, circle.z_cen + circle.r * dz / dist};
}

auto camera_angle(const GroundPoint &pos_on_circle, const Circle &circle) -> double {
  const auto dx = pos_on_circle.x - circle.x_cen;
  const auto dz = pos_on_circle.z - circle.z_cen;
  const auto off = std::abs(std::hypot(dx, dz) - circle.r);
  if (off > 1e-6 * circle.r) {
    std::ostringstream msg;
    msg << "position is " << off << " away from the circle";
    throw Error{ErrorKind::NotOnCircle, msg.str()};
  }
  auto alpha = std::atan2(dx, dz);
  if (alpha <= -std::numbers::pi) {
    alpha = std::numbers::pi;
  }
  return alpha;
}

} // namespace circrect
