#include <circrect/camera_model.hpp>
#include <circrect/error.hpp>

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace circrect {

auto Intrinsics::matrix() const -> Mat3 {
  Mat3 K;
  K << fx, skew, ox, //
      0.0, fy, oy,   //
      0.0, 0.0, 1.0;
  return K;
}

void validate(const Intrinsics &intr) {
  const auto finite = std::isfinite(intr.fx) && std::isfinite(intr.fy) && std::isfinite(intr.ox) &&
                      std::isfinite(intr.oy) && std::isfinite(intr.skew);
  if (!finite) {
    throw Error{ErrorKind::InvalidArgument, "intrinsics contain non-finite values"};
  }
  if (!(intr.fx > 0.0) || !(intr.fy > 0.0)) {
    std::ostringstream msg;
    msg << "focal lengths must be positive (f_x=" << intr.fx << ", f_y=" << intr.fy << ")";
    throw Error{ErrorKind::InvalidArgument, msg.str()};
  }
}

void validate(const Extrinsics &extr) {
  if (!extr.R.allFinite() || !extr.T.allFinite()) {
    throw Error{ErrorKind::InvalidArgument, "extrinsics contain non-finite values"};
  }
  const auto ortho = (extr.R.transpose() * extr.R - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9) {
    std::ostringstream msg;
    msg << "R is not orthonormal (max |R^T R - I| = " << ortho << ")";
    throw Error{ErrorKind::InvalidArgument, msg.str()};
  }
  const auto det = extr.R.determinant();
  if (std::abs(det - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "det(R) = " << det << ", expected 1";
    throw Error{ErrorKind::InvalidArgument, msg.str()};
  }
}

void validate(const CameraParams &cam) {
  try {
    validate(cam.intr);
    validate(cam.extr);
    if (cam.width <= 0 || cam.height <= 0) {
      throw Error{ErrorKind::InvalidArgument, "image size must be positive"};
    }
  } catch (const Error &e) {
    std::ostringstream msg;
    msg << "camera " << cam.id << ": " << e.what();
    throw Error{e.kind(), msg.str()};
  }
}

namespace {
// Exact 1-norm reciprocal condition; NaN or 0 when singular.
template <typename M> auto reciprocal_condition(const M &a, const M &inv) -> double {
  if (!inv.allFinite()) {
    return 0.0;
  }
  const auto norm1 = [](const M &x) { return x.cwiseAbs().colwise().sum().maxCoeff(); };
  return 1.0 / (norm1(a) * norm1(inv));
}
} // namespace

ProjectionMatrix::ProjectionMatrix(const Mat4 &m) : m_matrix{m} {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw Error{ErrorKind::InvalidArgument, "projection matrix bottom row must be (0, 0, 0, 1)"};
  }
  if (!m.allFinite()) {
    throw Error{ErrorKind::InvalidArgument, "projection matrix contains non-finite values"};
  }
  const Mat4 inv = m.inverse();
  const auto rcond = reciprocal_condition(m, inv);
  if (!(rcond >= kMinReciprocalCondition)) {
    std::ostringstream msg;
    msg << "reciprocal condition " << rcond << " below " << kMinReciprocalCondition;
    throw Error{ErrorKind::SingularProjection, msg.str()};
  }
}

auto build_projection(const CameraParams &cam) -> ProjectionMatrix {
  Mat4 intrinsic = Mat4::Identity();
  intrinsic.topLeftCorner<3, 3>() = cam.intr.matrix();

  Mat4 rigid = Mat4::Identity();
  rigid.topLeftCorner<3, 3>() = cam.extr.R;
  rigid.topRightCorner<3, 1>() = cam.extr.T;

  Mat4 P = intrinsic * rigid;
  P.row(3) << 0.0, 0.0, 0.0, 1.0;
  return ProjectionMatrix{P};
}

auto invert_projection(const ProjectionMatrix &P) -> ProjectionMatrix {
  // Block inverse keeps the bottom row exact: [A t; 0 1]^-1 = [A^-1 -A^-1 t; 0 1].
  const Mat3 A = P.matrix().topLeftCorner<3, 3>();
  const Vec3 t = P.matrix().topRightCorner<3, 1>();
  const Mat3 Ainv = A.inverse();
  if (!(reciprocal_condition(A, Ainv) >= kMinReciprocalCondition)) {
    throw Error{ErrorKind::SingularProjection, "upper-left block is numerically singular"};
  }

  Mat4 inv = Mat4::Identity();
  inv.topLeftCorner<3, 3>() = Ainv;
  inv.topRightCorner<3, 1>() = -Ainv * t;
  // same conditioning as P, already checked above
  return ProjectionMatrix{inv, ProjectionMatrix::Trusted{}};
}

auto relative_projection(const CameraParams &src, const CameraParams &dst) -> Mat4 {
  const auto Psrc = build_projection(src);
  const auto Pdst = build_projection(dst);
  return Pdst.matrix() * invert_projection(Psrc).matrix();
}

auto apply_relative_projection(const Mat4 &M, const ImagePoint &p, ImagePoint &out) -> bool {
  const Vec4 h = M * Vec4{p.z * p.x, p.z * p.y, p.z, 1.0};
  if (!(h[2] > 0.0)) {
    return false;
  }
  out = {h[0] / h[2], h[1] / h[2], h[2]};
  return true;
}

auto project_point(const CameraParams &src, const CameraParams &dst, const ImagePoint &p)
    -> ImagePoint {
  if (!(p.z > 0.0)) {
    throw Error{ErrorKind::InvalidArgument, "source depth must be positive"};
  }
  const Mat4 M = relative_projection(src, dst);
  const Vec4 h = M * Vec4{p.z * p.x, p.z * p.y, p.z, 1.0};

  if (std::abs(h[3] - 1.0) > 1e-9) {
    throw Error{ErrorKind::SingularProjection, "homogeneous coordinate drifted from 1"};
  }
  if (!(h[2] > 0.0)) {
    std::ostringstream msg;
    msg << "point lands at depth " << h[2] << " in camera " << dst.id;
    throw Error{ErrorKind::BehindCamera, msg.str()};
  }
  return {h[0] / h[2], h[1] / h[2], h[2]};
}

auto unproject(const CameraParams &cam, const ImagePoint &p) -> Vec3 {
  const auto &k = cam.intr;
  const auto Y = (p.y - k.oy) * p.z / k.fy;
  const auto X = (p.x - k.ox) * p.z / k.fx - k.skew * Y / k.fx;
  const Vec3 cam_point{X, Y, p.z};
  return cam.extr.R.transpose() * (cam_point - cam.extr.T);
}

auto project_world(const CameraParams &cam, const Vec3 &world) -> ImagePoint {
  const Vec3 c = cam.extr.R * world + cam.extr.T;
  const auto &k = cam.intr;
  return {k.fx * c.x() / c.z() + k.skew * c.y() / c.z() + k.ox, k.fy * c.y() / c.z() + k.oy,
          c.z()};
}

} // namespace circrect
