#include "bubbletree/geometry.hpp"

#include <cmath>

namespace bubbletree {

GreatSphereEmbedding::GreatSphereEmbedding(int ambient_dim, const Eigen::MatrixXd& rotation)
    : n_(ambient_dim), rotation_(Eigen::Matrix4d::Identity()) {
  if (ambient_dim != 3 && ambient_dim != 4)
    fail(ErrorCode::ConfigInvalid, "embedding ambient dimension must be 3 or 4");
  if (rotation.rows() != ambient_dim || rotation.cols() != ambient_dim)
    fail(ErrorCode::ConfigInvalid, "rotation size does not match ambient dimension");
  Eigen::MatrixXd gram = rotation.transpose() * rotation;
  if (!gram.isIdentity(1e-12))
    fail(ErrorCode::ConfigInvalid, "embedding rotation is not orthogonal");
  rotation_.topLeftCorner(ambient_dim, ambient_dim) = rotation;
}

GreatSphereEmbedding GreatSphereEmbedding::identity(int ambient_dim) {
  return GreatSphereEmbedding(ambient_dim,
                              Eigen::MatrixXd::Identity(ambient_dim, ambient_dim));
}

GreatSphereEmbedding GreatSphereEmbedding::plane_rotation(int i, int j, double angle) {
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(4, 4);
  const double c = std::cos(angle), s = std::sin(angle);
  rot(i, i) = c;
  rot(j, j) = c;
  rot(i, j) = -s;
  rot(j, i) = s;
  return GreatSphereEmbedding(4, rot);
}

GreatSphereEmbedding GreatSphereEmbedding::from_matrix(const Eigen::MatrixXd& rotation) {
  return GreatSphereEmbedding(static_cast<int>(rotation.rows()), rotation);
}

Ambient GreatSphereEmbedding::embed(const Eigen::Vector3d& p) const {
  Eigen::Vector4d lifted = Eigen::Vector4d::Zero();
  lifted.head<3>() = p;
  Eigen::Vector4d rotated = rotation_ * lifted;
  return rotated.head(n_);
}

Eigen::Vector3d stereo_project(PlanePoint x) { return stereo_project(x.z()); }

Eigen::Vector3d stereo_project(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    return {0.0, 0.0, -1.0};
  const double r2 = std::norm(z);
  if (r2 > 1e30) return {0.0, 0.0, -1.0};
  const double s = 1.0 / (1.0 + r2);
  return {2.0 * z.real() * s, 2.0 * z.imag() * s, (1.0 - r2) * s};
}

Eigen::Matrix<double, 3, 2> stereo_jacobian(Complex z) {
  Eigen::Matrix<double, 3, 2> jac;
  const double x = z.real(), y = z.imag();
  const double r2 = x * x + y * y;
  const double s = 1.0 / (1.0 + r2);
  const double s2 = s * s;
  jac(0, 0) = 2.0 * s - 4.0 * x * x * s2;
  jac(0, 1) = -4.0 * x * y * s2;
  jac(1, 0) = -4.0 * x * y * s2;
  jac(1, 1) = 2.0 * s - 4.0 * y * y * s2;
  jac(2, 0) = -4.0 * x * s2;
  jac(2, 1) = -4.0 * y * s2;
  return jac;
}

PlanePoint stereo_inverse(const Eigen::Vector3d& p) {
  const double denom = 1.0 + p.z();
  if (denom < 1e-12)
    fail(ErrorCode::SouthPole, "stereo_inverse undefined at the south pole");
  return {p.x() / denom, p.y() / denom};
}

double conformal_weight(PlanePoint x, double lambda) {
  const double u = 1.0 + lambda * lambda * (x.x * x.x + x.y * x.y);
  return 8.0 * lambda * lambda / (u * u);
}

Ambient project_to_target(const Ambient& x) {
  const double n = x.norm();
  if (n <= 0.5)
    fail(ErrorCode::TooFarFromTarget,
         "nearest-point projection needs |x| > 1/2, got " + std::to_string(n));
  return x / n;
}

Ambient tangent_project(const Ambient& p, const Ambient& v) {
  return v - p.dot(v) * p;
}

Ambient second_fundamental_form(const Ambient& p, const Ambient& v, const Ambient& w) {
  return -v.dot(w) * p;
}

double geodesic_distance(const Ambient& p0, const Ambient& p1) {
  // 2*atan2(|p0-p1|, |p0+p1|) is exact for unit vectors and well conditioned
  // at both ends of [0, pi].
  return 2.0 * std::atan2((p0 - p1).norm(), (p0 + p1).norm());
}

Ambient geodesic(const Ambient& p0, const Ambient& p1, double t) {
  const double theta = geodesic_distance(p0, p1);
  if (theta < 1e-14) return p0;
  if (M_PI - theta < 1e-9)
    fail(ErrorCode::AntipodalPoints, "geodesic between antipodal points is not unique");
  const double s = std::sin(theta);
  return (std::sin((1.0 - t) * theta) / s) * p0 + (std::sin(t * theta) / s) * p1;
}

Ambient geodesic_velocity(const Ambient& p0, const Ambient& p1, double t) {
  const double theta = geodesic_distance(p0, p1);
  if (theta < 1e-14) {
    Ambient zero(p0.size());
    zero.setZero();
    return zero;
  }
  if (M_PI - theta < 1e-9)
    fail(ErrorCode::AntipodalPoints, "geodesic between antipodal points is not unique");
  const double s = std::sin(theta);
  return (-theta * std::cos((1.0 - t) * theta) / s) * p0 +
         (theta * std::cos(t * theta) / s) * p1;
}

}  // namespace bubbletree
