#pragma once

#include <Eigen/Dense>
#include <complex>

#include "bubbletree/errors.hpp"

namespace bubbletree {

using Complex = std::complex<double>;

// Ambient vectors live in R^3 or R^4 depending on the target sphere; a
// dynamic vector with fixed max size keeps them off the heap.
using Ambient = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using AmbientJacobian = Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 4, 2>;

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  PlanePoint() = default;
  PlanePoint(double x_, double y_) : x(x_), y(y_) {}
  PlanePoint(Complex z) : x(z.real()), y(z.imag()) {}
  Complex z() const { return {x, y}; }
  double abs() const { return std::hypot(x, y); }
};

struct TargetManifold {
  int ambient_dim = 3;

  explicit TargetManifold(int n = 3) : ambient_dim(n) {
    if (n != 3 && n != 4) fail(ErrorCode::ConfigInvalid, "target sphere must sit in R^3 or R^4");
  }
};

// Isometric inclusion of S^2 into S^{N-1}: pad with zeros, then rotate.
// The image is a totally geodesic great 2-sphere.
class GreatSphereEmbedding {
 public:
  GreatSphereEmbedding() : n_(3), rotation_(Eigen::Matrix4d::Identity()) {}
  GreatSphereEmbedding(int ambient_dim, const Eigen::MatrixXd& rotation);

  static GreatSphereEmbedding identity(int ambient_dim = 3);
  // Rotation by `angle` in the coordinate plane (i,j) of R^4, acting after
  // inclusion; used to tilt tangent planes in the transversal S^3 setups.
  static GreatSphereEmbedding plane_rotation(int i, int j, double angle);
  static GreatSphereEmbedding from_matrix(const Eigen::MatrixXd& rotation);

  int ambient_dim() const { return n_; }

  Ambient embed(const Eigen::Vector3d& p) const;
  // The differential is the same linear map restricted to R^3.
  Ambient push(const Eigen::Vector3d& v) const { return embed(v); }

  const Eigen::Matrix4d& rotation() const { return rotation_; }

 private:
  int n_;
  Eigen::Matrix4d rotation_;  // top-left n x n block is the actual rotation
};

// Inverse stereographic projection pi(x) = (2x, 1-|x|^2)/(1+|x|^2).
// Non-finite input is the point at infinity and maps to the south pole.
Eigen::Vector3d stereo_project(PlanePoint x);
Eigen::Vector3d stereo_project(Complex z);

// Jacobian of pi as a 3x2 matrix (columns d/dx, d/dy).
Eigen::Matrix<double, 3, 2> stereo_jacobian(Complex z);

PlanePoint stereo_inverse(const Eigen::Vector3d& p);

// |grad pi_lambda|^2 for pi_lambda(z) = pi(lambda z).
double conformal_weight(PlanePoint x, double lambda);

Ambient project_to_target(const Ambient& x);
Ambient tangent_project(const Ambient& p, const Ambient& v);
Ambient second_fundamental_form(const Ambient& p, const Ambient& v, const Ambient& w);

Ambient geodesic(const Ambient& p0, const Ambient& p1, double t);
// Velocity of the constant-speed arc; |velocity| = dist(p0,p1) for all t.
Ambient geodesic_velocity(const Ambient& p0, const Ambient& p1, double t);
double geodesic_distance(const Ambient& p0, const Ambient& p1);

inline Ambient ambient3(double a, double b, double c) {
  Ambient v(3);
  v << a, b, c;
  return v;
}

}  // namespace bubbletree
