#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bubbletree/geometry.hpp"

namespace bubbletree {

enum class Chart : int { Inner = 0, Outer = 1 };

// C^4 polynomial step: 0 below 0, 1 above 1, odd-symmetric about 1/2.
double smooth_step(double x);
double smooth_step_d1(double x);
double smooth_step_d2(double x);
// C^infinity step with the same normalisation (exp(-1/x) based); used where
// quadrature accuracy matters more than cheap derivatives.
double smooth_step_cinf(double x);

struct StretchBand {
  double center_s = 0.0;  // band centre in s = log r
  double width = 0.5;     // Gaussian width in s
  double boost = 3.0;     // node density multiplier at the centre
};

enum class RadialSpacing {
  Log,       // uniform in log r, plus optional density bands
  PolarArc,  // uniform in spherical arc length from the chart pole
};

struct GridParams {
  int n_r = 512;
  int n_theta = 128;          // power of two
  double r_min = 1e-6;        // innermost chart radius, both charts
  double r_max = 12.0;        // outermost chart radius, both charts
  double blend_halfwidth = 1.2;
  RadialSpacing spacing = RadialSpacing::Log;
  std::vector<StretchBand> bands;  // inner chart only; Log spacing only
};

// Two-chart polar grid for maps of the plane (and its inversion w = 1/z).
// Radii follow a stretched log spacing: uniform in an auxiliary variable
// sigma with node density rho(s) >= 1 in s = log r. The charts are combined
// with a smooth partition of unity around |z| = 1, so each chart integrates
// an integrand that vanishes at both ends of its radial range.
class RadialGrid {
 public:
  static std::shared_ptr<const RadialGrid> make(const GridParams& params);

  const GridParams& params() const { return params_; }
  int n_r() const { return params_.n_r; }
  int n_theta() const { return params_.n_theta; }

  double radius(Chart c, int i) const { return geom_[int(c)].r[i]; }
  double log_radius(Chart c, int i) const { return geom_[int(c)].s[i]; }
  double density(Chart c, int i) const { return geom_[int(c)].rho[i]; }
  double density_ds(Chart c, int i) const { return geom_[int(c)].drho_ds[i]; }
  double theta(int j) const { return theta_[j]; }
  double cos_theta(int j) const { return cos_theta_[j]; }
  double sin_theta(int j) const { return sin_theta_[j]; }

  // Coordinate of node (i, j) in the chart's own complex variable.
  Complex chart_point(Chart c, int i, int j) const;
  // The corresponding point of the plane (z; outer chart nodes map to 1/w).
  Complex plane_point(Chart c, int i, int j) const;

  // Quadrature weight of row i (already including dtheta), for integrands
  // given in the chart's own conformal gauge (Dirichlet densities, sphere
  // integrands) and for plane integrands, respectively.
  double weight_conformal(Chart c, int i) const { return w_conf_[int(c)][i]; }
  double weight_plane(Chart c, int i) const { return w_plane_[int(c)][i]; }

  double sigma_spacing(Chart c) const { return geom_[int(c)].h_sigma; }
  // Partition-of-unity factor of this chart at radial row i.
  double blend(Chart c, int i) const { return blend_[int(c)][i]; }

  size_t nodes_per_chart() const { return size_t(params_.n_r) * params_.n_theta; }

 private:
  struct ChartGeometry {
    std::vector<double> s, r, rho, drho_ds;
    double h_sigma = 0.0;
  };

  GridParams params_;
  std::array<ChartGeometry, 2> geom_;
  std::vector<double> theta_, cos_theta_, sin_theta_;
  std::array<std::vector<double>, 2> w_conf_, w_plane_, blend_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

class FieldDerivatives;

// Vector-valued samples on both charts of a RadialGrid.
class Field {
 public:
  Field() = default;
  Field(GridPtr grid, int ncomp, std::string metadata = {});

  // Samples fn at every node; fn receives the chart and the plane point.
  static Field sample(GridPtr grid, int ncomp,
                      const std::function<Ambient(Chart, Complex)>& fn,
                      std::string metadata = {});
  static Field sample_scalar(GridPtr grid,
                             const std::function<double(Chart, Complex)>& fn,
                             std::string metadata = {});

  const GridPtr& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }
  const std::string& metadata() const { return metadata_; }
  void set_metadata(std::string m) { metadata_ = std::move(m); }

  double value(Chart c, int i, int j, int comp) const {
    return data_[int(c)][index(i, j, comp)];
  }
  double& value(Chart c, int i, int j, int comp) {
    return data_[int(c)][index(i, j, comp)];
  }
  Ambient node_value(Chart c, int i, int j) const;
  void set_node_value(Chart c, int i, int j, const Ambient& v);

  const std::vector<double>& raw(Chart c) const { return data_[int(c)]; }
  std::vector<double>& raw(Chart c) { return data_[int(c)]; }

  // Value at chart radius s (log scale) and node angle index, by radial
  // barycentric interpolation; used for the chart-overlap consistency check.
  Ambient interp_radial(Chart c, double s, int j) const;

  size_t index(int i, int j, int comp) const {
    return (size_t(i) * grid_->n_theta() + j) * ncomp_ + comp;
  }

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  std::array<std::vector<double>, 2> data_;
  std::string metadata_;
};

// Per-node first and second derivative lattices of one Field, in chart
// coordinates: spectral in theta, 4th order finite differences in sigma.
class FieldDerivatives {
 public:
  explicit FieldDerivatives(const Field& f);

  // Gradient in the chart's own coordinates: row 0 = d/dx, row 1 = d/dy.
  void gradient_chart(Chart c, int i, int j, AmbientJacobian& out) const;
  // Gradient with respect to the plane variable z (outer chart transformed).
  void gradient_plane(Chart c, int i, int j, AmbientJacobian& out) const;
  Ambient laplacian_chart(Chart c, int i, int j) const;
  Ambient laplacian_plane(Chart c, int i, int j) const;

  double grad_squared_chart(Chart c, int i, int j) const;

  const Field& field() const { return *field_; }

 private:
  const Field* field_;
  GridPtr grid_;
  int ncomp_;
  std::array<std::vector<double>, 2> d_sigma_, d_sigma2_, d_theta_, d_theta2_;
};

// Spec-facing convenience wrappers.
GridPtr make_grid(const GridParams& params);
Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, 4> gradient(const FieldDerivatives& d,
                                                           Chart c, int i, int j);
Ambient laplacian(const FieldDerivatives& d, Chart c, int i, int j);

// Integral over R^2 of a scalar plane integrand sampled at the nodes.
// Checks that the far tail of the outer chart decays.
double integrate_plane(const Field& scalar);
// Same without the tail check; values is one scalar per node of `grid`.
double integrate_plane_values(const RadialGrid& grid,
                              const std::array<std::vector<double>, 2>& values,
                              bool check_tail);
// Chart-conformal integral (for densities already expressed per chart).
double integrate_conformal_values(const RadialGrid& grid,
                                  const std::array<std::vector<double>, 2>& values);

double pairwise_sum(const double* data, size_t n);

// Largest relative mismatch of two charts' samples on the overlap band;
// the grid invariant asks this to stay below 1e-9 for analytic sources.
double chart_overlap_mismatch(const Field& f);

}  // namespace bubbletree
