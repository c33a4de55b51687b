#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "bubbletree/energy.hpp"
#include "bubbletree/geometry.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/model.hpp"
#include "bubbletree/rational.hpp"

namespace bt = bubbletree;

namespace testutil {

// Independent reference quadrature (adaptive Simpson; the library itself uses
// Gauss-Kronrod, so this stays an independent oracle).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int depth, double fa, double fm, double fb, double tol) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double fine = (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
  if (depth > 40 || std::abs(fine - coarse) < 15.0 * tol)
    return fine + (fine - coarse) / 15.0;
  return simpson(f, a, m, depth + 1, fa, flm, fm, 0.5 * tol) +
         simpson(f, m, b, depth + 1, fm, frm, fb, 0.5 * tol);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12) {
  return simpson(f, a, b, 0, f(a), f(0.5 * (a + b)), f(b), tol);
}

inline bt::HarmonicMapDescriptor pi_descriptor(int ambient_dim = 3) {
  bt::HarmonicMapDescriptor d;
  d.rational = bt::RationalMap::identity();
  d.embedding = bt::GreatSphereEmbedding::identity(ambient_dim);
  return d;
}

inline bt::RationalMap monomial_map(int degree, double coeff = 1.0) {
  return bt::RationalMap::from_polynomial(bt::Polynomial::monomial(coeff, degree));
}

// Base and bubble parametrise the same sphere with the same orientation;
// delta is realised by translating U1.
inline bt::GluingData same_orientation_data(double mu, double delta = 0.0,
                                            int deg_q0 = 1, int deg_q1 = 1) {
  bt::GluingData d;
  d.U0 = pi_descriptor();
  d.U1 = pi_descriptor();
  if (delta != 0.0) d.U1.translation = std::tan(0.5 * delta);
  d.q0 = monomial_map(deg_q0);
  d.q1 = monomial_map(deg_q1);
  d.mu = mu;
  return d;
}

inline bt::GluingData opposite_orientation_data(double mu, int deg_q0 = 1,
                                                int deg_q1 = 1) {
  bt::GluingData d = same_orientation_data(mu, 0.0, deg_q0, deg_q1);
  d.U1.conjugated = true;
  return d;
}

// Transversally intersecting great spheres in S^3: U1 is the standard
// inclusion, U0 is tilted by `angle` in the (e2, e4) plane.
inline bt::GluingData transversal_data(double mu, double angle, int deg_q0 = 1,
                                       int deg_q1 = 1) {
  bt::GluingData d;
  d.U1 = pi_descriptor(4);
  d.U0 = pi_descriptor(4);
  d.U0.embedding = bt::GreatSphereEmbedding::plane_rotation(1, 3, angle);
  d.q0 = monomial_map(deg_q0);
  d.q1 = monomial_map(deg_q1);
  d.mu = mu;
  return d;
}

inline bt::GridParams small_grid_params(int n_r = 96, int n_theta = 32,
                                        double r_min = 1e-4) {
  bt::GridParams gp;
  gp.n_r = n_r;
  gp.n_theta = n_theta;
  gp.r_min = r_min;
  gp.r_max = 12.0;
  return gp;
}

// A smooth compactly-concentrated tangent field along u: bump in log radius
// times a low Fourier mode, projected to the tangent space.
inline bt::Field tangent_bump(const bt::Field& u, double center_s, double width,
                              int mode, int axis) {
  auto grid = u.grid();
  const int n = u.ncomp();
  bt::Field w(grid, n, "tangent bump");
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid->n_r(); ++i)
      for (int j = 0; j < grid->n_theta(); ++j) {
        const bt::Complex z = grid->plane_point(bt::Chart(c), i, j);
        const double s = std::log(std::abs(z));
        const double x = (s - center_s) / width;
        double b = 0.0;
        if (std::abs(x) < 1.0) {
          const double cc = std::cos(0.5 * M_PI * x);
          b = cc * cc * std::cos(mode * std::arg(z));
        }
        bt::Ambient e(n);
        e.setZero();
        e(axis) = 1.0;
        const bt::Ambient base = u.node_value(bt::Chart(c), i, j);
        w.set_node_value(bt::Chart(c), i, j, b * bt::tangent_project(base, e));
      }
  return w;
}

inline std::mt19937_64 rng(uint64_t seed = 20260809ull) { return std::mt19937_64(seed); }

inline bt::Ambient random_unit(std::mt19937_64& gen, int n = 3) {
  std::normal_distribution<double> g;
  bt::Ambient v(n);
  for (int i = 0; i < n; ++i) v(i) = g(gen);
  return v / v.norm();
}

// Least-squares slope of log|err| against log(eps).
inline double fd_order(const std::vector<double>& eps, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = int(eps.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(std::max(err[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testutil
