#include "bubbletree/grid.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/fft.hpp"

namespace bubbletree {

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  const double x4 = x2 * x2;
  return x4 * x * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))));
}

double smooth_step_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double u = x * (1.0 - x);
  const double u2 = u * u;
  return 630.0 * u2 * u2;
}

double smooth_step_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double u = x * (1.0 - x);
  return 2520.0 * u * u * u * (1.0 - 2.0 * x);
}

double smooth_step_cinf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Node density in s = log r: 1 plus Gaussian bumps. The Gaussian profile is
// smooth everywhere, so the map from the uniform stencil variable sigma back
// to s stays smooth and the high-order stencils keep their accuracy.
struct DensityProfile {
  const std::vector<StretchBand>* bands;
  double s_min;
  RadialSpacing spacing = RadialSpacing::Log;

  double rho(double s) const {
    if (spacing == RadialSpacing::PolarArc) return 1.0 / std::cosh(s);
    double d = 1.0;
    for (const auto& b : *bands) {
      const double u = (s - b.center_s) / b.width;
      d += (b.boost - 1.0) * std::exp(-0.5 * u * u);
    }
    return d;
  }

  double rho_ds(double s) const {
    if (spacing == RadialSpacing::PolarArc)
      return -std::tanh(s) / std::cosh(s);
    double d = 0.0;
    for (const auto& b : *bands) {
      const double u = (s - b.center_s) / b.width;
      d -= (b.boost - 1.0) * u / b.width * std::exp(-0.5 * u * u);
    }
    return d;
  }

  static double bump_mass(double u) {
    return std::sqrt(0.5 * M_PI) * (1.0 + std::erf(u / std::sqrt(2.0)));
  }

  static double gudermannian(double s) { return 2.0 * std::atan(std::tanh(0.5 * s)); }

  double sigma(double s) const {
    if (spacing == RadialSpacing::PolarArc) return gudermannian(s) - gudermannian(s_min);
    double v = s - s_min;
    for (const auto& b : *bands) {
      v += (b.boost - 1.0) * b.width *
           (bump_mass((s - b.center_s) / b.width) - bump_mass((s_min - b.center_s) / b.width));
    }
    return v;
  }

  bool has_closed_inverse() const { return spacing == RadialSpacing::PolarArc; }

  double invert(double target) const {
    // s with sigma(s) = target; closed form for the arc-length map
    const double y = gudermannian(s_min) + target;
    return std::log(std::tan(0.5 * y + 0.25 * M_PI));
  }
};

}  // namespace

GridPtr RadialGrid::make(const GridParams& params) {
  if (params.n_r < 64)
    fail(ErrorCode::InvalidResolution, "need n_r >= 64");
  if (params.n_theta < 32 || !power_of_two(params.n_theta))
    fail(ErrorCode::InvalidResolution, "need n_theta >= 32 and a power of two");
  if (!(params.r_min > 0.0) || !(params.r_min < 1.0))
    fail(ErrorCode::InvalidResolution, "need 0 < r_min < 1");
  if (params.r_max < 10.0)
    fail(ErrorCode::InvalidResolution, "need r_max >= 10 per chart");

  auto grid = std::make_shared<RadialGrid>();
  grid->params_ = params;

  const double s_min = std::log(params.r_min);
  const double s_max = std::log(params.r_max);
  const std::vector<StretchBand> no_bands;

  for (int c = 0; c < 2; ++c) {
    DensityProfile prof{c == 0 ? &params.bands : &no_bands, s_min, params.spacing};
    const double total = prof.sigma(s_max);
    const double h = total / (params.n_r - 1);
    auto& geom = grid->geom_[c];
    geom.h_sigma = h;
    geom.s.resize(params.n_r);
    geom.r.resize(params.n_r);
    geom.rho.resize(params.n_r);
    geom.drho_ds.resize(params.n_r);
    double s = s_min;
    for (int i = 0; i < params.n_r; ++i) {
      const double target = i * h;
      if (prof.has_closed_inverse()) {
        s = prof.invert(target);
      } else {
        for (int it = 0; it < 60; ++it) {
          const double err = prof.sigma(s) - target;
          if (std::abs(err) < 1e-14 * std::max(1.0, total)) break;
          s -= err / prof.rho(s);
          s = std::clamp(s, s_min, s_max);
        }
      }
      if (i == 0) s = s_min;
      if (i == params.n_r - 1) s = s_max;
      geom.s[i] = s;
      geom.r[i] = std::exp(s);
      geom.rho[i] = prof.rho(s);
      geom.drho_ds[i] = prof.rho_ds(s);
    }
  }

  const int nt = params.n_theta;
  grid->theta_.resize(nt);
  grid->cos_theta_.resize(nt);
  grid->sin_theta_.resize(nt);
  for (int j = 0; j < nt; ++j) {
    grid->theta_[j] = 2.0 * M_PI * j / nt;
    grid->cos_theta_[j] = std::cos(grid->theta_[j]);
    grid->sin_theta_[j] = std::sin(grid->theta_[j]);
  }

  const double a = params.blend_halfwidth;
  const double dtheta = 2.0 * M_PI / nt;
  for (int c = 0; c < 2; ++c) {
    auto& geom = grid->geom_[c];
    auto& w_conf = grid->w_conf_[c];
    auto& w_plane = grid->w_plane_[c];
    auto& blend = grid->blend_[c];
    w_conf.resize(params.n_r);
    w_plane.resize(params.n_r);
    blend.resize(params.n_r);
    for (int i = 0; i < params.n_r; ++i) {
      const double s = geom.s[i];
      const double chi = (c == 0) ? 1.0 - smooth_step_cinf((s + a) / (2.0 * a))
                                  : smooth_step_cinf((-s + a) / (2.0 * a));
      blend[i] = chi;
      // On log grids the outermost four rows on each side are stencil-only
      // ghost rows: the reduced-order derivative closures live there, and
      // the excluded mass is exponentially small in the radius. Arc-spaced
      // grids carry real polar-cap area in those rows, so they keep their
      // weights there.
      const int ghost = params.spacing == RadialSpacing::Log ? 4 : 0;
      if (i < ghost || i >= params.n_r - ghost) {
        w_conf[i] = 0.0;
        w_plane[i] = 0.0;
        continue;
      }
      const double endf = (i == ghost || i == params.n_r - 1 - ghost) ? 0.5 : 1.0;
      const double base = chi * geom.h_sigma / geom.rho[i] * dtheta * endf;
      const double r2 = geom.r[i] * geom.r[i];
      w_conf[i] = base * r2;
      w_plane[i] = (c == 0) ? base * r2 : base / r2;
    }
  }
  return grid;
}

Complex RadialGrid::chart_point(Chart c, int i, int j) const {
  const double r = geom_[int(c)].r[i];
  return {r * cos_theta_[j], r * sin_theta_[j]};
}

Complex RadialGrid::plane_point(Chart c, int i, int j) const {
  if (c == Chart::Inner) return chart_point(c, i, j);
  const double inv_r = 1.0 / geom_[1].r[i];
  return {inv_r * cos_theta_[j], -inv_r * sin_theta_[j]};
}

GridPtr make_grid(const GridParams& params) { return RadialGrid::make(params); }

Field::Field(GridPtr grid, int ncomp, std::string metadata)
    : grid_(std::move(grid)), ncomp_(ncomp), metadata_(std::move(metadata)) {
  const size_t n = grid_->nodes_per_chart() * ncomp_;
  data_[0].assign(n, 0.0);
  data_[1].assign(n, 0.0);
}

Field Field::sample(GridPtr grid, int ncomp,
                    const std::function<Ambient(Chart, Complex)>& fn,
                    std::string metadata) {
  Field f(grid, ncomp, std::move(metadata));
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < grid->n_r(); ++i) {
      for (int j = 0; j < grid->n_theta(); ++j) {
        const Ambient v = fn(Chart(c), grid->plane_point(Chart(c), i, j));
        for (int k = 0; k < ncomp; ++k) f.data_[c][f.index(i, j, k)] = v(k);
      }
    }
  }
  return f;
}

Field Field::sample_scalar(GridPtr grid, const std::function<double(Chart, Complex)>& fn,
                           std::string metadata) {
  Field f(grid, 1, std::move(metadata));
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid->n_r(); ++i)
      for (int j = 0; j < grid->n_theta(); ++j)
        f.data_[c][f.index(i, j, 0)] = fn(Chart(c), grid->plane_point(Chart(c), i, j));
  return f;
}

Ambient Field::node_value(Chart c, int i, int j) const {
  Ambient v(ncomp_);
  for (int k = 0; k < ncomp_; ++k) v(k) = data_[int(c)][index(i, j, k)];
  return v;
}

void Field::set_node_value(Chart c, int i, int j, const Ambient& v) {
  for (int k = 0; k < ncomp_; ++k) data_[int(c)][index(i, j, k)] = v(k);
}

Ambient Field::interp_radial(Chart c, double s, int j) const {
  const auto& grid = *grid_;
  const int n = grid.n_r();
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (grid.log_radius(c, mid) <= s) lo = mid; else hi = mid;
  }
  constexpr int kStencil = 8;
  int start = std::clamp(lo - kStencil / 2 + 1, 0, n - kStencil);

  double w[kStencil];
  double sum = 0.0;
  for (int m = 0; m < kStencil; ++m) {
    double prod = 1.0;
    const double sm = grid.log_radius(c, start + m);
    for (int l = 0; l < kStencil; ++l) {
      if (l == m) continue;
      prod *= (sm - grid.log_radius(c, start + l));
    }
    w[m] = 1.0 / prod;
    const double d = s - sm;
    if (std::abs(d) < 1e-15) {
      return node_value(c, start + m, j);
    }
    w[m] /= d;
    sum += w[m];
  }
  Ambient out(ncomp_);
  out.setZero();
  for (int m = 0; m < kStencil; ++m) out += (w[m] / sum) * node_value(c, start + m, j);
  return out;
}

namespace {

// Radial derivative stencils on the uniform sigma grid: 8th order in the
// interior, 4th-order central two rows from each edge and 4th-order
// one-sided closures at the outermost rows (where the integrands vanish).
void d1_column(const double* f, int n, size_t stride, double h, double* out) {
  const double inv4 = 1.0 / (12.0 * h);
  const double inv8 = 1.0 / (840.0 * h);
  auto at = [&](int i) { return f[size_t(i) * stride]; };
  out[0] = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) * inv4;
  out[1] = (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) * inv4;
  for (int i : {2, 3, n - 4, n - 3})
    out[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * inv4;
  for (int i = 4; i < n - 4; ++i)
    out[i] = (3.0 * (at(i - 4) - at(i + 4)) - 32.0 * (at(i - 3) - at(i + 3)) +
              168.0 * (at(i - 2) - at(i + 2)) - 672.0 * (at(i - 1) - at(i + 1))) * inv8;
  out[n - 2] = (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) -
                at(n - 5)) * inv4;
  out[n - 1] = (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) +
                3.0 * at(n - 5)) * inv4;
}

void d2_column(const double* f, int n, size_t stride, double h, double* out) {
  const double inv4 = 1.0 / (12.0 * h * h);
  const double inv8 = 1.0 / (5040.0 * h * h);
  auto at = [&](int i) { return f[size_t(i) * stride]; };
  out[0] = (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) -
            10.0 * at(5)) * inv4;
  out[1] = (10.0 * at(0) - 15.0 * at(1) - 4.0 * at(2) + 14.0 * at(3) - 6.0 * at(4) + at(5)) * inv4;
  for (int i : {2, 3, n - 4, n - 3})
    out[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) * inv4;
  for (int i = 4; i < n - 4; ++i)
    out[i] = (-9.0 * (at(i - 4) + at(i + 4)) + 128.0 * (at(i - 3) + at(i + 3)) -
              1008.0 * (at(i - 2) + at(i + 2)) + 8064.0 * (at(i - 1) + at(i + 1)) -
              14350.0 * at(i)) * inv8;
  out[n - 2] = (10.0 * at(n - 1) - 15.0 * at(n - 2) - 4.0 * at(n - 3) + 14.0 * at(n - 4) -
                6.0 * at(n - 5) + at(n - 6)) * inv4;
  out[n - 1] = (45.0 * at(n - 1) - 154.0 * at(n - 2) + 214.0 * at(n - 3) - 156.0 * at(n - 4) +
                61.0 * at(n - 5) - 10.0 * at(n - 6)) * inv4;
}

}  // namespace

FieldDerivatives::FieldDerivatives(const Field& f)
    : field_(&f), grid_(f.grid()), ncomp_(f.ncomp()) {
  const int nr = grid_->n_r();
  const int nt = grid_->n_theta();
  for (int c = 0; c < 2; ++c) {
    const auto& data = f.raw(Chart(c));
    const double h = grid_->sigma_spacing(Chart(c));
    auto& ds = d_sigma_[c];
    auto& ds2 = d_sigma2_[c];
    auto& dt = d_theta_[c];
    auto& dt2 = d_theta2_[c];
    ds.resize(data.size());
    ds2.resize(data.size());
    dt.resize(data.size());
    dt2.resize(data.size());

    const size_t stride = size_t(nt) * ncomp_;
    std::vector<double> col1(nr), col2(nr);
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k < ncomp_; ++k) {
        const size_t off = size_t(j) * ncomp_ + k;
        d1_column(data.data() + off, nr, stride, h, col1.data());
        d2_column(data.data() + off, nr, stride, h, col2.data());
        for (int i = 0; i < nr; ++i) {
          ds[size_t(i) * stride + off] = col1[i];
          ds2[size_t(i) * stride + off] = col2[i];
        }
      }
    }

    std::vector<std::complex<double>> buf(nt);
    for (int i = 0; i < nr; ++i) {
      for (int k = 0; k < ncomp_; ++k) {
        for (int j = 0; j < nt; ++j) buf[j] = data[f.index(i, j, k)];
        fft(buf, false);
        std::vector<std::complex<double>> b1(nt), b2(nt);
        for (int j = 0; j < nt; ++j) {
          int m = (j <= nt / 2) ? j : j - nt;
          const double m1 = (j == nt / 2) ? 0.0 : double(m);
          b1[j] = buf[j] * std::complex<double>(0.0, m1);
          b2[j] = buf[j] * (-double(m) * double(m));
        }
        fft(b1, true);
        fft(b2, true);
        for (int j = 0; j < nt; ++j) {
          dt[f.index(i, j, k)] = b1[j].real();
          dt2[f.index(i, j, k)] = b2[j].real();
        }
      }
    }
  }
}

void FieldDerivatives::gradient_chart(Chart c, int i, int j, AmbientJacobian& out) const {
  const int ci = int(c);
  const double rho = grid_->density(c, i);
  const double inv_r = 1.0 / grid_->radius(c, i);
  const double ct = grid_->cos_theta(j), st = grid_->sin_theta(j);
  out.resize(ncomp_, 2);
  for (int k = 0; k < ncomp_; ++k) {
    const size_t idx = field_->index(i, j, k);
    const double fs = rho * d_sigma_[ci][idx];
    const double ft = d_theta_[ci][idx];
    out(k, 0) = (ct * fs - st * ft) * inv_r;
    out(k, 1) = (st * fs + ct * ft) * inv_r;
  }
}

void FieldDerivatives::gradient_plane(Chart c, int i, int j, AmbientJacobian& out) const {
  gradient_chart(c, i, j, out);
  if (c == Chart::Inner) return;
  const Complex w = grid_->chart_point(c, i, j);
  const Complex w2 = w * w;
  const double c1 = w2.real(), c2 = w2.imag();
  for (int k = 0; k < ncomp_; ++k) {
    const double a = out(k, 0), b = out(k, 1);
    out(k, 0) = -(c1 * a + c2 * b);
    out(k, 1) = c2 * a - c1 * b;
  }
}

Ambient FieldDerivatives::laplacian_chart(Chart c, int i, int j) const {
  const int ci = int(c);
  const double rho = grid_->density(c, i);
  const double rho_s = grid_->density_ds(c, i);
  const double inv_r2 = 1.0 / (grid_->radius(c, i) * grid_->radius(c, i));
  Ambient out(ncomp_);
  for (int k = 0; k < ncomp_; ++k) {
    const size_t idx = field_->index(i, j, k);
    const double fss = rho_s * d_sigma_[ci][idx] + rho * rho * d_sigma2_[ci][idx];
    out(k) = (fss + d_theta2_[ci][idx]) * inv_r2;
  }
  return out;
}

Ambient FieldDerivatives::laplacian_plane(Chart c, int i, int j) const {
  Ambient out = laplacian_chart(c, i, j);
  if (c == Chart::Outer) {
    const double r = grid_->radius(c, i);
    out *= r * r * r * r;
  }
  return out;
}

double FieldDerivatives::grad_squared_chart(Chart c, int i, int j) const {
  const int ci = int(c);
  const double rho = grid_->density(c, i);
  const double inv_r2 = 1.0 / (grid_->radius(c, i) * grid_->radius(c, i));
  double acc = 0.0;
  for (int k = 0; k < ncomp_; ++k) {
    const size_t idx = field_->index(i, j, k);
    const double fs = rho * d_sigma_[ci][idx];
    const double ft = d_theta_[ci][idx];
    acc += fs * fs + ft * ft;
  }
  return acc * inv_r2;
}

Eigen::Matrix<double, 2, Eigen::Dynamic, 0, 2, 4> gradient(const FieldDerivatives& d,
                                                           Chart c, int i, int j) {
  AmbientJacobian jac;
  d.gradient_plane(c, i, j, jac);
  return jac.transpose();
}

Ambient laplacian(const FieldDerivatives& d, Chart c, int i, int j) {
  return d.laplacian_plane(c, i, j);
}

double pairwise_sum(const double* data, size_t n) {
  if (n <= 8) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

namespace {

double weighted_total(const RadialGrid& grid,
                      const std::array<std::vector<double>, 2>& values,
                      bool plane_measure) {
  const int nr = grid.n_r();
  const int nt = grid.n_theta();
  std::vector<double> terms;
  terms.reserve(size_t(2) * nr * nt);
  for (int c = 0; c < 2; ++c) {
    const auto& vals = values[c];
    for (int i = 0; i < nr; ++i) {
      const double w = plane_measure ? grid.weight_plane(Chart(c), i)
                                     : grid.weight_conformal(Chart(c), i);
      if (w == 0.0) continue;
      for (int j = 0; j < nt; ++j) terms.push_back(w * vals[size_t(i) * nt + j]);
    }
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace

double integrate_plane_values(const RadialGrid& grid,
                              const std::array<std::vector<double>, 2>& values,
                              bool check_tail) {
  if (check_tail) {
    const int nt = grid.n_theta();
    double mass[4];
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int j = 0; j < nt; ++j)
        acc += std::abs(values[1][size_t(i + 5) * nt + j]);
      mass[i] = acc * grid.weight_plane(Chart::Outer, i + 5);
    }
    double scale = std::abs(weighted_total(grid, values, true)) + 1e-300;
    if (mass[0] > 1.25 * mass[3] + 1e-14 * scale && mass[0] > 1e-10 * scale)
      fail(ErrorCode::NonIntegrableTail,
           "outer-chart integrand does not decay; plane integral diverges");
  }
  return weighted_total(grid, values, true);
}

double integrate_plane(const Field& scalar) {
  if (scalar.ncomp() != 1)
    fail(ErrorCode::ConfigInvalid, "integrate_plane expects a scalar field");
  const std::array<std::vector<double>, 2> values = {scalar.raw(Chart::Inner),
                                                     scalar.raw(Chart::Outer)};
  return integrate_plane_values(*scalar.grid(), values, true);
}

double integrate_conformal_values(const RadialGrid& grid,
                                  const std::array<std::vector<double>, 2>& values) {
  return weighted_total(grid, values, false);
}

double chart_overlap_mismatch(const Field& f) {
  const auto& grid = *f.grid();
  const int nt = grid.n_theta();
  double worst = 0.0;
  for (int i = 0; i < grid.n_r(); ++i) {
    const double s = grid.log_radius(Chart::Inner, i);
    if (std::abs(s) > 0.4) continue;
    for (int j = 0; j < nt; j += 3) {
      const Ambient a = f.node_value(Chart::Inner, i, j);
      const int jw = (nt - j) % nt;
      const Ambient b = f.interp_radial(Chart::Outer, -s, jw);
      const double denom = std::max(1.0, a.norm());
      worst = std::max(worst, (a - b).norm() / denom);
    }
  }
  return worst;
}

}  // namespace bubbletree
