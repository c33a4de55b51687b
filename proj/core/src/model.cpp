#include "bubbletree/model.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/energy.hpp"

namespace bubbletree {

namespace {

Eigen::Matrix2d real_multiplier(Complex q) {
  Eigen::Matrix2d m;
  m << q.real(), -q.imag(), q.imag(), q.real();
  return m;
}

bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::norm(z) < 1e60;
}

}  // namespace

Ambient HarmonicMapDescriptor::eval(Complex z) const {
  Complex arg;
  if (conjugated) {
    arg = std::conj(z) + std::conj(translation);
  } else {
    arg = z + translation;
  }
  const Complex r = evaluate_projective(rational, arg);
  return embedding.embed(stereo_project(r));
}

AmbientJacobian HarmonicMapDescriptor::differential(Complex z) const {
  Complex arg = conjugated ? std::conj(z) + std::conj(translation) : z + translation;
  if (!finite(arg))
    fail(ErrorCode::DegenerateDifferential, "differential requested at infinity");
  const Complex value = evaluate_projective(rational, arg);
  if (!finite(value))
    fail(ErrorCode::DegenerateDifferential, "differential at a pole of the rational data");
  const Complex dq = derivative(rational, arg);
  Eigen::Matrix2d inner = real_multiplier(dq);
  if (conjugated) inner = inner * Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::Matrix<double, 3, 2> dpi = stereo_jacobian(value);
  const int n = embedding.ambient_dim();
  AmbientJacobian out(n, 2);
  for (int col = 0; col < 2; ++col) {
    const Eigen::Vector3d v = dpi * inner.col(col);
    out.col(col) = embedding.push(v);
  }
  return out;
}

double f_of_mu(FChoice choice, double sigma1, double ratio) {
  switch (choice) {
    case FChoice::LogMu: return std::log(ratio);
    case FChoice::MuPower: return std::pow(ratio, sigma1);
  }
  return 0.0;
}

double f_of_mu_derivative(FChoice choice, double sigma1, double ratio) {
  switch (choice) {
    case FChoice::LogMu: return 1.0 / ratio;
    case FChoice::MuPower: return sigma1 * std::pow(ratio, sigma1 - 1.0);
  }
  return 0.0;
}

Radii build_radii(const GluingData& data) {
  const ScalePair scales = mu_values(data.q0, data.q1, data.mu);
  // The invariant scale separation: mu0 mu1 is unchanged both under domain
  // rescalings z -> lambda z and under the role swap, and reduces to mu in
  // the chart normalised by mu0 = 1.
  const double sep = scales.mu0 * scales.mu1;
  if (!(sep > data.thresholds.mu_bar))
    fail(ErrorCode::ScalesTooClose,
         "bubble separation mu0*mu1 = " + std::to_string(sep) +
             " does not exceed mu_bar = " + std::to_string(data.thresholds.mu_bar));

  const double f = f_of_mu(data.f_choice, data.thresholds.sigma1, sep);
  const double df = f_of_mu_derivative(data.f_choice, data.thresholds.sigma1, sep);
  if (sep * std::abs(df) > f * (1.0 + 1e-12))
    fail(ErrorCode::ScalesTooClose, "f_mu grows too fast: mu |df/dmu| > f");
  if (f < 4.0)
    fail(ErrorCode::ScalesTooClose,
         "f_mu = " + std::to_string(f) + " < 4; the outer scale gaps collapse");

  Radii out;
  out.r1 = f / scales.mu1;
  out.r_hat = std::sqrt(scales.mu0 / scales.mu1);
  out.r0 = scales.mu0 / f;
  // Both middle gaps equal sqrt(mu0 mu1)/f; require a modest margin.
  if (std::sqrt(sep) / f < 1.5)
    fail(ErrorCode::ScalesTooClose, "radii ordering r1 << r_hat << r0 fails");
  out.c = 1.0 / std::log(out.r0 / out.r1);
  return out;
}

Cutoff::Cutoff(const Radii& radii, double cap_epsilon)
    : radii_(radii),
      eps_tilde_(std::log1p(cap_epsilon)),
      s1_(std::log(radii.r1)),
      s0_(std::log(radii.r0)) {}

double Cutoff::profile_s(double s) const {
  if (s <= s1_) return 0.0;
  if (s >= s0_) return 1.0;
  const double c = radii_.c;
  if (s < s1_ + eps_tilde_) {
    const double x = (s - s1_) / eps_tilde_;
    return c * smooth_step(x) * (s - s1_);
  }
  if (s > s0_ - eps_tilde_) {
    const double y = (s0_ - s) / eps_tilde_;
    return 1.0 - c * smooth_step(y) * (s0_ - s);
  }
  return c * (s - s1_);
}

double Cutoff::profile_s_d1(double s) const {
  if (s <= s1_ || s >= s0_) return 0.0;
  const double c = radii_.c;
  if (s < s1_ + eps_tilde_) {
    const double x = (s - s1_) / eps_tilde_;
    return c * (smooth_step_d1(x) * x + smooth_step(x));
  }
  if (s > s0_ - eps_tilde_) {
    const double y = (s0_ - s) / eps_tilde_;
    return c * (smooth_step_d1(y) * y + smooth_step(y));
  }
  return c;
}

double Cutoff::profile_s_d2(double s) const {
  if (s <= s1_ || s >= s0_) return 0.0;
  const double c = radii_.c;
  if (s < s1_ + eps_tilde_) {
    const double x = (s - s1_) / eps_tilde_;
    return c * (smooth_step_d2(x) * x + 2.0 * smooth_step_d1(x)) / eps_tilde_;
  }
  if (s > s0_ - eps_tilde_) {
    const double y = (s0_ - s) / eps_tilde_;
    return -c * (smooth_step_d2(y) * y + 2.0 * smooth_step_d1(y)) / eps_tilde_;
  }
  return 0.0;
}

double Cutoff::value(double r) const {
  if (r <= 0.0) return 0.0;
  return profile_s(std::log(r));
}

double Cutoff::d_dr(double r) const {
  if (r <= 0.0) return 0.0;
  return profile_s_d1(std::log(r)) / r;
}

double Cutoff::d2_dr2(double r) const {
  if (r <= 0.0) return 0.0;
  const double s = std::log(r);
  return (profile_s_d2(s) - profile_s_d1(s)) / (r * r);
}

SingularityModel::SingularityModel(const GluingData& data, Radii radii)
    : data_(data),
      q1_mu_(reciprocal_rescale(data.q1, data.mu)),
      radii_(radii),
      cutoff_(radii, data.thresholds.cap_epsilon) {}

ModelPtr SingularityModel::assemble(const GluingData& data, const AssembleOptions& options) {
  if (data.U0.ambient_dim() != data.U1.ambient_dim())
    fail(ErrorCode::ConfigInvalid, "descriptor ambient dimensions differ");
  for (const auto* desc : {&data.U0, &data.U1}) {
    const AmbientJacobian d = desc->differential(0.0);
    if (d.norm() < 1e-8)
      fail(ErrorCode::DegenerateDifferential, "descriptor differential vanishes at 0");
  }

  const Radii radii = build_radii(data);
  auto model = std::shared_ptr<SingularityModel>(new SingularityModel(data, radii));
  model->scales_ = mu_values(data.q0, data.q1, data.mu);

  if (options.check_poles) {
    // The correction fields evaluate q0 on D_{2 r_hat} and q1 on the disk
    // reached by 1/(mu z) for |z| >= r_hat / 2; reject poles there.
    for (const Complex root : denominator_roots(data.q0)) {
      if (std::abs(root) <= 4.0 * radii.r_hat)
        fail(ErrorCode::PoleInDomain, "q0 has a pole inside the gluing region");
    }
    for (const Complex root : denominator_roots(data.q1)) {
      if (std::abs(root) <= 8.0 / (data.mu * radii.r_hat))
        fail(ErrorCode::PoleInDomain, "q1 has a pole inside the bubble gluing region");
    }
  }

  model->U0_origin_ = data.U0.eval(0.0);
  model->U1_origin_ = data.U1.eval(0.0);

  const int n = data.U0.ambient_dim();
  model->dbeta0_.resize(n, 2);
  const double h = 1e-6;
  const Complex steps[2] = {Complex(h, 0.0), Complex(0.0, h)};
  for (int col = 0; col < 2; ++col) {
    const Ambient plus = model->beta(steps[col]);
    const Ambient minus = model->beta(-steps[col]);
    model->dbeta0_.col(col) = (plus - minus) / (2.0 * h);
  }

  auto& diag = model->diag_;
  diag.delta = geodesic_distance(model->U1_origin_, model->U0_origin_);
  const NuValues nu = nu_values(data.q0, data.q1, model->scales_.mu1);
  diag.nu0 = nu.nu0;
  diag.nu1 = nu.nu1;
  diag.nu_bar = nu.nu_bar;

  if (options.check_tubular) {
    const double lo = std::log(radii.r1 / 16.0), hi = std::log(16.0 * radii.r0);
    for (int i = 0; i <= 48; ++i) {
      const double r = std::exp(lo + (hi - lo) * i / 48.0);
      for (int j = 0; j < 16; ++j) {
        const double th = 2.0 * M_PI * j / 16.0;
        const Ambient v = model->pre_projection(Complex(r * std::cos(th), r * std::sin(th)));
        if (v.norm() <= 0.5)
          fail(ErrorCode::TubularNeighborhoodViolated,
               "pre-projection field leaves the tubular neighbourhood");
      }
    }
  }

  if (options.measure_tension) {
    GridParams gp;
    gp.n_r = 256;
    gp.n_theta = 64;
    gp.r_min = 1e-5;
    gp.r_max = 12.0;
    auto grid = RadialGrid::make(gp);
    for (int which = 0; which < 2; ++which) {
      const auto& desc = which == 0 ? data.U0 : data.U1;
      Field f = Field::sample(grid, n, [&](Chart, Complex z) { return desc.eval(z); },
                              "descriptor");
      const double t = tension_sphere_l2(f);
      (which == 0 ? diag.tension0 : diag.tension1) = t;
    }
    diag.tension_max = std::max(diag.tension0, diag.tension1);
    diag.tension_measured = true;
  }
  return model;
}

Complex SingularityModel::q_mu(Complex z) const {
  const Complex a = evaluate_projective(data_.q0, z);
  const Complex b = evaluate_projective(q1_mu_, z);
  if (!finite(a) || !finite(b)) return Complex(INFINITY, 0.0);
  return a + b;
}

Ambient SingularityModel::u_field(int which, Complex z) const {
  const auto& desc = which == 0 ? data_.U0 : data_.U1;
  return desc.eval(q_mu(z));
}

Ambient SingularityModel::gamma(Complex z) const {
  const double phi = cutoff_.value(std::abs(z));
  return geodesic(U1_origin_, U0_origin_, phi);
}

Ambient SingularityModel::gamma_tilde(int which, Complex z) const {
  return gamma(z) - (which == 0 ? U0_origin_ : U1_origin_);
}

Ambient SingularityModel::beta(Complex w) const {
  return data_.U0.eval(w) - data_.U1.eval(w);
}

Ambient SingularityModel::j_field(int which, Complex z) const {
  if (which == 1) {
    const Complex q = evaluate_projective(data_.q0, z);
    return dbeta0_ * Eigen::Vector2d(q.real(), q.imag());
  }
  const Complex q = evaluate_projective(q1_mu_, z);
  return -(dbeta0_ * Eigen::Vector2d(q.real(), q.imag()));
}

Ambient SingularityModel::v_field(int which, Complex z) const {
  return u_field(which, z) + gamma_tilde(which, z) + j_field(which, z);
}

Ambient SingularityModel::pre_projection(Complex z) const {
  const double t = std::abs(z) / radii_.r_hat;
  double blend;
  if (t <= 0.5) {
    blend = 0.0;
  } else if (t >= 2.0) {
    blend = 1.0;
  } else {
    blend = smooth_step(0.5 * (std::log2(t) + 1.0));
  }
  if (blend == 0.0) return v_field(1, z);
  if (blend == 1.0) return v_field(0, z);
  return (1.0 - blend) * v_field(1, z) + blend * v_field(0, z);
}

Ambient SingularityModel::map(Complex z) const {
  return project_to_target(pre_projection(z));
}

GridParams SingularityModel::grid_params(int n_r, int n_theta) const {
  GridParams gp;
  gp.n_r = n_r;
  gp.n_theta = n_theta;
  // Deep enough that the truncated polar caps carry ~(mu1 r_min / mu0)^2
  // of energy, far below the defect scales the experiments resolve.
  gp.r_min = std::max(1e-14, std::min(radii_.r1 / 10.0, 3e-5 * scales_.mu0 / scales_.mu1));
  gp.r_max = std::max(12.0, 1.2 * scales_.mu0);
  gp.bands = {{std::log(radii_.r1), 0.5, 3.0},
              {std::log(radii_.r_hat), 0.5, 3.0},
              {std::log(radii_.r0), 0.5, 3.0}};
  const int min_theta = 4 * (std::max(data_.q0.degree(), data_.q1.degree()) + 1);
  while (gp.n_theta < min_theta) gp.n_theta *= 2;
  return gp;
}

GluingData VariationDirection::data_at(double eps) const {
  GluingData d = base->base_data_copy();
  switch (kind) {
    case Kind::TranslateU0:
      d.U0.translation += eps * a;
      break;
    case Kind::TranslateU1:
      d.U1.translation += eps * a;
      break;
    case Kind::PerturbQ0:
      d.q0 = perturb_coefficient(d.q0, j0, theta_star, eps);
      break;
    case Kind::PerturbQ1:
      d.q1 = perturb_coefficient(d.q1, j0, theta_star, eps);
      break;
    case Kind::ScaleMu:
      d.q1 = scale_variation(d.q1).at(eps);
      break;
  }
  return d;
}

ModelPtr VariationDirection::model_at(double eps) const {
  AssembleOptions light;
  light.measure_tension = false;
  light.check_tubular = false;
  light.check_poles = false;
  return SingularityModel::assemble(data_at(eps), light);
}

void VariationDirection::prepare() {
  const double h = fd_step;
  stencil[0] = model_at(h);
  stencil[1] = model_at(-h);
  stencil[2] = model_at(0.5 * h);
  stencil[3] = model_at(-0.5 * h);
}

const char* VariationDirection::kind_name() const {
  switch (kind) {
    case Kind::TranslateU0: return "translate_U0";
    case Kind::TranslateU1: return "translate_U1";
    case Kind::PerturbQ0: return "perturb_q0";
    case Kind::PerturbQ1: return "perturb_q1";
    case Kind::ScaleMu: return "scale_mu";
  }
  return "unknown";
}

Ambient VariationDirection::deriv_map(Complex z) const {
  const double h = fd_step;
  const Ambient d_h = (stencil[0]->map(z) - stencil[1]->map(z)) / (2.0 * h);
  const Ambient d_h2 = (stencil[2]->map(z) - stencil[3]->map(z)) / h;
  return (4.0 * d_h2 - d_h) / 3.0;
}

double VariationDirection::deriv_delta_squared() const {
  const double h = fd_step;
  auto dsq = [](const ModelPtr& m) {
    const double d = m->diagnostics().delta;
    return d * d;
  };
  const double d_h = (dsq(stencil[0]) - dsq(stencil[1])) / (2.0 * h);
  const double d_h2 = (dsq(stencil[2]) - dsq(stencil[3])) / h;
  return (4.0 * d_h2 - d_h) / 3.0;
}

Ambient VariationDirection::deriv_u_field(int which, Complex z) const {
  const double h = fd_step;
  const Ambient d_h =
      (stencil[0]->u_field(which, z) - stencil[1]->u_field(which, z)) / (2.0 * h);
  const Ambient d_h2 =
      (stencil[2]->u_field(which, z) - stencil[3]->u_field(which, z)) / h;
  return (4.0 * d_h2 - d_h) / 3.0;
}

namespace {

double translation_eta0(const SingularityModel& m, int which, Complex a) {
  const auto& desc = which == 0 ? m.data().U0 : m.data().U1;
  const AmbientJacobian d = desc.differential(0.0);
  return (d * Eigen::Vector2d(a.real(), a.imag())).norm();
}

}  // namespace

VariationDirection make_translation_direction(ModelPtr model, int which, Complex a) {
  VariationDirection dir;
  dir.kind = which == 0 ? VariationDirection::Kind::TranslateU0
                        : VariationDirection::Kind::TranslateU1;
  dir.a = a;
  dir.base = std::move(model);
  dir.eta0 = translation_eta0(*dir.base, which, a);
  dir.eta_rat = 0;
  dir.j_star = 0;
  dir.prepare();
  return dir;
}

VariationDirection make_coefficient_direction(ModelPtr model, int which, int j0,
                                              double theta_star) {
  VariationDirection dir;
  dir.kind = which == 0 ? VariationDirection::Kind::PerturbQ0
                        : VariationDirection::Kind::PerturbQ1;
  dir.j0 = j0;
  dir.theta_star = theta_star;
  dir.base = std::move(model);
  dir.eta0 = 0.0;
  dir.eta_rat = 1;
  dir.j_star = j0;
  dir.prepare();
  return dir;
}

VariationDirection make_scale_direction(ModelPtr model) {
  VariationDirection dir;
  dir.kind = VariationDirection::Kind::ScaleMu;
  dir.base = std::move(model);
  dir.eta0 = 0.0;
  dir.eta_rat = 1;
  const TaylorData t1 = taylor_at_zero(dir.base->data().q1, dir.base->data().q1.degree() + 1);
  dir.j_star = t1.n_star;
  dir.prepare();
  return dir;
}

VariationDirection make_delta_direction(ModelPtr model, int which) {
  const auto& m = *model;
  const Ambient p_from = which == 1 ? m.U1_at_origin() : m.U0_at_origin();
  const Ambient p_to = which == 1 ? m.U0_at_origin() : m.U1_at_origin();
  const auto& desc = which == 0 ? m.data().U0 : m.data().U1;
  const AmbientJacobian jac = desc.differential(0.0);

  Complex a;
  const double delta = m.diagnostics().delta;
  if (delta < 1e-12) {
    // Degenerate geodesic: normalise a coordinate direction instead.
    const double n1 = jac.col(0).norm();
    a = Complex(1.0 / std::max(n1, 1e-12), 0.0);
  } else {
    const Ambient tangent = geodesic_velocity(p_from, p_to, 0.0) / delta;
    const Eigen::Vector2d g = jac.transpose() * tangent;
    if (g.norm() < 1e-10)
      fail(ErrorCode::DegenerateDifferential,
           "geodesic direction orthogonal to the varied sphere; vary the other map");
    // d(delta)/d eps = -<tangent, jac a>; pick a with d(delta^2)/d eps = delta.
    const Eigen::Vector2d av = -0.5 * g / g.squaredNorm();
    a = Complex(av(0), av(1));
  }
  return make_translation_direction(std::move(model), which, a);
}

std::vector<VariationDirection> SingularityModel::tangent_basis() const {
  auto self = shared_from_this();
  std::vector<VariationDirection> basis;
  basis.push_back(make_translation_direction(self, 0, Complex(1.0, 0.0)));
  basis.push_back(make_translation_direction(self, 0, Complex(0.0, 1.0)));
  basis.push_back(make_translation_direction(self, 1, Complex(1.0, 0.0)));
  basis.push_back(make_translation_direction(self, 1, Complex(0.0, 1.0)));
  const TaylorData t0 = taylor_at_zero(data_.q0, data_.q0.degree() + 1);
  const TaylorData t1 = taylor_at_zero(data_.q1, data_.q1.degree() + 1);
  basis.push_back(make_coefficient_direction(self, 0, t0.n_star, 0.0));
  basis.push_back(make_coefficient_direction(self, 1, t1.n_star, 0.0));
  basis.push_back(make_scale_direction(self));
  return basis;
}

}  // namespace bubbletree
