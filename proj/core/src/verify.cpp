#include "bubbletree/verify.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bubbletree/quadrature.hpp"

namespace bubbletree {

Complex bubble_harmonic_h(int j, double mu, Complex z) {
  Complex p(1.0);
  const Complex mz = mu * std::conj(z);
  for (int k = 0; k < j; ++k) p *= mz;
  return 2.0 * p / (1.0 + std::norm(p));
}

double bubble_harmonic_H(int j, double t) {
  const double t2j = std::pow(t, 2 * j);
  const double denom = (1.0 + t2j) * (1.0 + t2j) * (1.0 + t2j);
  return 4.0 * j * j * std::pow(t, 2 * j - 2) / denom;
}

IjH ij_h(int j, double mu) {
  if (j < 1 || mu <= 1.0) fail(ErrorCode::ConfigInvalid, "ij_h needs j >= 1, mu > 1");
  IjH out;
  const double smu = std::sqrt(mu);
  out.substituted = 4.0 * j * j * std::pow(mu, -double(j)) *
                    integrate_adaptive(
                        [j](double t) {
                          const double t2j = std::pow(t, 2 * j);
                          const double d = (1.0 + t2j);
                          return std::pow(t, 4 * j - 1) / (d * d * d);
                        },
                        0.0, smu, 1e-13, 1e-300);
  out.radial = mu * mu *
               integrate_adaptive(
                   [j, mu](double r) {
                     return std::pow(r, double(j)) * bubble_harmonic_H(j, mu * r) *
                            std::pow(mu * r, double(j)) * r;
                   },
                   0.0, 1.0 / smu, 1e-13, 1e-300);
  return out;
}

AngularPairing ij_theta(int j, double alpha, const HarmonicMapDescriptor& U0,
                        const HarmonicMapDescriptor& U1) {
  const AmbientJacobian d0 = U0.differential(0.0);
  const AmbientJacobian d1 = U1.differential(0.0);
  if (d1.norm() < 1e-10)
    fail(ErrorCode::DegenerateDifferential, "dU1(0) vanishes in the circle pairing");
  const AmbientJacobian db = d0 - d1;

  const int n = 512;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * M_PI * k / n;
    const Eigen::Vector2d e_plus(std::cos(j * t), std::sin(j * t));
    const Eigen::Vector2d e_minus(std::cos(j * t + alpha), -std::sin(j * t + alpha));
    acc += (db * e_plus).dot(d1 * e_minus);
  }
  return {j, alpha, acc * 2.0 * M_PI / n};
}

TransversalFrame transversal_frame(const HarmonicMapDescriptor& U0,
                                   const HarmonicMapDescriptor& U1) {
  if (U0.ambient_dim() != 4 || U1.ambient_dim() != 4)
    fail(ErrorCode::AssumptionViolated, "transversal frames live in S^3");
  const Ambient p0 = U0.eval(0.0), p1 = U1.eval(0.0);
  if ((p0 - p1).norm() > 1e-9)
    fail(ErrorCode::AssumptionViolated, "maps do not agree at the gluing point");

  AmbientJacobian d1 = U1.differential(0.0);
  AmbientJacobian d0 = U0.differential(0.0);
  const double c1 = d1.norm() / std::sqrt(2.0);
  const double c0 = d0.norm() / std::sqrt(2.0);
  if (c1 < 1e-10 || c0 < 1e-10)
    fail(ErrorCode::DegenerateDifferential, "degenerate differential at the gluing point");

  // Orthonormal frames of the two tangent planes (conformality makes the
  // scaled columns orthonormal already; orthonormalize to be safe).
  Eigen::Matrix<double, 4, 2> t1 = d1 / c1, t0 = d0 / c0;
  t1.col(1) -= t1.col(0).dot(t1.col(1)) * t1.col(0) / t1.col(0).squaredNorm();
  t1.col(0).normalize();
  t1.col(1).normalize();
  Eigen::Matrix<double, 4, 2> q0 = t0;
  q0.col(0).normalize();
  q0.col(1) -= q0.col(0).dot(q0.col(1)) * q0.col(0);
  q0.col(1).normalize();

  // Principal vectors of the plane intersection.
  const Eigen::Matrix2d overlap = t1.transpose() * q0;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(overlap,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cos_min = svd.singularValues()(1);
  if (cos_min > 1.0 - 1e-9)
    fail(ErrorCode::AssumptionViolated,
         "tangent planes coincide; the configuration is not transversal");
  if (svd.singularValues()(0) < 1.0 - 1e-9)
    fail(ErrorCode::AssumptionViolated,
         "tangent planes do not intersect in a line at the gluing point");

  // Rotate the domain so d/dx1 U1(0) points along the intersection.
  const Eigen::Vector2d u_dir = svd.matrixU().col(0);
  const double psi = std::atan2(u_dir(1), u_dir(0));
  Eigen::Matrix2d rot;
  rot << std::cos(psi), -std::sin(psi), std::sin(psi), std::cos(psi);
  d1 = d1 * rot;
  d0 = d0 * rot;

  // Adapted target frame: f1, f2 from U1, f3 normal to its plane inside T_p S^3.
  Eigen::Vector4d f1 = d1.col(0) / c1;
  Eigen::Vector4d f2 = d1.col(1) / c1;
  Eigen::Vector4d p = p1;
  Eigen::Vector4d f3 = Eigen::Vector4d::Zero();
  {
    // any vector of T_p S^3 orthogonal to f1, f2
    Eigen::Matrix<double, 4, 3> basis;
    basis.col(0) = p;
    basis.col(1) = f1;
    basis.col(2) = f2;
    Eigen::FullPivHouseholderQR<Eigen::Matrix<double, 4, 3>> qr(basis);
    Eigen::Matrix4d qfull = qr.matrixQ();
    f3 = qfull.col(3);
  }

  TransversalFrame out;
  out.c_u0 = c0;
  out.c_u1 = c1;
  for (int col = 0; col < 2; ++col) {
    const Eigen::Vector4d v = d0.col(col) / c0;
    out.A(0, col) = f1.dot(v);
    out.A(1, col) = f2.dot(v);
    out.A(2, col) = f3.dot(v);
  }
  return out;
}

AlphaStar alpha_star_select(const HarmonicMapDescriptor& U0,
                            const HarmonicMapDescriptor& U1, int j_max) {
  const Ambient p0 = U0.eval(0.0), p1 = U1.eval(0.0);
  if ((p0 - p1).norm() > 1e-9)
    fail(ErrorCode::AssumptionViolated, "maps do not agree at the gluing point");
  const AmbientJacobian db = U0.differential(0.0) - U1.differential(0.0);
  if (db.norm() < 1e-9)
    fail(ErrorCode::AssumptionViolated,
         "identical differentials at the gluing point; the maps are not distinct there");

  double alpha = M_PI;
  if (U0.ambient_dim() == 4) {
    bool coincide = false;
    try {
      const TransversalFrame fr = transversal_frame(U0, U1);
      const double d_diag = fr.A(0, 0) - fr.A(1, 1);
      const double d_off = fr.A(0, 1) + fr.A(1, 0);
      if (std::abs(d_diag) > 1e-9) {
        alpha = d_diag > 0.0 ? M_PI : 0.0;
      } else {
        alpha = d_off > 0.0 ? 0.5 * M_PI : 1.5 * M_PI;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AssumptionViolated) throw;
      coincide = true;  // same great sphere; the opposite-orientation case
    }
    if (coincide) alpha = M_PI;
  }

  AlphaStar out;
  out.alpha_star = alpha;
  out.c_star = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= j_max; ++j)
    out.c_star = std::min(out.c_star, -0.5 * ij_theta(j, alpha, U0, U1).value);
  if (!(out.c_star > 0.0))
    fail(ErrorCode::AssumptionViolated,
         "no angle with a positive certified pairing; assumption (i)/(ii) violated");
  return out;
}

int dominant_index(const RationalMap& q0, double mu, double lambda1) {
  const int order = std::max(q0.degree() + 1, 1);
  const TaylorData t = taylor_at_zero(q0, order);
  // The selection ranges over j = 1..n0*, where n0* is the vanishing order
  // of the reference map. The class normalisation keeps |a_{n0*}| in
  // (1/2, 2) while coefficients below the reference order are perturbatively
  // small, so the last coefficient of size > 1/2 recovers n0*.
  int n_ref = t.n_star;
  for (int j = t.n_star; j <= order; ++j)
    if (std::abs(t.coefficient(j)) > 0.5) n_ref = j;
  int best = 0;
  double best_val = 0.0;
  for (int j = 1; j <= n_ref; ++j) {
    const double val = std::abs(t.coefficient(j)) * std::pow(lambda1 / mu, double(j));
    if (val > best_val * (1.0 + 1e-14)) {
      best_val = val;
      best = j;
    }
  }
  if (best == 0) fail(ErrorCode::AllCoefficientsZero, "no nonzero coefficient below n0*");
  return best;
}

ExpansionResidual expansion_residual(const SingularityModel& model,
                                     const VariationDirection& dir,
                                     const Field& z_field) {
  ExpansionResidual out;
  const auto grid = z_field.grid();
  const int n = model.ambient_dim();

  const Field y = direction_field(dir, z_field);
  out.dE_direction = first_variation(z_field, y);

  // int_{Omega_i} j_i d_eps(Delta u_i) with Omega_1 = D_{r_hat}.
  Field du1 = Field::sample(grid, n,
                            [&](Chart, Complex z) { return dir.deriv_u_field(1, z); });
  Field du0 = Field::sample(grid, n,
                            [&](Chart, Complex z) { return dir.deriv_u_field(0, z); });
  FieldDerivatives d_du1(du1), d_du0(du0);
  std::array<std::vector<double>, 2> vals1, vals0;
  for (int c = 0; c < 2; ++c) {
    vals1[c].assign(grid->nodes_per_chart(), 0.0);
    vals0[c].assign(grid->nodes_per_chart(), 0.0);
  }
  const double r_hat = model.radii().r_hat;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid->n_r(); ++i)
      for (int j = 0; j < grid->n_theta(); ++j) {
        const Complex z = grid->plane_point(Chart(c), i, j);
        const size_t idx = size_t(i) * grid->n_theta() + j;
        if (std::abs(z) <= r_hat) {
          vals1[c][idx] =
              model.j_field(1, z).dot(d_du1.laplacian_plane(Chart(c), i, j));
        } else {
          vals0[c][idx] =
              model.j_field(0, z).dot(d_du0.laplacian_plane(Chart(c), i, j));
        }
      }
  out.term_j1 = integrate_plane_values(*grid, vals1, false);
  out.term_j0 = integrate_plane_values(*grid, vals0, false);

  out.term_neck = M_PI * model.radii().c * dir.deriv_delta_squared();
  // E(U_i) = 4 pi deg(R_i) is unchanged by translations, coefficient
  // perturbations and the scale variation.
  out.term_energy = 0.0;

  out.main_terms = out.term_j1 + out.term_j0 + out.term_neck + out.term_energy;
  out.residual = out.dE_direction - out.main_terms;

  const auto& diag = model.diagnostics();
  const double sep = model.scales().mu0 * model.scales().mu1;
  const double log_mu = std::log(sep);
  const double f = model.scales().mu0 / model.radii().r0;
  double beta_norm = model.dbeta0().norm();
  for (int k = 0; k < 16; ++k)
    beta_norm = std::max(
        beta_norm, model.beta(std::polar(1.0, 2.0 * M_PI * k / 16.0)).norm());
  out.error_scale =
      diag.nu_bar * beta_norm * (1.0 / std::sqrt(sep) + dir.eta0) +
      diag.delta / log_mu *
          (diag.delta + 1.0 / (f * f) + dir.eta0 * (1.0 / log_mu + 1.0 / f));
  return out;
}

QuotientReport quotient_q(const SingularityModel& model, const VariationDirection& dir,
                          const Field& z_field, const std::vector<Field>& space) {
  const WeightedNorm norm = WeightedNorm::for_model(model);
  const Field y = direction_field(dir, z_field);
  const double ynorm = weighted_norm(y, norm);
  if (!(ynorm > 0.0)) fail(ErrorCode::NonpositiveDenominator, "variation direction vanishes");

  QuotientReport out;
  out.dE_y = first_variation(z_field, y) / ynorm;
  if (out.dE_y <= 1e-8)
    fail(ErrorCode::NonpositiveDenominator,
         "dE(z)(y) is not positive; the quotient is undefined here");

  const GalerkinAssembly g = assemble_galerkin(z_field, norm, space);
  out.dual_norm = g.dual_sup(g.gradient);
  out.d2E_y_dual = g.dual_sup(g.hessian_row(y)) / ynorm;
  out.Q = out.dual_norm * (out.dual_norm + out.d2E_y_dual) / out.dE_y;
  return out;
}

SpectrumReport jacobi_spectrum(const Field& u, const WeightedNorm& norm,
                               const std::vector<Field>& space, int block_count) {
  if (space.empty()) fail(ErrorCode::EmptyTestSpace, "spectrum needs a test space");
  if (block_count < 0 || block_count > int(space.size()))
    fail(ErrorCode::ConfigInvalid, "invalid near-kernel block size");

  const GalerkinAssembly g = assemble_galerkin(u, norm, space);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gram);
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) fail(ErrorCode::SingularGram, "Gram matrix not positive");
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-10 * lmax) keep.push_back(i);
  if (keep.empty()) fail(ErrorCode::SingularGram, "Gram matrix numerically singular");

  const int r = int(keep.size());
  const int ncols = int(space.size());
  Eigen::MatrixXd white(ncols, r);          // x = white * y
  Eigen::MatrixXd to_white(r, ncols);       // y = to_white * x
  for (int k = 0; k < r; ++k) {
    const double lam = es.eigenvalues()(keep[k]);
    white.col(k) = es.eigenvectors().col(keep[k]) / std::sqrt(lam);
    to_white.row(k) = std::sqrt(lam) * es.eigenvectors().col(keep[k]).transpose();
  }
  const Eigen::MatrixXd h_white = white.transpose() * g.hessian * white;

  SpectrumReport out;
  if (block_count == 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(h_white);
    for (int i = 0; i < eh.eigenvalues().size(); ++i)
      out.complement.push_back(eh.eigenvalues()(i));
  } else {
    const Eigen::MatrixXd yb = to_white.leftCols(block_count);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(yb);
    const Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(r, r);
    const Eigen::MatrixXd qb = qfull.leftCols(block_count);
    const Eigen::MatrixXd qc = qfull.rightCols(r - block_count);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(qb.transpose() * h_white * qb);
    for (int i = 0; i < eb.eigenvalues().size(); ++i)
      out.block.push_back(eb.eigenvalues()(i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(qc.transpose() * h_white * qc);
    for (int i = 0; i < ec.eigenvalues().size(); ++i)
      out.complement.push_back(ec.eigenvalues()(i));
  }
  out.min_abs_complement = std::numeric_limits<double>::infinity();
  for (const double v : out.complement)
    out.min_abs_complement = std::min(out.min_abs_complement, std::abs(v));
  return out;
}

}  // namespace bubbletree
