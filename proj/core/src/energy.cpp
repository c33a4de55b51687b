#include "bubbletree/energy.hpp"

#include <cmath>

namespace bubbletree {

namespace {

constexpr double kTangencyTol = 1e-8;

void check_tangent(const Field& u, const Field& w, const char* who) {
  const auto& grid = *u.grid();
  double worst = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        const double dot = u.node_value(Chart(c), i, j).dot(w.node_value(Chart(c), i, j));
        worst = std::max(worst, std::abs(dot));
      }
  if (worst > kTangencyTol)
    fail(ErrorCode::NonTangentVariation,
         std::string(who) + ": variation not tangent along the map, max |<u,w>| = " +
             std::to_string(worst));
}

std::array<std::vector<double>, 2> node_values(const RadialGrid& grid) {
  const size_t n = grid.nodes_per_chart();
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

}  // namespace

double dirichlet_energy(const FieldDerivatives& du) {
  const auto& grid = *du.field().grid();
  auto vals = node_values(grid);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j)
        vals[c][size_t(i) * grid.n_theta() + j] = du.grad_squared_chart(Chart(c), i, j);
  return 0.5 * integrate_conformal_values(grid, vals);
}

double dirichlet_energy(const Field& u) {
  FieldDerivatives du(u);
  return dirichlet_energy(du);
}

Ambient tension_euclidean(const FieldDerivatives& du, Chart c, int i, int j) {
  const Ambient lap = du.laplacian_chart(c, i, j);
  const double g2 = du.grad_squared_chart(c, i, j);
  return lap + g2 * du.field().node_value(c, i, j);
}

double tension_sphere_l2(const Field& u) {
  FieldDerivatives du(u);
  const auto& grid = *u.grid();
  auto vals = node_values(grid);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i) {
      const double r = grid.radius(Chart(c), i);
      const double conf = 0.25 * (1.0 + r * r) * (1.0 + r * r);
      for (int j = 0; j < grid.n_theta(); ++j) {
        const Ambient tau = tension_euclidean(du, Chart(c), i, j);
        vals[c][size_t(i) * grid.n_theta() + j] = conf * tau.squaredNorm();
      }
    }
  return std::sqrt(std::max(0.0, integrate_conformal_values(grid, vals)));
}

namespace {

double weighted_inner_impl(const Field& a, const Field& b, const WeightedNorm& norm) {
  const auto& grid = *a.grid();
  FieldDerivatives da(a), db(b);
  auto grad_part = node_values(grid);
  auto val_part = node_values(grid);
  AmbientJacobian ja, jb;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        da.gradient_chart(Chart(c), i, j, ja);
        db.gradient_chart(Chart(c), i, j, jb);
        grad_part[c][size_t(i) * grid.n_theta() + j] = (ja.array() * jb.array()).sum();
        const Complex z = grid.plane_point(Chart(c), i, j);
        val_part[c][size_t(i) * grid.n_theta() + j] =
            norm.rho_squared(z) *
            a.node_value(Chart(c), i, j).dot(b.node_value(Chart(c), i, j));
      }
  return integrate_conformal_values(grid, grad_part) +
         integrate_plane_values(grid, val_part, false);
}

}  // namespace

double weighted_inner(const Field& a, const Field& b, const WeightedNorm& norm) {
  return weighted_inner_impl(a, b, norm);
}

double weighted_norm(const Field& w, const WeightedNorm& norm) {
  return std::sqrt(std::max(0.0, weighted_inner_impl(w, w, norm)));
}

double first_variation(const Field& u, const Field& w) {
  check_tangent(u, w, "first_variation");
  const auto& grid = *u.grid();
  FieldDerivatives du(u), dw(w);
  auto vals = node_values(grid);
  AmbientJacobian ju, jw;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        du.gradient_chart(Chart(c), i, j, ju);
        dw.gradient_chart(Chart(c), i, j, jw);
        const double g2 = ju.squaredNorm();
        vals[c][size_t(i) * grid.n_theta() + j] =
            (ju.array() * jw.array()).sum() -
            g2 * u.node_value(Chart(c), i, j).dot(w.node_value(Chart(c), i, j));
      }
  return integrate_conformal_values(grid, vals);
}

double second_variation(const Field& u, const Field& v, const Field& w) {
  check_tangent(u, v, "second_variation");
  check_tangent(u, w, "second_variation");
  const auto& grid = *u.grid();
  FieldDerivatives du(u), dv(v), dw(w);
  auto vals = node_values(grid);
  AmbientJacobian jv, jw;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        dv.gradient_chart(Chart(c), i, j, jv);
        dw.gradient_chart(Chart(c), i, j, jw);
        const double g2 = du.grad_squared_chart(Chart(c), i, j);
        vals[c][size_t(i) * grid.n_theta() + j] =
            (jv.array() * jw.array()).sum() -
            g2 * v.node_value(Chart(c), i, j).dot(w.node_value(Chart(c), i, j));
      }
  return integrate_conformal_values(grid, vals);
}

double l2_sphere_inner(const Field& a, const Field& b) {
  const auto& grid = *a.grid();
  auto vals = node_values(grid);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i) {
      const double r = grid.radius(Chart(c), i);
      const double conf = 4.0 / ((1.0 + r * r) * (1.0 + r * r));
      for (int j = 0; j < grid.n_theta(); ++j)
        vals[c][size_t(i) * grid.n_theta() + j] =
            conf * a.node_value(Chart(c), i, j).dot(b.node_value(Chart(c), i, j));
    }
  return integrate_conformal_values(grid, vals);
}

double l2_sphere_norm(const Field& a) {
  return std::sqrt(std::max(0.0, l2_sphere_inner(a, a)));
}

GalerkinAssembly assemble_galerkin(const Field& u, const WeightedNorm& norm,
                                   const std::vector<Field>& space) {
  if (space.empty()) fail(ErrorCode::EmptyTestSpace, "Galerkin space has no elements");
  const auto& grid = *u.grid();
  const int nr = grid.n_r(), nt = grid.n_theta(), ncomp = u.ncomp();
  const size_t nodes = size_t(2) * nr * nt;
  const int n = int(space.size());

  GalerkinAssembly out;
  out.u_ = &u;
  out.wconf_.resize(nodes);
  out.wplane_rho_.resize(nodes);
  out.grad_sq_u_.resize(nodes);

  FieldDerivatives du(u);
  {
    size_t idx = 0;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j, ++idx) {
          out.wconf_[idx] = grid.weight_conformal(Chart(c), i);
          out.wplane_rho_[idx] = grid.weight_plane(Chart(c), i) *
                                 norm.rho_squared(grid.plane_point(Chart(c), i, j));
          out.grad_sq_u_[idx] = du.grad_squared_chart(Chart(c), i, j);
        }
  }

  const size_t gcols = nodes * 2 * ncomp;
  const size_t vcols = nodes * ncomp;
  Eigen::MatrixXd A(n, gcols), B(n, vcols), C(n, vcols);
  Eigen::VectorXd a_u(gcols), b_u(vcols);

  auto fill_features = [&](const Field& f, Eigen::VectorXd& ga, Eigen::VectorXd& bb,
                           Eigen::VectorXd* cc, bool is_u) {
    FieldDerivatives df(f);
    AmbientJacobian jac;
    size_t idx = 0;
    double tangency = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j, ++idx) {
          const double sw = std::sqrt(out.wconf_[idx]);
          df.gradient_chart(Chart(c), i, j, jac);
          for (int k = 0; k < ncomp; ++k) {
            ga(idx * 2 * ncomp + 2 * k) = sw * jac(k, 0);
            ga(idx * 2 * ncomp + 2 * k + 1) = sw * jac(k, 1);
          }
          const Ambient val = f.node_value(Chart(c), i, j);
          const double sb = std::sqrt(out.wconf_[idx] * out.grad_sq_u_[idx]);
          const double sc = std::sqrt(out.wplane_rho_[idx]);
          for (int k = 0; k < ncomp; ++k) {
            bb(idx * ncomp + k) = sb * val(k);
            if (cc) (*cc)(idx * ncomp + k) = sc * val(k);
          }
          if (!is_u)
            tangency = std::max(
                tangency, std::abs(val.dot(u.node_value(Chart(c), i, j))));
        }
    if (!is_u && tangency > kTangencyTol)
      fail(ErrorCode::NonTangentVariation,
           "Galerkin test field not tangent along the map");
  };

  fill_features(u, a_u, b_u, nullptr, true);
  Eigen::VectorXd ga(gcols), bb(vcols), cc(vcols);
  for (int m = 0; m < n; ++m) {
    fill_features(space[m], ga, bb, &cc, false);
    A.row(m) = ga;
    B.row(m) = bb;
    C.row(m) = cc;
  }

  out.gram = A * A.transpose() + C * C.transpose();
  out.hessian = A * A.transpose() - B * B.transpose();
  out.gradient = A * a_u - B * b_u;
  out.feat_grad_ = std::move(A);
  out.feat_bval_ = std::move(B);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.gram);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::SingularGram, "Gram eigendecomposition failed");
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 0.0)) fail(ErrorCode::SingularGram, "Gram matrix is not positive");
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i)
    inv(i) = (inv(i) > 1e-12 * lmax) ? 1.0 / inv(i) : 0.0;
  out.gram_pinv_ =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return out;
}

Eigen::VectorXd GalerkinAssembly::hessian_row(const Field& y) const {
  const auto& u = *u_;
  const auto& grid = *u.grid();
  const int nr = grid.n_r(), nt = grid.n_theta(), ncomp = u.ncomp();
  const size_t nodes = size_t(2) * nr * nt;
  Eigen::VectorXd ga(nodes * 2 * ncomp), bb(nodes * ncomp);
  FieldDerivatives dy(y);
  AmbientJacobian jac;
  size_t idx = 0;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j, ++idx) {
        const double sw = std::sqrt(wconf_[idx]);
        dy.gradient_chart(Chart(c), i, j, jac);
        const Ambient val = y.node_value(Chart(c), i, j);
        const double sb = std::sqrt(wconf_[idx] * grad_sq_u_[idx]);
        for (int k = 0; k < ncomp; ++k) {
          ga(idx * 2 * ncomp + 2 * k) = sw * jac(k, 0);
          ga(idx * 2 * ncomp + 2 * k + 1) = sw * jac(k, 1);
          bb(idx * ncomp + k) = sb * val(k);
        }
      }
  return feat_grad_ * ga - feat_bval_ * bb;
}

double GalerkinAssembly::dual_sup(const Eigen::VectorXd& ell) const {
  const double v = ell.dot(gram_pinv_ * ell);
  return std::sqrt(std::max(0.0, v));
}

double dual_norm_estimate(const Field& u, const WeightedNorm& norm,
                          const std::vector<Field>& space) {
  const GalerkinAssembly g = assemble_galerkin(u, norm, space);
  return g.dual_sup(g.gradient);
}

EnergyReport energy_defect(const SingularityModel& model, GridPtr grid,
                           const std::vector<Field>* dual_space) {
  EnergyReport report;
  const int n = model.ambient_dim();
  Field z = Field::sample(grid, n, [&](Chart, Complex x) { return model.map(x); },
                          "singularity model");
  report.energy = dirichlet_energy(z);
  report.energy_star = model.data().q0.degree() * model.data().U0.energy() +
                       model.data().q1.degree() * model.data().U1.energy();
  report.defect = report.energy - report.energy_star;
  report.tension_l2 = tension_sphere_l2(z);
  if (dual_space && !dual_space->empty())
    report.dual_norm_lower_bound =
        dual_norm_estimate(z, WeightedNorm::for_model(model), *dual_space);
  return report;
}

}  // namespace bubbletree
