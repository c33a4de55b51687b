#pragma once

#include <optional>
#include <vector>

#include "bubbletree/grid.hpp"
#include "bubbletree/model.hpp"

namespace bubbletree {

// Scale-adapted weight rho^2 = |grad pi_{1/mu0}|^2 + |grad pi_{mu1}|^2.
struct WeightedNorm {
  double mu0 = 1.0;
  double mu1 = 1.0;

  static WeightedNorm for_model(const SingularityModel& m) {
    return {m.scales().mu0, m.scales().mu1};
  }
  double rho_squared(Complex z) const {
    const PlanePoint p(z);
    return conformal_weight(p, 1.0 / mu0) + conformal_weight(p, mu1);
  }
};

double dirichlet_energy(const FieldDerivatives& du);
double dirichlet_energy(const Field& u);

// Flat-gauge tension Delta u + |grad u|^2 u in the chart's own coordinates.
Ambient tension_euclidean(const FieldDerivatives& du, Chart c, int i, int j);

// L^2(S^2) norm of the sphere-gauge tension of a sphere-valued field.
double tension_sphere_l2(const Field& u);

double weighted_norm(const Field& w, const WeightedNorm& norm);
double weighted_inner(const Field& a, const Field& b, const WeightedNorm& norm);

// dE(u)(w) = int grad u . grad w - |grad u|^2 <u, w>; w must be tangent
// along u (NonTangentVariation otherwise).
double first_variation(const Field& u, const Field& w);
// d2E(u)(v, w) = int grad v . grad w - |grad u|^2 <v, w> for tangent v, w.
double second_variation(const Field& u, const Field& v, const Field& w);

double l2_sphere_inner(const Field& a, const Field& b);
double l2_sphere_norm(const Field& a);

// One-pass Galerkin data of a test space along u: the weighted Gram matrix,
// the second-variation matrix and the first-variation vector.
struct GalerkinAssembly {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  // Applies d2E(u)(y, .) to the space for a given direction field y.
  Eigen::VectorXd hessian_row(const Field& y) const;
  // Galerkin sup of a linear functional ell over {|w|_z = 1}.
  double dual_sup(const Eigen::VectorXd& ell) const;

  // implementation detail of hessian_row/dual_sup
  Eigen::MatrixXd feat_grad_, feat_bval_;
  std::vector<double> wconf_, wplane_rho_, grad_sq_u_;
  const Field* u_ = nullptr;
  Eigen::MatrixXd gram_pinv_;
};

GalerkinAssembly assemble_galerkin(const Field& u, const WeightedNorm& norm,
                                   const std::vector<Field>& space);

// Certified Galerkin lower bound for |dE(u)|_* over the given test space.
double dual_norm_estimate(const Field& u, const WeightedNorm& norm,
                          const std::vector<Field>& space);

struct EnergyReport {
  double energy = 0.0;
  double energy_star = 0.0;
  double defect = 0.0;
  double tension_l2 = 0.0;
  double dual_norm_lower_bound = 0.0;
};

// E, E^* = sum_i deg(q_i) E(U_i), their difference, the sphere tension norm
// and (when a test space is supplied) the dual-norm lower bound.
EnergyReport energy_defect(const SingularityModel& model, GridPtr grid,
                           const std::vector<Field>* dual_space = nullptr);

}  // namespace bubbletree
