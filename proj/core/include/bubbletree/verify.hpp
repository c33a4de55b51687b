#pragma once

#include <vector>

#include "bubbletree/energy.hpp"
#include "bubbletree/model.hpp"
#include "bubbletree/testspace.hpp"

namespace bubbletree {

// h_{j,mu}(z) = 2 (mu conj z)^j / (1 + |mu z|^{2j}): the complex part of the
// degree-j bubble harmonic used to expand the neck interaction.
Complex bubble_harmonic_h(int j, double mu, Complex z);
double bubble_harmonic_H(int j, double t);  // 4 j^2 t^{2j-2} / (1+t^{2j})^3

// I_j^H(mu) computed by two independent quadrature routes:
// substituted: 4 j^2 mu^{-j} int_0^smu t^{4j-1}/(1+t^{2j})^3 dt,
// radial:      mu^2 int_0^{1/smu} r^j H_j(mu r) (mu r)^j r dr.
struct IjH {
  double substituted = 0.0;
  double radial = 0.0;
};
IjH ij_h(int j, double mu);

struct AngularPairing {
  int j = 1;
  double alpha = 0.0;
  double value = 0.0;
};

// Circle pairing of the differentials at the gluing point,
// int <d(U0-U1)(0)(e^{i j t}), dU1(0)(e^{-i(j t + alpha)})> dt.
AngularPairing ij_theta(int j, double alpha, const HarmonicMapDescriptor& U0,
                        const HarmonicMapDescriptor& U1);

struct AlphaStar {
  double alpha_star = 0.0;
  double c_star = 0.0;  // certified min over j <= j_max of -I_j/2
};
AlphaStar alpha_star_select(const HarmonicMapDescriptor& U0,
                            const HarmonicMapDescriptor& U1, int j_max);

// Adapted frame data of a transversal S^3 configuration: the 3x2 matrix A of
// the paper's case analysis together with the conformal factors.
struct TransversalFrame {
  Eigen::Matrix<double, 3, 2> A;
  double c_u0 = 0.0;
  double c_u1 = 0.0;
};
TransversalFrame transversal_frame(const HarmonicMapDescriptor& U0,
                                   const HarmonicMapDescriptor& U1);

// argmax_j |a_j(q0)| mu^{-j} Lambda1^j over j = 1..n0*, ties to smaller j.
int dominant_index(const RationalMap& q0, double mu, double lambda1);

struct ExpansionResidual {
  double dE_direction = 0.0;  // dE(z)(d_eps z) by quadrature
  double term_j1 = 0.0;       // int_{Omega_1} j_1 d_eps Delta u_1
  double term_j0 = 0.0;       // int_{Omega_0} j_0 d_eps Delta u_0
  double term_neck = 0.0;     // pi c d/d eps delta^2
  double term_energy = 0.0;   // sum_i deg(q_i) d/d eps E(U_i)
  double main_terms = 0.0;
  double residual = 0.0;
  double error_scale = 0.0;   // paper error-term proxy for trend comparison
};
ExpansionResidual expansion_residual(const SingularityModel& model,
                                     const VariationDirection& dir, const Field& z_field);

struct QuotientReport {
  double dE_y = 0.0;
  double dual_norm = 0.0;
  double d2E_y_dual = 0.0;
  double Q = 0.0;
};
// Lojasiewicz-machinery quotient along the normalized direction y = d_eps z.
QuotientReport quotient_q(const SingularityModel& model, const VariationDirection& dir,
                          const Field& z_field, const std::vector<Field>& space);

struct SpectrumReport {
  std::vector<double> block;       // Galerkin eigenvalues on the leading block
  std::vector<double> complement;  // spectrum G-orthogonal to that block
  double min_abs_complement = 0.0;
};
// Generalized eigenvalues of the d2E Galerkin matrix with respect to the
// weighted Gram matrix; the first `block_count` fields form the near-kernel
// block that is projected out of the complement spectrum.
SpectrumReport jacobi_spectrum(const Field& u, const WeightedNorm& norm,
                               const std::vector<Field>& space, int block_count);

}  // namespace bubbletree
