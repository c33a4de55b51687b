#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bubbletree/geometry.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/rational.hpp"

namespace bubbletree {

// An exactly harmonic sphere: z -> embedding(pi(R(z + c))), with the argument
// conjugated first when `conjugated` is set.
struct HarmonicMapDescriptor {
  RationalMap rational = RationalMap::identity();
  bool conjugated = false;
  GreatSphereEmbedding embedding = GreatSphereEmbedding::identity(3);
  Complex translation{0.0, 0.0};

  int ambient_dim() const { return embedding.ambient_dim(); }
  Ambient eval(Complex z) const;
  // Real differential as an N x 2 matrix (columns d/dx, d/dy).
  AmbientJacobian differential(Complex z) const;
  double energy() const { return 4.0 * M_PI * rational.degree(); }
};

enum class FChoice { LogMu, MuPower };

struct GluingThresholds {
  double mu_bar = 54.598150033144236;  // e^4
  double sigma1 = 0.05;                // exponent of the MuPower branch
  double cap_epsilon = 0.10;           // multiplicative width of the cutoff caps
};

struct GluingData {
  HarmonicMapDescriptor U0, U1;
  RationalMap q0 = RationalMap::identity();
  RationalMap q1 = RationalMap::identity();
  double mu = 2980.9579870417283;  // e^8
  FChoice f_choice = FChoice::LogMu;
  GluingThresholds thresholds;
};

double f_of_mu(FChoice choice, double sigma1, double ratio);
double f_of_mu_derivative(FChoice choice, double sigma1, double ratio);

struct Radii {
  double r0 = 0.0;
  double r1 = 0.0;
  double r_hat = 0.0;
  double c = 0.0;  // c_{r0,r1} = 1/log(r0/r1)
};

Radii build_radii(const GluingData& data);

// The radial transition phi_{r0,r1}: 0 on [0,r1], c log(r/r1) in the middle,
// 1 from r0 on. The caps are mirror images of each other, so the whole
// profile satisfies phi(r0 r1 / r) = 1 - phi(r) exactly.
class Cutoff {
 public:
  Cutoff(const Radii& radii, double cap_epsilon);
  double value(double r) const;
  double d_dr(double r) const;
  double d2_dr2(double r) const;
  double laplacian(double r) const { return d2_dr2(r) + d_dr(r) / r; }
  const Radii& radii() const { return radii_; }

 private:
  double profile_s(double s) const;     // phi as a function of s = log r
  double profile_s_d1(double s) const;
  double profile_s_d2(double s) const;
  Radii radii_;
  double eps_tilde_;  // cap width in log radius
  double s1_, s0_;
};

struct ModelDiagnostics {
  double delta = 0.0;
  double nu0 = 0.0, nu1 = 0.0, nu_bar = 0.0;
  double tension0 = 0.0, tension1 = 0.0, tension_max = 0.0;
  bool tension_measured = false;
};

struct AssembleOptions {
  bool measure_tension = false;      // sample the descriptors' sphere tension
  bool check_tubular = true;         // scan the pre-projection field
  bool check_poles = true;
};

struct VariationDirection;

class SingularityModel : public std::enable_shared_from_this<SingularityModel> {
 public:
  static std::shared_ptr<const SingularityModel> assemble(
      const GluingData& data, const AssembleOptions& options = {});

  const GluingData& data() const { return data_; }
  const Radii& radii() const { return radii_; }
  const ModelDiagnostics& diagnostics() const { return diag_; }
  int ambient_dim() const { return data_.U0.ambient_dim(); }
  const ScalePair& scales() const { return scales_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 4, 2>& dbeta0() const { return dbeta0_; }
  const Cutoff& cutoff() const { return cutoff_; }
  const Ambient& U0_at_origin() const { return U0_origin_; }
  const Ambient& U1_at_origin() const { return U1_origin_; }

  Complex q_mu(Complex z) const;
  Ambient u_field(int which, Complex z) const;   // U_i composed with q_mu
  Ambient gamma(Complex z) const;
  Ambient gamma_tilde(int which, Complex z) const;
  Ambient beta(Complex w) const;                 // U0 - U1 at the argument w
  Ambient j_field(int which, Complex z) const;
  Ambient v_field(int which, Complex z) const;
  Ambient pre_projection(Complex z) const;
  Ambient map(Complex z) const;                  // the singularity model itself

  // Grid parameters resolving this model's scales, with density bands at
  // r1, r_hat and r0.
  GridParams grid_params(int n_r = 512, int n_theta = 128) const;

  std::vector<VariationDirection> tangent_basis() const;

  GluingData base_data_copy() const { return data_; }

 private:
  SingularityModel(const GluingData& data, Radii radii);
  GluingData data_;
  RationalMap q1_mu_;  // q1 precomposed with 1/(mu z)
  Radii radii_;
  Cutoff cutoff_;
  ScalePair scales_;
  ModelDiagnostics diag_;
  Ambient U0_origin_, U1_origin_;
  Eigen::Matrix<double, Eigen::Dynamic, 2, 0, 4, 2> dbeta0_;
};

using ModelPtr = std::shared_ptr<const SingularityModel>;

struct VariationDirection {
  enum class Kind { TranslateU0, TranslateU1, PerturbQ0, PerturbQ1, ScaleMu };

  Kind kind = Kind::TranslateU1;
  Complex a{1.0, 0.0};      // translation direction
  int j0 = 1;               // perturbed coefficient order
  double theta_star = 0.0;  // perturbation phase

  double eta0 = 0.0;        // |d_eps U1(0)| + |d_eps U0(0)|
  int eta_rat = 0;
  int j_star = 0;

  ModelPtr base;

  GluingData data_at(double eps) const;
  ModelPtr model_at(double eps) const;
  // d/d eps of the glued map at eps = 0, by Richardson-extrapolated central
  // differences of the model family.
  Ambient deriv_map(Complex z) const;
  // Same for delta(eps)^2 and for the component maps u_i.
  double deriv_delta_squared() const;
  Ambient deriv_u_field(int which, Complex z) const;

  double fd_step = 1e-4;

  const char* kind_name() const;

  // Prebuilt models at +-h and +-h/2; filled by `prepare`.
  void prepare();
  std::array<ModelPtr, 4> stencil;  // [+h, -h, +h/2, -h/2]
};

VariationDirection make_translation_direction(ModelPtr model, int which, Complex a);
VariationDirection make_coefficient_direction(ModelPtr model, int which, int j0,
                                              double theta_star);
VariationDirection make_scale_direction(ModelPtr model);

// The variation of Lemma-style delta reduction: translate U_i along the
// projected geodesic direction so that d/d eps delta^2 = delta.
VariationDirection make_delta_direction(ModelPtr model, int which = 1);

}  // namespace bubbletree
