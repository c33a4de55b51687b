#pragma once

#include <complex>
#include <vector>

#include "bubbletree/errors.hpp"

namespace bubbletree {

using Complex = std::complex<double>;

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<Complex> coeffs) : c_(coeffs) { trim(); }
  explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial zero() { return Polynomial(); }
  static Polynomial one() { return Polynomial({Complex(1.0, 0.0)}); }
  // Monomial a * z^k.
  static Polynomial monomial(Complex a, int k);

  const std::vector<Complex>& coefficients() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Complex coefficient(int j) const {
    return (j >= 0 && j < static_cast<int>(c_.size())) ? c_[j] : Complex(0.0);
  }

  Complex eval(Complex z) const;
  // Evaluation of z^deg * p(1/z); stable route to p at large |z|.
  Complex eval_reversed(Complex w) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(Complex a) const;
  // p(a z).
  Polynomial compose_scaled(Complex a) const;

 private:
  void trim();
  std::vector<Complex> c_;  // ascending degree, no trailing exact zeros
};

// How the rational core q = num/den is fed its argument.
struct Precomposition {
  bool reciprocal = false;  // z -> 1/(mu z)
  double mu = 1.0;
  bool conjugate = false;  // z -> conj(z), applied first
};

struct RationalMap {
  Polynomial numerator;
  Polynomial denominator = Polynomial::one();
  Precomposition pre;

  static RationalMap from_polynomial(Polynomial p) {
    return RationalMap{std::move(p), Polynomial::one(), {}};
  }
  static RationalMap identity() { return from_polynomial(Polynomial({0.0, 1.0})); }
  int degree() const;
};

struct TaylorData {
  int n_star = 0;                // order of the zero at 0
  std::vector<Complex> a;        // a[j] multiplies z^j, j = 0..J
  Complex coefficient(int j) const {
    return (j >= 0 && j < static_cast<int>(a.size())) ? a[j] : Complex(0.0);
  }
};

struct ScalePair {
  double mu0 = 1.0;
  double mu1 = 1.0;
};

struct NuValues {
  double nu0 = 0.0;
  double nu1 = 0.0;
  double nu_bar = 0.0;
};

struct LeadingNormalization {
  double c = 1.0;            // domain rescale applied to the base side
  double mu_adjusted = 1.0;  // scale entering the glued map after rescaling
};

// Value of q at z; a pole (non-finite value) is an error.
Complex evaluate(const RationalMap& q, Complex z);
// Value of q as a map of the Riemann sphere: poles and the point at
// infinity evaluate to a non-finite complex instead of throwing.
Complex evaluate_projective(const RationalMap& q, Complex z);
// dq/dz; requires a non-conjugated precomposition.
Complex derivative(const RationalMap& q, Complex z);

// Power series of q at 0 up to order J (inclusive). Requires q(0) = 0 and a
// direct (non-reciprocal) precomposition.
TaylorData taylor_at_zero(const RationalMap& q, int J);

LeadingNormalization normalize_leading(const RationalMap& q0, const RationalMap& q1,
                                       double mu);
RationalMap reciprocal_rescale(const RationalMap& q, double mu);
ScalePair mu_values(const RationalMap& q0, const RationalMap& q1, double mu);
NuValues nu_values(const RationalMap& q0, const RationalMap& q1, double mu1);

// q with numerator r1 + eps (e^{i theta} z)^{j0} after normalising r2(0) = 1.
RationalMap perturb_coefficient(const RationalMap& q, int j0, double theta_star,
                                double eps);

// The family eps -> q(z / (1 + eps)) together with its derivative at eps = 0,
// which is the rational map -z q'(z).
struct ScaleVariation {
  RationalMap base;
  RationalMap at(double eps) const;
  RationalMap derivative_at_zero() const;
};
ScaleVariation scale_variation(const RationalMap& q1);

// Roots of the denominator (poles of the core q = num/den, before any
// precomposition), via the companion matrix.
std::vector<Complex> denominator_roots(const RationalMap& q);

}  // namespace bubbletree
