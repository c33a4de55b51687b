#include "bubbletree/rational.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace bubbletree {

namespace {

constexpr double kCoeffTol = 1e-13;

bool is_inf(Complex z) {
  return !std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::norm(z) > 1e60;
}

double coeff_scale(const std::vector<Complex>& c) {
  double m = 0.0;
  for (const auto& a : c) m = std::max(m, std::abs(a));
  return m > 0.0 ? m : 1.0;
}

}  // namespace

Polynomial Polynomial::monomial(Complex a, int k) {
  std::vector<Complex> c(static_cast<size_t>(k) + 1, Complex(0.0));
  c.back() = a;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == Complex(0.0)) c_.pop_back();
}

Complex Polynomial::eval(Complex z) const {
  Complex acc(0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex Polynomial::eval_reversed(Complex w) const {
  Complex acc(0.0);
  for (auto it = c_.begin(); it != c_.end(); ++it) acc = acc * w + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<Complex> d(c_.size() - 1);
  for (size_t j = 1; j < c_.size(); ++j) d[j - 1] = double(j) * c_[j];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<Complex> c(std::max(c_.size(), other.c_.size()), Complex(0.0));
  for (size_t j = 0; j < c_.size(); ++j) c[j] += c_[j];
  for (size_t j = 0; j < other.c_.size(); ++j) c[j] += other.c_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (is_zero() || other.is_zero()) return Polynomial();
  std::vector<Complex> c(c_.size() + other.c_.size() - 1, Complex(0.0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < other.c_.size(); ++j) c[i + j] += c_[i] * other.c_[j];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(Complex a) const {
  std::vector<Complex> c(c_);
  for (auto& x : c) x *= a;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::compose_scaled(Complex a) const {
  std::vector<Complex> c(c_);
  Complex p(1.0);
  for (auto& x : c) {
    x *= p;
    p *= a;
  }
  return Polynomial(std::move(c));
}

int RationalMap::degree() const {
  return std::max(numerator.degree(), denominator.degree());
}

namespace {

// num/den at w with infinity handled by degree comparison.
Complex eval_core(const Polynomial& num, const Polynomial& den, Complex w) {
  if (is_inf(w)) {
    const int dn = num.degree(), dd = den.degree();
    if (num.is_zero()) return 0.0;
    if (dn > dd) return Complex(std::numeric_limits<double>::infinity(), 0.0);
    if (dn < dd) return 0.0;
    return num.coefficient(dn) / den.coefficient(dd);
  }
  if (std::abs(w) > 1.0) {
    // Evaluate via the reversed polynomials at 1/w to avoid overflow.
    const Complex v = 1.0 / w;
    const int dn = num.degree(), dd = den.degree();
    Complex n = num.eval_reversed(v);
    Complex d = den.eval_reversed(v);
    // num(w) = w^dn * n, den(w) = w^dd * d.
    if (std::abs(d) == 0.0)
      return Complex(std::numeric_limits<double>::infinity(), 0.0);
    Complex ratio = n / d;
    int k = dn - dd;
    Complex scale(1.0);
    for (int i = 0; i < std::abs(k); ++i) scale *= (k > 0 ? w : v);
    return ratio * scale;
  }
  const Complex d = den.eval(w);
  if (std::abs(d) == 0.0) {
    if (std::abs(num.eval(w)) == 0.0)
      fail(ErrorCode::Pole, "0/0 in rational map evaluation");
    return Complex(std::numeric_limits<double>::infinity(), 0.0);
  }
  return num.eval(w) / d;
}

Complex apply_pre(const Precomposition& pre, Complex z) {
  Complex w = pre.conjugate ? std::conj(z) : z;
  if (pre.reciprocal) {
    const Complex mz = pre.mu * w;
    if (std::abs(mz) == 0.0) return Complex(std::numeric_limits<double>::infinity(), 0.0);
    w = is_inf(mz) ? Complex(0.0) : 1.0 / mz;
  }
  return w;
}

}  // namespace

Complex evaluate_projective(const RationalMap& q, Complex z) {
  return eval_core(q.numerator, q.denominator, apply_pre(q.pre, z));
}

Complex evaluate(const RationalMap& q, Complex z) {
  const Complex v = evaluate_projective(q, z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    fail(ErrorCode::Pole, "rational map takes the value infinity here");
  return v;
}

Complex derivative(const RationalMap& q, Complex z) {
  if (q.pre.conjugate)
    fail(ErrorCode::ConfigInvalid, "derivative of a conjugated map is not holomorphic");
  const Complex w = apply_pre(q.pre, z);
  if (is_inf(w)) fail(ErrorCode::Pole, "derivative requested at infinity");
  const Complex d = q.denominator.eval(w);
  if (std::abs(d) == 0.0) fail(ErrorCode::Pole, "derivative requested at a pole");
  const Complex n = q.numerator.eval(w);
  const Complex dn = q.numerator.derivative().eval(w);
  const Complex dd = q.denominator.derivative().eval(w);
  Complex dq = (dn * d - n * dd) / (d * d);
  if (q.pre.reciprocal) dq *= -1.0 / (q.pre.mu * z * z);
  return dq;
}

TaylorData taylor_at_zero(const RationalMap& q, int J) {
  if (q.pre.reciprocal)
    fail(ErrorCode::ConfigInvalid, "taylor_at_zero needs a direct-chart map");
  const Complex d0 = q.denominator.eval(0.0);
  if (std::abs(d0) == 0.0) fail(ErrorCode::Pole, "denominator vanishes at 0");

  // Invert the denominator series: b with den * b = 1 + O(z^{J+1}).
  std::vector<Complex> b(static_cast<size_t>(J) + 1, Complex(0.0));
  b[0] = 1.0 / d0;
  for (int j = 1; j <= J; ++j) {
    Complex acc(0.0);
    for (int k = 1; k <= j; ++k) acc += q.denominator.coefficient(k) * b[j - k];
    b[j] = -acc / d0;
  }
  std::vector<Complex> a(static_cast<size_t>(J) + 1, Complex(0.0));
  for (int j = 0; j <= J; ++j) {
    Complex acc(0.0);
    for (int k = 0; k <= j; ++k) acc += q.numerator.coefficient(k) * b[j - k];
    a[j] = acc;
  }

  TaylorData out;
  out.a = std::move(a);
  const double scale = coeff_scale(out.a);
  if (std::abs(out.a[0]) > 1e-10 * scale)
    fail(ErrorCode::ConfigInvalid, "rational map does not vanish at 0");
  out.a[0] = 0.0;
  out.n_star = 0;
  for (int j = 1; j <= J; ++j) {
    if (std::abs(out.a[j]) > kCoeffTol * scale) {
      out.n_star = j;
      break;
    }
  }
  if (out.n_star == 0)
    fail(ErrorCode::AllCoefficientsZero, "no nonzero Taylor coefficient up to requested order");
  return out;
}

LeadingNormalization normalize_leading(const RationalMap& q0, const RationalMap& q1,
                                       double mu) {
  const TaylorData t0 = taylor_at_zero(q0, q0.degree() + 1);
  const TaylorData t1 = taylor_at_zero(q1, q1.degree() + 1);
  const double lead0 = std::abs(t0.coefficient(t0.n_star));
  const double lead1 = std::abs(t1.coefficient(t1.n_star));
  LeadingNormalization out;
  out.c = std::pow(lead0, -1.0 / t0.n_star);
  out.mu_adjusted = out.c * mu * std::pow(lead1, -1.0 / t1.n_star);
  return out;
}

RationalMap reciprocal_rescale(const RationalMap& q, double mu) {
  if (mu <= 0.0) fail(ErrorCode::ConfigInvalid, "reciprocal rescale needs mu > 0");
  RationalMap out = q;
  if (out.pre.reciprocal)
    fail(ErrorCode::ConfigInvalid, "map already carries a reciprocal precomposition");
  out.pre.reciprocal = true;
  out.pre.mu = mu;
  return out;
}

ScalePair mu_values(const RationalMap& q0, const RationalMap& q1, double mu) {
  const TaylorData t0 = taylor_at_zero(q0, q0.degree() + 1);
  const TaylorData t1 = taylor_at_zero(q1, q1.degree() + 1);
  ScalePair out;
  out.mu0 = std::pow(std::abs(t0.coefficient(t0.n_star)), -1.0 / t0.n_star);
  out.mu1 = mu * std::pow(std::abs(t1.coefficient(t1.n_star)), -1.0 / t1.n_star);
  return out;
}

NuValues nu_values(const RationalMap& q0, const RationalMap& q1, double mu1) {
  if (mu1 <= 1.0) fail(ErrorCode::ConfigInvalid, "nu_values needs mu1 > 1");
  const TaylorData t0 = taylor_at_zero(q0, q0.degree() + 1);
  const TaylorData t1 = taylor_at_zero(q1, q1.degree() + 1);
  NuValues out;
  double w = 1.0;
  for (int j = 1; j <= t1.n_star; ++j) {
    w /= mu1;
    out.nu1 = std::max(out.nu1, std::abs(t1.coefficient(j)) * w);
  }
  w = 1.0;
  for (int j = 1; j <= t0.n_star; ++j) {
    w /= mu1;
    out.nu0 = std::max(out.nu0, std::abs(t0.coefficient(j)) * w);
  }
  out.nu_bar = std::max(out.nu0, out.nu1);
  return out;
}

RationalMap perturb_coefficient(const RationalMap& q, int j0, double theta_star,
                                double eps) {
  if (j0 < 1) fail(ErrorCode::ConfigInvalid, "perturbation order must be >= 1");
  const Complex d0 = q.denominator.eval(0.0);
  if (std::abs(d0) == 0.0) fail(ErrorCode::Pole, "denominator vanishes at 0");
  RationalMap out;
  out.pre = q.pre;
  out.numerator = q.numerator * (1.0 / d0);
  out.denominator = q.denominator * (1.0 / d0);
  const Complex phase = std::polar(1.0, j0 * theta_star);
  out.numerator = out.numerator + Polynomial::monomial(eps * phase, j0);
  return out;
}

RationalMap ScaleVariation::at(double eps) const {
  const Complex a = 1.0 / (1.0 + eps);
  RationalMap out = base;
  out.numerator = base.numerator.compose_scaled(a);
  out.denominator = base.denominator.compose_scaled(a);
  return out;
}

RationalMap ScaleVariation::derivative_at_zero() const {
  const Polynomial z({0.0, 1.0});
  const Polynomial n = base.numerator, d = base.denominator;
  RationalMap out;
  out.pre = base.pre;
  out.numerator = (z * (n.derivative() * d + n * d.derivative() * Complex(-1.0))) * Complex(-1.0);
  out.denominator = d * d;
  return out;
}

ScaleVariation scale_variation(const RationalMap& q1) { return ScaleVariation{q1}; }

std::vector<Complex> denominator_roots(const RationalMap& q) {
  const auto& c = q.denominator.coefficients();
  const int d = q.denominator.degree();
  std::vector<Complex> roots;
  if (d <= 0) return roots;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  for (int i = 0; i < d; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

}  // namespace bubbletree
