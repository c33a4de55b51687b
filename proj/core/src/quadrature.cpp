#include "bubbletree/quadrature.hpp"

#include <cmath>

namespace bubbletree {

namespace {

// G7/K15 nodes and weights on [-1, 1]: {abscissa, gauss weight, kronrod weight}.
constexpr double kNodes[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double g7 = kNodes[0][1] * f0;
  double k15 = kNodes[0][2] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNodes[i][0];
    const double fi = f(mid + dx) + f(mid - dx);
    g7 += kNodes[i][1] * fi;
    k15 += kNodes[i][2] * fi;
  }
  g7 *= half;
  k15 *= half;
  double err = std::abs(k15 - g7);
  err = 200.0 * err * std::sqrt(std::max(err, 0.0) / 200.0);
  return {k15, std::min(err, std::abs(k15 - g7) * 200.0)};
}

double integrate_recursive(const std::function<double(double)>& f, double a, double b,
                           double tol, int depth, int max_depth) {
  const PanelResult r = gk15(f, a, b);
  if (depth >= max_depth || r.error <= tol) return r.value;
  const double mid = 0.5 * (a + b);
  return integrate_recursive(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
         integrate_recursive(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const PanelResult coarse = gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse.value));
  return integrate_recursive(f, a, b, tol, 0, max_depth);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol, double abs_tol) {
  auto g = [&f, a](double x) {
    const double u = 1.0 - x;
    const double t = a + x / u;
    return f(t) / (u * u);
  };
  return integrate_adaptive(g, 0.0, 1.0 - 1e-14, rel_tol, abs_tol);
}

}  // namespace bubbletree
