#pragma once

#include <functional>

namespace bubbletree {

// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-14,
                          int max_depth = 48);

// Improper integral over [a, infinity) via the substitution t = a + x/(1-x).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-12, double abs_tol = 1e-14);

}  // namespace bubbletree
