#pragma once

#include <array>
#include <functional>
#include <vector>

namespace veh::num {

// Real roots of a x^3 + b x^2 + c x + d = 0, ascending. Degenerate leading
// coefficients fall back to the quadratic/linear case. Each root is polished
// with one Newton step, which keeps near-tangent discriminants well behaved.
std::vector<double> cubic_real_roots(double a, double b, double c, double d);

// Discriminant of the cubic; > 0 means three distinct real roots.
double cubic_discriminant(double a, double b, double c, double d);

// Maximizes f over [lo, hi] by golden-section search, assuming unimodality.
// Returns {x, f(x)} once the bracket shrinks below xtol.
struct MaxResult {
  double x;
  double value;
};
MaxResult golden_section_max(const std::function<double(double)>& f, double lo,
                             double hi, double xtol);

// Root of f on [lo, hi] with f(lo) and f(hi) of opposite sign, to xtol.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol);

// Central difference derivative of fn at x, halving the step from h0 until two
// consecutive estimates agree to rel_tol. Throws model_error on failure.
double richardson_derivative(const std::function<double(double)>& fn, double x,
                             double h0, double rel_tol, int max_halvings = 8);

// Least-squares line y = slope x + intercept with coefficient of determination.
struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Derivative-free Nelder-Mead simplex descent. Coordinates are unconstrained;
// the objective may return +inf to reject a point. Converged once the best
// value improves by less than rel_improvement over a trailing window of
// iterations, or the simplex collapses below size_tol.
struct SimplexOptions {
  double initial_step = 0.3;
  double rel_improvement = 1e-8;
  int improvement_window = 20;
  double size_tol = 1e-12;
  int max_iterations = 4000;
};
struct SimplexResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0,
                          const SimplexOptions& options = {});

}  // namespace veh::num
