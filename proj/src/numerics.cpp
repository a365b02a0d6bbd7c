#include "veh/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "veh/device.hpp"

namespace veh::num {

namespace {

double eval_cubic(double a, double b, double c, double d, double x) {
  return ((a * x + b) * x + c) * x + d;
}

double eval_cubic_deriv(double a, double b, double c, double x) {
  return (3.0 * a * x + 2.0 * b) * x + c;
}

double newton_polish(double a, double b, double c, double d, double x) {
  const double fp = eval_cubic_deriv(a, b, c, x);
  if (fp == 0.0) return x;
  const double step = eval_cubic(a, b, c, d, x) / fp;
  if (!std::isfinite(step)) return x;
  return x - step;
}

}  // namespace

double cubic_discriminant(double a, double b, double c, double d) {
  return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c -
         4.0 * a * c * c * c - 27.0 * a * a * d * d;
}

std::vector<double> cubic_real_roots(double a, double b, double c, double d) {
  std::vector<double> roots;
  if (a == 0.0) {
    if (b == 0.0) {
      if (c != 0.0) roots.push_back(-d / c);
      return roots;
    }
    const double disc = c * c - 4.0 * b * d;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      roots.push_back((-c - s) / (2.0 * b));
      roots.push_back((-c + s) / (2.0 * b));
      std::sort(roots.begin(), roots.end());
    }
    return roots;
  }

  // depressed form t^3 + p t + q with x = t - b/(3a)
  const double shift = b / (3.0 * a);
  const double p_ = (3.0 * a * c - b * b) / (3.0 * a * a);
  const double q_ = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) /
                    (27.0 * a * a * a);
  const double disc = -(4.0 * p_ * p_ * p_ + 27.0 * q_ * q_);

  if (disc > 0.0) {
    // three real roots, trigonometric form
    const double m = 2.0 * std::sqrt(-p_ / 3.0);
    const double arg = std::clamp(3.0 * q_ / (p_ * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
      roots.push_back(t - shift);
    }
  } else {
    // one real root, Cardano
    const double half_q = q_ / 2.0;
    const double inner = half_q * half_q + p_ * p_ * p_ / 27.0;
    const double s = std::sqrt(std::max(inner, 0.0));
    const double u = std::cbrt(-half_q + s);
    const double v = std::cbrt(-half_q - s);
    roots.push_back(u + v - shift);
  }

  for (double& r : roots) {
    r = newton_polish(a, b, c, d, r);
    r = newton_polish(a, b, c, d, r);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

MaxResult golden_section_max(const std::function<double(double)>& f, double lo,
                             double hi, double xtol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? MaxResult{x1, f1} : MaxResult{x2, f2};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double xtol) {
  double flo = f(lo);
  double fhi = f(hi);
  detail::require((flo <= 0 && fhi >= 0) || (flo >= 0 && fhi <= 0),
                  "bisect_root: endpoints do not bracket a sign change");
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm <= 0) == (flo <= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double richardson_derivative(const std::function<double(double)>& fn, double x,
                             double h0, double rel_tol, int max_halvings) {
  double h = h0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i <= max_halvings; ++i) {
    const double est = (fn(x + h) - fn(x - h)) / (2.0 * h);
    if (std::isfinite(prev)) {
      const double scale = std::max(std::abs(est), std::abs(prev));
      if (scale == 0.0 || std::abs(est - prev) <= rel_tol * scale) return est;
    }
    prev = est;
    h /= 2.0;
  }
  throw model_error("richardson_derivative: no convergence after " +
                    std::to_string(max_halvings) + " halvings at x=" +
                    std::to_string(x));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2,
                  "fit_line: need two or more matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw model_error("fit_line: degenerate abscissae (zero variance)");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& x0,
                          const SimplexOptions& options) {
  const size_t dim = x0.size();
  detail::require(dim >= 1, "nelder_mead: empty start point");

  std::vector<std::vector<double>> pts(dim + 1, x0);
  for (size_t i = 0; i < dim; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> vals(dim + 1);
  for (size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<size_t> idx(dim + 1);
    for (size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(dim + 1);
    std::vector<double> v2(dim + 1);
    for (size_t i = 0; i <= dim; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  std::vector<double> history;
  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations; ++it) {
    order();
    history.push_back(vals[0]);
    if (static_cast<int>(history.size()) > options.improvement_window) {
      const double past = history[history.size() - 1 - options.improvement_window];
      const double now = history.back();
      const double denom = std::max(std::abs(past), 1e-300);
      if ((past - now) / denom < options.rel_improvement) {
        converged = true;
        break;
      }
    }
    double size = 0;
    for (size_t i = 1; i <= dim; ++i)
      for (size_t j = 0; j < dim; ++j)
        size = std::max(size, std::abs(pts[i][j] - pts[0][j]));
    if (size < options.size_tol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i < dim; ++i) {
      for (size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> p(dim);
      for (size_t j = 0; j < dim; ++j)
        p[j] = centroid[j] + coeff * (pts[dim][j] - centroid[j]);
      return p;
    };

    const auto reflected = blend(-1.0);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      const auto expanded = blend(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[dim] = expanded;
        vals[dim] = fe;
      } else {
        pts[dim] = reflected;
        vals[dim] = fr;
      }
    } else if (fr < vals[dim - 1]) {
      pts[dim] = reflected;
      vals[dim] = fr;
    } else {
      const auto contracted = blend(fr < vals[dim] ? -0.5 : 0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, vals[dim])) {
        pts[dim] = contracted;
        vals[dim] = fc;
      } else {
        for (size_t i = 1; i <= dim; ++i) {
          for (size_t j = 0; j < dim; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  return SimplexResult{pts[0], vals[0], it, converged};
}

}  // namespace veh::num
