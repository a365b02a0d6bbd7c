#include "veh/magnetics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "veh/numerics.hpp"

namespace veh::mag {

namespace detail {

namespace {

constexpr double kGaussNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGaussWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

// Signed solid-angle style corner sum for one charged rectangular face.
double face_term(double half_a, double half_b, double zf, double x, double y,
                 double z) {
  const double xs[2] = {x + half_a, x - half_a};
  const double ys[2] = {y + half_b, y - half_b};
  const double dz = z - zf;
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double r = std::sqrt(xs[i] * xs[i] + ys[j] * ys[j] + dz * dz);
      const double term = std::atan(xs[i] * ys[j] / (dz * r));
      sum += ((i + j) % 2 == 0) ? term : -term;
    }
  }
  return sum;
}

}  // namespace

double cuboid_bz(double side_a, double side_b, double z_bottom, double z_top,
                 double remanence, double x, double y, double z) {
  const double half_a = side_a / 2.0;
  const double half_b = side_b / 2.0;
  return remanence / (4.0 * M_PI) *
         (face_term(half_a, half_b, z_top, x, y, z) -
          face_term(half_a, half_b, z_bottom, x, y, z));
}

double turn_flux(const MagnetSpec& magnet, double side, double z_plane, double z_gap,
                 int panels) {
  const double z_bottom = z_gap;
  const double z_top = z_gap + magnet.thickness;
  const double half = side / 2.0;
  const double panel_w = side / panels;
  double total = 0.0;
  for (int pi = 0; pi < panels; ++pi) {
    const double x0 = -half + pi * panel_w;
    const double xc = x0 + panel_w / 2.0;
    for (int pj = 0; pj < panels; ++pj) {
      const double y0 = -half + pj * panel_w;
      const double yc = y0 + panel_w / 2.0;
      double panel_sum = 0.0;
      for (int gi = 0; gi < 8; ++gi) {
        const double x = xc + kGaussNodes[gi] * panel_w / 2.0;
        double row = 0.0;
        for (int gj = 0; gj < 8; ++gj) {
          const double y = yc + kGaussNodes[gj] * panel_w / 2.0;
          row += kGaussWeights[gj] * cuboid_bz(magnet.side_a, magnet.side_b, z_bottom,
                                               z_top, magnet.remanence, x, y, z_plane);
        }
        panel_sum += kGaussWeights[gi] * row;
      }
      total += panel_sum * (panel_w / 2.0) * (panel_w / 2.0);
    }
  }
  return total;
}

}  // namespace detail

CoilLayout build_layout(const CoilSpec& coil) {
  CoilLayout layout;
  layout.track_cross_section = coil.track_width * coil.track_thickness;
  layout.turns.reserve(coil.n_turns);
  const double outermost = coil.outer_side - coil.track_width;
  double total = 0.0;
  for (int k = 0; k < coil.n_turns; ++k) {
    const double side = outermost - 2.0 * coil.pitch() * k;
    if (side <= 0.0) {
      throw invalid_parameter("build_layout: turn " + std::to_string(k + 1) +
                              " has non-positive side length, spiral does not fit");
    }
    layout.turns.push_back({side, 0.0});
    total += 4.0 * side;
  }
  layout.total_track_length = total;
  return layout;
}

double coil_resistance(const CoilLayout& layout, double resistivity) {
  veh::detail::require(std::isfinite(resistivity) && resistivity > 0,
                       "coil_resistance: resistivity must be finite and > 0");
  return resistivity * layout.total_track_length / layout.track_cross_section;
}

double magnet_bz(const MagnetSpec& magnet, const Point3& point) {
  const double z_bottom = magnet.gap_z0;
  const double z_top = magnet.gap_z0 + magnet.thickness;
  const bool inside = std::abs(point.x) <= magnet.side_a / 2.0 &&
                      std::abs(point.y) <= magnet.side_b / 2.0 &&
                      point.z >= z_bottom && point.z <= z_top;
  if (inside) {
    throw invalid_parameter("magnet_bz: evaluation point lies inside the magnet body");
  }
  return detail::cuboid_bz(magnet.side_a, magnet.side_b, z_bottom, z_top,
                           magnet.remanence, point.x, point.y, point.z);
}

namespace {

double flux_linkage_impl(const MagnetSpec& magnet, const CoilLayout& layout,
                         double z_gap, const QuadratureOptions& options,
                         bool parallel) {
  veh::detail::require(std::isfinite(z_gap) && z_gap > 0,
                       "flux_linkage: z_gap must be finite and > 0");
  const int n = static_cast<int>(layout.turns.size());
  std::vector<double> partial(n);
  double prev = 0.0;
  bool have_prev = false;
  int panels = options.base_panels;
  for (int level = 0; level < options.max_levels; ++level, panels *= 2) {
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) {
        partial[i] = detail::turn_flux(magnet, layout.turns[i].side_length,
                                       layout.turns[i].z_plane, z_gap, panels);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        partial[i] = detail::turn_flux(magnet, layout.turns[i].side_length,
                                       layout.turns[i].z_plane, z_gap, panels);
      }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += partial[i];
    if (have_prev) {
      const double scale = std::max(std::abs(total), std::abs(prev));
      if (scale == 0.0 || std::abs(total - prev) <= options.rel_tol * scale) {
        return total;
      }
    }
    prev = total;
    have_prev = true;
  }
  std::ostringstream msg;
  msg << "flux_linkage: quadrature did not reach rel_tol=" << options.rel_tol
      << " after " << options.max_levels << " refinement levels (last total " << prev
      << " Wb at " << panels / 2 << " panels per side, z_gap=" << z_gap << " m)";
  throw model_error(msg.str());
}

}  // namespace

double flux_linkage(const MagnetSpec& magnet, const CoilLayout& layout, double z_gap,
                    const QuadratureOptions& options) {
  return flux_linkage_impl(magnet, layout, z_gap, options, true);
}

namespace serial {
double flux_linkage(const MagnetSpec& magnet, const CoilLayout& layout, double z_gap,
                    const QuadratureOptions& options) {
  return flux_linkage_impl(magnet, layout, z_gap, options, false);
}
}  // namespace serial

double transduction_coefficient(const MagnetSpec& magnet, const CoilLayout& layout,
                                double z_gap) {
  const double h0 = z_gap / 8.0;
  veh::detail::require(z_gap > h0, "transduction_coefficient: z_gap must exceed the step");
  // The difference amplifies quadrature error, so integrate tighter than the
  // flux default before differencing.
  QuadratureOptions tight;
  tight.rel_tol = 1e-6;
  tight.max_levels = 9;
  // Flux falls with growing gap, so the derivative against the gap is
  // negative; K is reported against the displacement toward the coil.
  return -num::richardson_derivative(
      [&](double z) { return flux_linkage(magnet, layout, z, tight); }, z_gap, h0,
      1e-3);
}

std::vector<FluxSample> flux_scan(const MagnetSpec& magnet, const CoilLayout& layout,
                                  const std::vector<double>& z_gaps,
                                  const QuadratureOptions& options) {
  std::vector<FluxSample> out;
  out.reserve(z_gaps.size());
  for (double z : z_gaps) out.push_back({z, flux_linkage(magnet, layout, z, options)});
  return out;
}

}  // namespace veh::mag
