#pragma once

#include <vector>

#include "veh/device.hpp"

namespace veh::mag {

struct CoilTurn {
  double side_length;  // m
  double z_plane;      // m
};

// Concrete square-spiral realization of a CoilSpec. Turns are listed from the
// outermost inward; neighboring sides shrink by 2 x pitch. For flux purposes
// each turn is a filament at its centerline; the track cross section only
// enters the resistance.
struct CoilLayout {
  std::vector<CoilTurn> turns;
  double track_cross_section;  // m^2
  double total_track_length;   // m
};

CoilLayout build_layout(const CoilSpec& coil);

// R = rho L / A over the full spiral.
double coil_resistance(const CoilLayout& layout, double resistivity);

struct Point3 {
  double x, y, z;  // m, coil plane at z = 0, magnet centered on the z axis
};

// z component of B outside a uniformly magnetized cuboid, surface-charge
// model: two charged rectangular faces +-M at the magnet top/bottom. The
// magnet occupies |x| <= a/2, |y| <= b/2, gap_z0 <= z <= gap_z0 + thickness.
double magnet_bz(const MagnetSpec& magnet, const Point3& point);

struct FluxSample {
  double z_gap;         // m
  double flux_linkage;  // Wb, summed over all turns
};

struct QuadratureOptions {
  double rel_tol = 1e-4;  // refinement stop on relative change of the total
  int base_panels = 4;    // panels per side at the first level
  int max_levels = 7;     // panel count doubles per level
};

// Total flux linkage of the spiral with the magnet bottom face at z_gap above
// the coil plane. Fixed-order Gauss panels per enclosed square, panel count
// doubled until the total changes by less than rel_tol. Parallel over turns;
// per-turn partial sums are combined in turn order, so results are identical
// to the serial reference bit for bit.
double flux_linkage(const MagnetSpec& magnet, const CoilLayout& layout, double z_gap,
                    const QuadratureOptions& options = {});

// K = dPhi/dz by central difference (Phi(z-h) - Phi(z+h))/(2h), h halved from
// z_gap/8 until two estimates agree to 0.1%. Positive for a +z magnetized
// magnet above the coil.
double transduction_coefficient(const MagnetSpec& magnet, const CoilLayout& layout,
                                double z_gap);

std::vector<FluxSample> flux_scan(const MagnetSpec& magnet, const CoilLayout& layout,
                                  const std::vector<double>& z_gaps,
                                  const QuadratureOptions& options = {});

// Plain single-thread reference implementations used by the tests and the
// benchmark to validate the parallel kernels.
namespace serial {
double flux_linkage(const MagnetSpec& magnet, const CoilLayout& layout, double z_gap,
                    const QuadratureOptions& options = {});
}

namespace detail {
// Signed-remanence cuboid field, faces at z_bottom/z_top; used by the flux
// kernels and directly testable (polarity flip, symmetry).
double cuboid_bz(double side_a, double side_b, double z_bottom, double z_top,
                 double remanence, double x, double y, double z);
// One turn integrated with panels x panels Gauss-Legendre 8 point tensor rule.
double turn_flux(const MagnetSpec& magnet, double side, double z_plane, double z_gap,
                 int panels);
}  // namespace detail

}  // namespace veh::mag
