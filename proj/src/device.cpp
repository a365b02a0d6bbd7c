#include "veh/device.hpp"

#include <cmath>

namespace veh {

namespace detail {

void require(bool ok, const std::string& message) {
  if (!ok) throw invalid_parameter(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace detail

using detail::finite;
using detail::require;

MagnetSpec::MagnetSpec(double side_a_, double side_b_, double thickness_,
                       double remanence_, double density_, double gap_z0_)
    : side_a(side_a_),
      side_b(side_b_),
      thickness(thickness_),
      remanence(remanence_),
      density(density_),
      gap_z0(gap_z0_) {
  require(finite(side_a) && side_a > 0, "MagnetSpec: side_a must be finite and > 0");
  require(finite(side_b) && side_b > 0, "MagnetSpec: side_b must be finite and > 0");
  require(finite(thickness) && thickness > 0,
          "MagnetSpec: thickness must be finite and > 0");
  require(finite(remanence) && remanence > 0,
          "MagnetSpec: remanence must be finite and > 0");
  require(finite(density) && density > 0,
          "MagnetSpec: density must be finite and > 0");
  require(finite(gap_z0) && gap_z0 > 0, "MagnetSpec: gap_z0 must be finite and > 0");
}

MagnetSpec MagnetSpec::square_default() {
  return MagnetSpec(7e-3, 7e-3, 2e-3, 1.2, 7500.0, 0.5e-3);
}

CoilSpec::CoilSpec(int n_turns_, double track_width_, double track_thickness_,
                   double track_separation_, double outer_side_, double resistivity_)
    : n_turns(n_turns_),
      track_width(track_width_),
      track_thickness(track_thickness_),
      track_separation(track_separation_),
      outer_side(outer_side_),
      resistivity(resistivity_) {
  require(n_turns >= 1, "CoilSpec: n_turns must be >= 1");
  require(finite(track_width) && track_width > 0,
          "CoilSpec: track_width must be finite and > 0");
  require(finite(track_thickness) && track_thickness > 0,
          "CoilSpec: track_thickness must be finite and > 0");
  require(finite(track_separation) && track_separation > 0,
          "CoilSpec: track_separation must be finite and > 0");
  require(finite(outer_side) && outer_side > 0,
          "CoilSpec: outer_side must be finite and > 0");
  require(finite(resistivity) && resistivity > 0,
          "CoilSpec: resistivity must be finite and > 0");
  require(n_turns * pitch() <= outer_side / 2,
          "CoilSpec: spiral does not fit, n_turns*(width+separation) exceeds outer_side/2");
}

CoilSpec CoilSpec::planar_default() {
  return CoilSpec(52, 20e-6, 15e-6, 15e-6, 10e-3, 1.72e-8);
}

ResonatorParams::ResonatorParams(double mass_, double k_lin_, double k_cub_,
                                 double zeta_p_, double gamma_sat_)
    : mass(mass_), k_lin(k_lin_), k_cub(k_cub_), zeta_p(zeta_p_), gamma_sat(gamma_sat_) {
  require(finite(mass) && mass > 0, "ResonatorParams: mass must be finite and > 0");
  require(finite(k_lin) && k_lin > 0, "ResonatorParams: k_lin must be finite and > 0");
  require(finite(k_cub) && k_cub >= 0,
          "ResonatorParams: k_cub must be finite and >= 0 (stiffening only)");
  require(finite(zeta_p) && zeta_p >= 0,
          "ResonatorParams: zeta_p must be finite and >= 0");
  require(finite(gamma_sat) && gamma_sat >= 0,
          "ResonatorParams: gamma_sat must be finite and >= 0");
}

Excitation::Excitation(double amplitude_y0_, double frequency_hz_)
    : amplitude_y0(amplitude_y0_), frequency_hz(frequency_hz_) {
  require(finite(amplitude_y0) && amplitude_y0 >= 0,
          "Excitation: amplitude_y0 must be finite and >= 0");
  require(finite(frequency_hz) && frequency_hz > 0,
          "Excitation: frequency_hz must be finite and > 0");
}

ElectricalLoad::ElectricalLoad(double r_load_) : r_load(r_load_) {
  require(finite(r_load) && r_load > 0, "ElectricalLoad: r_load must be finite and > 0");
}

DeviceParams::DeviceParams(ResonatorParams resonator_, MagnetSpec magnet_,
                           CoilSpec coil_, ElectricalLoad load_, double coupling_k_,
                           double r_coil_, double device_volume_)
    : resonator(resonator_),
      magnet(magnet_),
      coil(coil_),
      load(load_),
      coupling_k(coupling_k_),
      r_coil(r_coil_),
      device_volume(device_volume_) {
  require(finite(coupling_k), "DeviceParams: coupling_k must be finite");
  require(finite(r_coil) && r_coil > 0, "DeviceParams: r_coil must be finite and > 0");
  require(finite(device_volume) && device_volume > 0,
          "DeviceParams: device_volume must be finite and > 0");
}

double natural_frequency(const ResonatorParams& resonator) {
  return std::sqrt(resonator.k_lin / resonator.mass) / (2.0 * M_PI);
}

DampingCoefficients damping_coefficients(const ResonatorParams& resonator,
                                         double coupling_k, double r_coil,
                                         double r_load) {
  require(finite(coupling_k), "damping_coefficients: coupling_k must be finite");
  require(finite(r_coil) && finite(r_load) && r_coil + r_load > 0,
          "damping_coefficients: r_coil + r_load must be > 0");
  const double w_n = 2.0 * M_PI * natural_frequency(resonator);
  DampingCoefficients d;
  d.c_p = 2.0 * resonator.zeta_p * resonator.mass * w_n;
  d.c_e = coupling_k * coupling_k / (r_coil + r_load);
  d.zeta_total = resonator.zeta_p + d.c_e / (2.0 * resonator.mass * w_n);
  return d;
}

}  // namespace veh
