#pragma once

#include <stdexcept>
#include <string>

namespace veh {

// Thrown when a parameter violates its documented invariant.
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a model computation cannot complete (integration blow-up,
// non-convergent quadrature, infeasible calibration, degenerate fit).
class model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Movable proof-mass magnet. The magnet sits centered over the coil with its
// bottom face a rest distance gap_z0 above the coil plane (z = 0).
struct MagnetSpec {
  double side_a;     // m
  double side_b;     // m
  double thickness;  // m
  double remanence;  // T
  double density;    // kg/m^3
  double gap_z0;     // m, coil plane to bottom face at rest

  MagnetSpec(double side_a, double side_b, double thickness, double remanence,
             double density, double gap_z0);

  double volume() const { return side_a * side_b * thickness; }
  double mass() const { return volume() * density; }

  // 7x7 mm^2 square magnet, 2 mm thick sintered NdFeB (Br 1.2 T, 7500 kg/m^3),
  // 0.5 mm rest gap.
  static MagnetSpec square_default();
};

// Planar square-spiral micro-coil.
struct CoilSpec {
  int n_turns;
  double track_width;       // m
  double track_thickness;   // m
  double track_separation;  // m
  double outer_side;        // m
  double resistivity;       // ohm m

  CoilSpec(int n_turns, double track_width, double track_thickness,
           double track_separation, double outer_side, double resistivity);

  double pitch() const { return track_width + track_separation; }

  // 52 turns of 15 um thick electroplated Cu, 20 um wide tracks with 15 um
  // separation on a 10 mm outer side.
  static CoilSpec planar_default();
};

// Lumped mechanical resonator: m z'' + c z' + k_lin z + k_cub z^3 = forcing.
// gamma_sat > 0 adds amplitude-dependent parasitic damping
// c_p (1 + gamma_sat z^2), a phenomenological saturation term (default off).
struct ResonatorParams {
  double mass;       // kg
  double k_lin;      // N/m
  double k_cub;      // N/m^3, >= 0 (stiffening)
  double zeta_p;     // parasitic damping ratio
  double gamma_sat;  // 1/m^2

  ResonatorParams(double mass, double k_lin, double k_cub, double zeta_p,
                  double gamma_sat = 0.0);
};

// Harmonic base displacement y(t) = Y0 sin(w t).
struct Excitation {
  double amplitude_y0;  // m
  double frequency_hz;  // Hz

  Excitation(double amplitude_y0, double frequency_hz);
};

struct ElectricalLoad {
  double r_load;  // ohm

  explicit ElectricalLoad(double r_load);
};

// Complete electromechanical parameter set shared by the other modules.
// coupling_k is the transduction coefficient dPhi/dz; it can be computed from
// the magnet/coil geometry or supplied directly (e.g. from a fit). Same for
// r_coil. Coil inductance is excluded: at kHz frequencies the reactance of a
// planar micro-coil is negligible against its ~100 ohm resistance.
struct DeviceParams {
  ResonatorParams resonator;
  MagnetSpec magnet;
  CoilSpec coil;
  ElectricalLoad load;
  double coupling_k;     // V s/m
  double r_coil;         // ohm
  double device_volume;  // m^3

  DeviceParams(ResonatorParams resonator, MagnetSpec magnet, CoilSpec coil,
               ElectricalLoad load, double coupling_k, double r_coil,
               double device_volume);
};

// f_n = (1/2pi) sqrt(k_lin / m)
double natural_frequency(const ResonatorParams& resonator);

struct DampingCoefficients {
  double c_p;         // N s/m, parasitic
  double c_e;         // N s/m, electrical back-reaction K^2/(R_c + R_L)
  double zeta_total;  // zeta_p + c_e / (2 m w_n)
};

DampingCoefficients damping_coefficients(const ResonatorParams& resonator,
                                         double coupling_k, double r_coil,
                                         double r_load);

namespace detail {
void require(bool ok, const std::string& message);
}

}  // namespace veh
