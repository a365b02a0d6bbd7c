#pragma once

#include <optional>
#include <vector>

#include "veh/device.hpp"

namespace veh::hb {

// First-harmonic balance of the base-excited Duffing electromechanical model.
// With u = Z^2 the amplitude equation
//   ((k - m w^2 + (3/4) k_cub u)^2 + (c_total w)^2) u = (m Y0 w^2)^2
// is a cubic in u with one or three positive roots. Damping is the constant
// c_p + c_e model; amplitude-dependent damping (gamma_sat) is outside the
// first-harmonic closure and is ignored here.

enum class Stability { stable, unstable };

struct Root {
  double amplitude;  // m
  Stability stability;
};

// Roots ascending by amplitude. With three roots the middle one is the saddle
// branch (classic single-well stiffening result, cross-checked against the
// time-domain integrator rather than Floquet analysis).
std::vector<Root> response_amplitudes(const DeviceParams& device, double y0, double f);

struct ResponsePoint {
  double f;  // Hz
  std::vector<Root> roots;
};

struct FrequencyResponse {
  std::vector<ResponsePoint> points;
};

// Grid evaluation, parallel over frequencies (each point independent, results
// stored by index, so output is identical to the serial reference).
FrequencyResponse frequency_response(const DeviceParams& device, double y0,
                                     const std::vector<double>& f_grid);

namespace serial {
FrequencyResponse frequency_response(const DeviceParams& device, double y0,
                                     const std::vector<double>& f_grid);
}

// Peak-response locus f_peak(Z) = (1/2pi) sqrt((k_lin + (3/4) k_cub Z^2)/m).
double backbone_frequency(const ResonatorParams& resonator, double z_amp);

struct BackbonePoint {
  double z_amp;   // m
  double f_peak;  // Hz
};
std::vector<BackbonePoint> backbone(const ResonatorParams& resonator,
                                    const std::vector<double>& z_grid);

// Saddle-node frequencies bracketing the bistable band, located where the
// cubic discriminant crosses zero and bisected to 1e-3 Hz. Named by sweep
// direction: f_jump_up is where an up sweep leaves the high branch (upper
// edge), f_jump_down is where a down sweep leaves the low branch (lower
// edge), so f_jump_up >= f_jump_down whenever both exist. Absent when the
// response is single-valued everywhere.
struct JumpFrequencies {
  std::optional<double> f_jump_up;
  std::optional<double> f_jump_down;
  std::string diagnostics;
};

JumpFrequencies jump_frequencies(const DeviceParams& device, double y0);

namespace detail {
// Coefficients of the cubic in u at one frequency.
struct AmplitudeCubic {
  double a, b, c, d;
};
AmplitudeCubic amplitude_cubic(const DeviceParams& device, double y0, double w);
}  // namespace detail

}  // namespace veh::hb
