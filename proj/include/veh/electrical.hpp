#pragma once

#include <string>
#include <vector>

#include "veh/device.hpp"

namespace veh::elec {

struct OperatingPoint {
  double f;       // Hz
  double y0;      // m
  double r_load;  // ohm
  double z_amp;   // m
  double v_rms;   // V
  double p_load;  // W
};

enum class Branch { up_sweep, down_sweep };

// v_rms = (K z_amp w / sqrt 2) R_L / (R_c + R_L), steady sinusoidal response.
double output_voltage(const DeviceParams& device, double z_amp, double f);

// Fixed-frequency operating point: amplitude from the harmonic-balance root
// on the selected branch (largest stable root in the up-sweep convention),
// with the electrical damping of the device load folded in.
OperatingPoint operating_point(const DeviceParams& device, const Excitation& excitation,
                               Branch branch = Branch::up_sweep);

// Resonance-tracked peak: amplitude and frequency solve Z = m Y0 w / c_total
// on the peak locus w^2 = (k_lin + (3/4) k_cub Z^2)/m, the operating point of
// a measurement that follows the response maximum at each load.
struct TrackedPeak {
  double f_peak;  // Hz
  double z_amp;   // m
  double v_rms;   // V
  double p_load;  // W
};
TrackedPeak tracked_peak(const DeviceParams& device, double y0, double r_load);

enum class LoadModel { fixed_frequency, tracked_resonance };

struct OptimalLoad {
  double r_opt;  // ohm
  double p_max;  // W
  bool unimodal_prescan;  // false means the dense-grid fallback was used
};

// Golden-section maximization of delivered power over log r_load, after a
// coarse pre-scan that checks unimodality. r_range must span >= 3 decades.
OptimalLoad optimal_load(const DeviceParams& device, const Excitation& excitation,
                         double r_min, double r_max,
                         LoadModel model = LoadModel::fixed_frequency,
                         Branch branch = Branch::up_sweep);

// NPD = p / (volume_cm3 a_g^2) with a_g = Y0 (2 pi f)^2 / 9.81, in W/cm^3/g^2.
double normalized_power_density(double p_w, double volume_m3, double y0_m, double f_hz);

struct ScalingPoint {
  double s;           // linear scale factor
  double f_res;       // Hz, scaled natural frequency
  double y0;          // m, amplitude holding the base acceleration
  double coupling_k;  // V s/m, recomputed from the scaled geometry
  double r_coil;      // ohm
  double r_opt;       // ohm
  double p_max;       // W
  double npd;         // W/cm^3/g^2
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double exponent;   // log-log slope of NPD versus s
  double r_squared;  // fit quality
  std::vector<std::string> assumptions;
};

// Scales all linear dimensions by s (magnet, coil, gap), holds the base
// acceleration, operates each scaled device at its own resonance-tracked
// peak, and fits the power-density exponent in log-log. Stiffness follows
// k_lin ~ s and mass ~ s^3 (constant material strain); k_cub ~ 1/s^3 keeps
// the relative stiffening fixed.
ScalingReport scaling_study(const DeviceParams& base, const Excitation& excitation,
                            const std::vector<double>& s_list);

struct ThicknessPoint {
  double t;       // m
  double r_coil;  // ohm
  double r_opt;   // ohm
  double p_max;   // W
};

// Power projection against coil track thickness: the layout (and hence the
// transduction coefficient) is unchanged, only the series resistance drops.
std::vector<ThicknessPoint> thickness_projection(const DeviceParams& device,
                                                 const Excitation& excitation,
                                                 const std::vector<double>& t_list);

}  // namespace veh::elec
