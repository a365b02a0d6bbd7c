#pragma once

#include <optional>
#include <vector>

#include "veh/device.hpp"

namespace veh::dyn {

// Proof-mass state in the frame of the vibrating base; z is the relative
// magnet displacement.
struct State {
  double z;  // m
  double v;  // m/s
  double t;  // s
};

struct Derivative {
  double dz_dt;
  double dv_dt;
};

// m v' = -(c_p (1 + gamma_sat z^2) + c_e) v - k_lin z - k_cub z^3
//        + m Y0 w^2 sin(w t)
Derivative ode_rhs(const State& state, const DeviceParams& device,
                   const Excitation& excitation);

struct Trajectory {
  std::vector<State> samples;
  double sample_dt;  // s
};

// Classic explicit fourth-order one-step integration at fixed dt. Requires
// dt <= 1/(50 f); non-finite states abort with the offending step identified.
Trajectory integrate(const DeviceParams& device, const Excitation& excitation,
                     double duration, double dt, State initial = {0.0, 0.0, 0.0});

struct AmplitudeEstimate {
  double amplitude;  // m, half peak-to-peak of the retained window
  bool settled;      // false if the last two cycles still differ by > 1%
};

// Discards the leading settle_fraction of the trajectory; the retained window
// must span at least 50 forcing cycles.
AmplitudeEstimate steady_state_amplitude(const Trajectory& trajectory,
                                         double forcing_hz,
                                         double settle_fraction = 0.5);

enum class SweepDirection { up, down };

struct SweepSpec {
  double f_start;            // Hz
  double f_end;              // Hz
  double rate;               // Hz/s, > 0
  SweepDirection direction;  // must match the f_start/f_end ordering
  double excitation_y0;      // m
  double bin_width = 0.5;    // Hz
  double steps_per_cycle = 200.0;
};

struct SweepBin {
  double f;          // Hz, bin center
  double z_amp;      // m, half peak-to-peak of the bin
  double v_out_rms;  // V across the load
};

// Ordered in sweep direction; only fully traversed bins are reported.
struct SweepResult {
  std::vector<SweepBin> bins;
  SweepSpec spec;
};

// Quasi-static directional sweep with continuous phase accumulation
// phi(t) = 2 pi (f_start t +- rate t^2 / 2); the state carries between bins so
// branch memory survives. The rate must keep the frequency change below 0.1%
// per forcing cycle.
SweepResult sweep(const DeviceParams& device, const SweepSpec& spec);

// Independent sweeps run concurrently, results in input order.
std::vector<SweepResult> sweep_batch(const DeviceParams& device,
                                     const std::vector<SweepSpec>& specs);

namespace serial {
std::vector<SweepResult> sweep_batch(const DeviceParams& device,
                                     const std::vector<SweepSpec>& specs);
}

struct HysteresisMetrics {
  double f_peak_up;    // Hz
  double f_peak_down;  // Hz
  std::optional<double> jump_up_f;    // discontinuity seen while sweeping up
  std::optional<double> jump_down_f;  // discontinuity seen while sweeping down
  double width_hz;                    // f_peak_up - f_peak_down
  double v_peak_up;                   // V
  double v_peak_down;                 // V
  int jump_count_up;                  // discontinuities above threshold
  int jump_count_down;
};

// Jump frequencies sit at the largest single-bin amplitude discontinuity of
// each sweep; a jump is reported absent when no discontinuity exceeds a
// quarter of the sweep's amplitude range (linear devices).
HysteresisMetrics hysteresis_metrics(const SweepResult& up, const SweepResult& down);

}  // namespace veh::dyn
