#include "veh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace veh::dyn {

namespace {

struct OdeCoeffs {
  double c_p, c_e, k_lin, k_cub, gamma_sat, mass, inv_mass, y0;
};

OdeCoeffs make_coeffs(const DeviceParams& device, double y0) {
  const auto damping = damping_coefficients(device.resonator, device.coupling_k,
                                            device.r_coil, device.load.r_load);
  return OdeCoeffs{damping.c_p,
                   damping.c_e,
                   device.resonator.k_lin,
                   device.resonator.k_cub,
                   device.resonator.gamma_sat,
                   device.resonator.mass,
                   1.0 / device.resonator.mass,
                   y0};
}

inline double accel(const OdeCoeffs& c, double z, double v, double w, double phase) {
  const double damp = c.c_p * (1.0 + c.gamma_sat * z * z) + c.c_e;
  return (-damp * v - c.k_lin * z - c.k_cub * z * z * z +
          c.mass * c.y0 * w * w * std::sin(phase)) *
         c.inv_mass;
}

// One RK4 step; phase and angular frequency are supplied per stage so both
// fixed-frequency and swept forcing share the kernel.
template <typename PhaseFn>
inline void rk4_step(const OdeCoeffs& c, double& z, double& v, double t, double dt,
                     const PhaseFn& phase_at) {
  const auto [p1, w1] = phase_at(t);
  const auto [p2, w2] = phase_at(t + 0.5 * dt);
  const auto [p3, w3] = phase_at(t + dt);

  const double k1z = v;
  const double k1v = accel(c, z, v, w1, p1);
  const double k2z = v + 0.5 * dt * k1v;
  const double k2v = accel(c, z + 0.5 * dt * k1z, v + 0.5 * dt * k1v, w2, p2);
  const double k3z = v + 0.5 * dt * k2v;
  const double k3v = accel(c, z + 0.5 * dt * k2z, v + 0.5 * dt * k2v, w2, p2);
  const double k4z = v + dt * k3v;
  const double k4v = accel(c, z + dt * k3z, v + dt * k3v, w3, p3);

  z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
  v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

[[noreturn]] void throw_blowup(long step, double t, double f) {
  std::ostringstream msg;
  msg << "integration blew up (non-finite state) at step " << step << ", t=" << t
      << " s, forcing frequency " << f << " Hz";
  throw model_error(msg.str());
}

}  // namespace

Derivative ode_rhs(const State& state, const DeviceParams& device,
                   const Excitation& excitation) {
  const auto c = make_coeffs(device, excitation.amplitude_y0);
  const double w = 2.0 * M_PI * excitation.frequency_hz;
  return Derivative{state.v, accel(c, state.z, state.v, w, w * state.t)};
}

Trajectory integrate(const DeviceParams& device, const Excitation& excitation,
                     double duration, double dt, State initial) {
  veh::detail::require(std::isfinite(duration) && duration > 0,
                       "integrate: duration must be finite and > 0");
  veh::detail::require(std::isfinite(dt) && dt > 0, "integrate: dt must be finite and > 0");
  veh::detail::require(dt <= 1.0 / (50.0 * excitation.frequency_hz),
                       "integrate: dt must resolve the forcing, dt <= 1/(50 f)");

  const auto c = make_coeffs(device, excitation.amplitude_y0);
  const double w = 2.0 * M_PI * excitation.frequency_hz;
  auto phase_at = [&](double t) { return std::pair<double, double>{w * t, w}; };

  const long n_steps = static_cast<long>(std::ceil(duration / dt));
  Trajectory traj;
  traj.sample_dt = dt;
  traj.samples.reserve(n_steps + 1);
  double z = initial.z, v = initial.v;
  const double t0 = initial.t;
  traj.samples.push_back({z, v, t0});
  for (long i = 0; i < n_steps; ++i) {
    const double t = t0 + i * dt;
    rk4_step(c, z, v, t, dt, phase_at);
    if (!std::isfinite(z) || !std::isfinite(v)) {
      throw_blowup(i + 1, t + dt, excitation.frequency_hz);
    }
    traj.samples.push_back({z, v, t + dt});
  }
  return traj;
}

AmplitudeEstimate steady_state_amplitude(const Trajectory& trajectory,
                                         double forcing_hz, double settle_fraction) {
  veh::detail::require(std::isfinite(forcing_hz) && forcing_hz > 0,
                       "steady_state_amplitude: forcing_hz must be > 0");
  veh::detail::require(settle_fraction >= 0 && settle_fraction < 1,
                       "steady_state_amplitude: settle_fraction must be in [0, 1)");
  const auto& s = trajectory.samples;
  veh::detail::require(!s.empty() && trajectory.sample_dt > 0,
                       "steady_state_amplitude: empty trajectory");

  const size_t start = static_cast<size_t>(std::floor(s.size() * settle_fraction));
  const double window_span = (s.size() - start) * trajectory.sample_dt;
  veh::detail::require(window_span >= 50.0 / forcing_hz,
                       "steady_state_amplitude: retained window shorter than 50 cycles");

  double lo = s[start].z, hi = s[start].z;
  for (size_t i = start; i < s.size(); ++i) {
    lo = std::min(lo, s[i].z);
    hi = std::max(hi, s[i].z);
  }
  AmplitudeEstimate est;
  est.amplitude = (hi - lo) / 2.0;

  // Compare the half peak-to-peak of the last cycle with the one before it.
  const size_t per_cycle =
      std::max<size_t>(2, static_cast<size_t>(std::llround(1.0 / (forcing_hz * trajectory.sample_dt))));
  auto window_amp = [&](size_t begin, size_t end) {
    double wlo = s[begin].z, whi = s[begin].z;
    for (size_t i = begin; i < end; ++i) {
      wlo = std::min(wlo, s[i].z);
      whi = std::max(whi, s[i].z);
    }
    return (whi - wlo) / 2.0;
  };
  if (s.size() >= 2 * per_cycle) {
    const double a_last = window_amp(s.size() - per_cycle, s.size());
    const double a_prev = window_amp(s.size() - 2 * per_cycle, s.size() - per_cycle);
    const double scale = std::max({a_last, a_prev, 1e-300});
    est.settled = std::abs(a_last - a_prev) <= 0.01 * scale;
  } else {
    est.settled = false;
  }
  return est;
}

SweepResult sweep(const DeviceParams& device, const SweepSpec& spec) {
  veh::detail::require(std::isfinite(spec.f_start) && spec.f_start > 0 &&
                           std::isfinite(spec.f_end) && spec.f_end > 0,
                       "sweep: frequencies must be finite and > 0");
  veh::detail::require(spec.f_start != spec.f_end, "sweep: degenerate range, f_start == f_end");
  const bool ascending = spec.f_end > spec.f_start;
  veh::detail::require(ascending == (spec.direction == SweepDirection::up),
                       "sweep: direction inconsistent with f_start/f_end ordering");
  veh::detail::require(std::isfinite(spec.rate) && spec.rate > 0, "sweep: rate must be > 0");
  veh::detail::require(std::isfinite(spec.excitation_y0) && spec.excitation_y0 >= 0,
                       "sweep: excitation_y0 must be >= 0");
  veh::detail::require(spec.bin_width > 0, "sweep: bin_width must be > 0");

  const double f_min = std::min(spec.f_start, spec.f_end);
  const double f_max = std::max(spec.f_start, spec.f_end);
  // Quasi-static contract: frequency moves < 0.1% of f per forcing cycle.
  veh::detail::require(spec.rate <= 1e-3 * f_min * f_min,
                       "sweep: rate too fast for the quasi-static contract");

  const double span = f_max - f_min;
  const int n_bins = static_cast<int>(std::floor(span / spec.bin_width + 1e-9));
  veh::detail::require(n_bins >= 1, "sweep: range narrower than one bin");

  const double dir = ascending ? 1.0 : -1.0;
  const double dt = 1.0 / (spec.steps_per_cycle * f_max);
  const double duration = span / spec.rate;
  const long n_steps = static_cast<long>(std::ceil(duration / dt));

  const auto c = make_coeffs(device, spec.excitation_y0);
  auto phase_at = [&](double t) {
    const double f = spec.f_start + dir * spec.rate * t;
    const double phase = 2.0 * M_PI * (spec.f_start * t + 0.5 * dir * spec.rate * t * t);
    return std::pair<double, double>{phase, 2.0 * M_PI * f};
  };
  const double divider = device.load.r_load / (device.r_coil + device.load.r_load);
  const double v_gain = device.coupling_k * divider;

  std::vector<double> z_lo(n_bins, 0.0), z_hi(n_bins, 0.0), v_sq(n_bins, 0.0);
  std::vector<long> count(n_bins, 0);

  double z = 0.0, v = 0.0;
  for (long i = 0; i < n_steps; ++i) {
    const double t = i * dt;
    rk4_step(c, z, v, t, dt, phase_at);
    if (!std::isfinite(z) || !std::isfinite(v)) {
      throw_blowup(i + 1, t + dt, spec.f_start + dir * spec.rate * (t + dt));
    }
    const double f_now = spec.f_start + dir * spec.rate * (t + dt);
    const int bin = static_cast<int>(std::floor(dir * (f_now - spec.f_start) / spec.bin_width));
    if (bin >= 0 && bin < n_bins) {
      if (count[bin] == 0) {
        z_lo[bin] = z_hi[bin] = z;
      } else {
        z_lo[bin] = std::min(z_lo[bin], z);
        z_hi[bin] = std::max(z_hi[bin], z);
      }
      const double v_out = v_gain * v;
      v_sq[bin] += v_out * v_out;
      ++count[bin];
    }
  }

  SweepResult result;
  result.spec = spec;
  result.bins.reserve(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    SweepBin bin;
    bin.f = spec.f_start + dir * (b + 0.5) * spec.bin_width;
    bin.z_amp = count[b] > 0 ? (z_hi[b] - z_lo[b]) / 2.0 : 0.0;
    bin.v_out_rms = count[b] > 0 ? std::sqrt(v_sq[b] / count[b]) : 0.0;
    result.bins.push_back(bin);
  }
  return result;
}

namespace {

std::vector<SweepResult> sweep_batch_impl(const DeviceParams& device,
                                          const std::vector<SweepSpec>& specs,
                                          bool parallel) {
  std::vector<SweepResult> out(specs.size());
  const int n = static_cast<int>(specs.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) out[i] = sweep(device, specs[i]);
  } else {
    for (int i = 0; i < n; ++i) out[i] = sweep(device, specs[i]);
  }
  return out;
}

}  // namespace

std::vector<SweepResult> sweep_batch(const DeviceParams& device,
                                     const std::vector<SweepSpec>& specs) {
  return sweep_batch_impl(device, specs, true);
}

namespace serial {
std::vector<SweepResult> sweep_batch(const DeviceParams& device,
                                     const std::vector<SweepSpec>& specs) {
  return sweep_batch_impl(device, specs, false);
}
}  // namespace serial

namespace {

struct JumpScan {
  std::optional<double> f_jump;
  int count;
};

JumpScan scan_jumps(const SweepResult& r) {
  JumpScan out{std::nullopt, 0};
  if (r.bins.size() < 2) return out;
  double amp_lo = r.bins[0].z_amp, amp_hi = r.bins[0].z_amp;
  for (const auto& b : r.bins) {
    amp_lo = std::min(amp_lo, b.z_amp);
    amp_hi = std::max(amp_hi, b.z_amp);
  }
  const double threshold = 0.25 * (amp_hi - amp_lo);
  double best = -1.0;
  for (size_t i = 0; i + 1 < r.bins.size(); ++i) {
    const double delta = std::abs(r.bins[i + 1].z_amp - r.bins[i].z_amp);
    if (threshold > 0.0 && delta > threshold) ++out.count;
    if (delta > best) {
      best = delta;
      if (threshold > 0.0 && delta > threshold) {
        out.f_jump = 0.5 * (r.bins[i].f + r.bins[i + 1].f);
      }
    }
  }
  return out;
}

}  // namespace

HysteresisMetrics hysteresis_metrics(const SweepResult& up, const SweepResult& down) {
  veh::detail::require(up.spec.direction == SweepDirection::up &&
                           down.spec.direction == SweepDirection::down,
                       "hysteresis_metrics: expects one up sweep and one down sweep");
  veh::detail::require(!up.bins.empty() && !down.bins.empty(),
                       "hysteresis_metrics: empty sweep result");
  const double up_lo = up.bins.front().f, up_hi = up.bins.back().f;
  const double dn_hi = down.bins.front().f, dn_lo = down.bins.back().f;
  veh::detail::require(std::max(up_lo, dn_lo) < std::min(up_hi, dn_hi),
                       "hysteresis_metrics: sweeps do not overlap in frequency");

  auto peak = [](const SweepResult& r) {
    size_t best = 0;
    for (size_t i = 1; i < r.bins.size(); ++i) {
      if (r.bins[i].z_amp > r.bins[best].z_amp) best = i;
    }
    return best;
  };

  const size_t pu = peak(up);
  const size_t pd = peak(down);
  const auto ju = scan_jumps(up);
  const auto jd = scan_jumps(down);

  HysteresisMetrics m;
  m.f_peak_up = up.bins[pu].f;
  m.f_peak_down = down.bins[pd].f;
  m.jump_up_f = ju.f_jump;
  m.jump_down_f = jd.f_jump;
  m.width_hz = m.f_peak_up - m.f_peak_down;
  m.v_peak_up = up.bins[pu].v_out_rms;
  m.v_peak_down = down.bins[pd].v_out_rms;
  m.jump_count_up = ju.count;
  m.jump_count_down = jd.count;
  return m;
}

}  // namespace veh::dyn
