#include "veh/harmonic_balance.hpp"

#include <algorithm>
#include <cmath>

#include "veh/numerics.hpp"

namespace veh::hb {

namespace detail {

AmplitudeCubic amplitude_cubic(const DeviceParams& device, double y0, double w) {
  const auto& res = device.resonator;
  const auto damping = damping_coefficients(res, device.coupling_k, device.r_coil,
                                            device.load.r_load);
  const double c_total = damping.c_p + damping.c_e;
  const double detune = res.k_lin - res.mass * w * w;
  const double force = res.mass * y0 * w * w;
  AmplitudeCubic q;
  q.a = 9.0 / 16.0 * res.k_cub * res.k_cub;
  q.b = 1.5 * res.k_cub * detune;
  q.c = detune * detune + c_total * w * c_total * w;
  q.d = -force * force;
  return q;
}

}  // namespace detail

std::vector<Root> response_amplitudes(const DeviceParams& device, double y0, double f) {
  veh::detail::require(std::isfinite(y0) && y0 >= 0,
                       "response_amplitudes: y0 must be finite and >= 0");
  veh::detail::require(std::isfinite(f) && f > 0,
                       "response_amplitudes: f must be finite and > 0");
  const double w = 2.0 * M_PI * f;
  const auto q = detail::amplitude_cubic(device, y0, w);

  std::vector<double> us;
  if (device.resonator.k_cub == 0.0) {
    // linear closed form, u c = -d
    us.push_back(-q.d / q.c);
  } else if (y0 == 0.0) {
    us.push_back(0.0);
  } else {
    for (double u : num::cubic_real_roots(q.a, q.b, q.c, q.d)) {
      if (u > 0.0 && std::isfinite(u)) us.push_back(u);
    }
  }
  std::sort(us.begin(), us.end());

  std::vector<Root> roots;
  roots.reserve(us.size());
  for (size_t i = 0; i < us.size(); ++i) {
    const Stability s = (us.size() == 3 && i == 1) ? Stability::unstable
                                                   : Stability::stable;
    roots.push_back({std::sqrt(us[i]), s});
  }
  return roots;
}

namespace {

FrequencyResponse frequency_response_impl(const DeviceParams& device, double y0,
                                          const std::vector<double>& f_grid,
                                          bool parallel) {
  FrequencyResponse out;
  out.points.resize(f_grid.size());
  const int n = static_cast<int>(f_grid.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      out.points[i] = {f_grid[i], response_amplitudes(device, y0, f_grid[i])};
    }
  } else {
    for (int i = 0; i < n; ++i) {
      out.points[i] = {f_grid[i], response_amplitudes(device, y0, f_grid[i])};
    }
  }
  return out;
}

}  // namespace

FrequencyResponse frequency_response(const DeviceParams& device, double y0,
                                     const std::vector<double>& f_grid) {
  return frequency_response_impl(device, y0, f_grid, true);
}

namespace serial {
FrequencyResponse frequency_response(const DeviceParams& device, double y0,
                                     const std::vector<double>& f_grid) {
  return frequency_response_impl(device, y0, f_grid, false);
}
}  // namespace serial

double backbone_frequency(const ResonatorParams& resonator, double z_amp) {
  veh::detail::require(std::isfinite(z_amp) && z_amp >= 0,
                       "backbone_frequency: z_amp must be finite and >= 0");
  const double k_eff = resonator.k_lin + 0.75 * resonator.k_cub * z_amp * z_amp;
  return std::sqrt(k_eff / resonator.mass) / (2.0 * M_PI);
}

std::vector<BackbonePoint> backbone(const ResonatorParams& resonator,
                                    const std::vector<double>& z_grid) {
  std::vector<BackbonePoint> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) out.push_back({z, backbone_frequency(resonator, z)});
  return out;
}

JumpFrequencies jump_frequencies(const DeviceParams& device, double y0) {
  JumpFrequencies jumps;
  const auto& res = device.resonator;
  if (res.k_cub == 0.0 || y0 == 0.0) {
    jumps.diagnostics = "response single-valued (no cubic stiffness or no forcing)";
    return jumps;
  }

  auto disc = [&](double f) {
    const auto q = detail::amplitude_cubic(device, y0, 2.0 * M_PI * f);
    return num::cubic_discriminant(q.a, q.b, q.c, q.d);
  };

  // Scan from well below resonance to past the peak-response locus. The upper
  // limit follows the backbone at the amplitude cap m y0 w / c_total.
  const double f_n = natural_frequency(res);
  const auto damping = damping_coefficients(res, device.coupling_k, device.r_coil,
                                            device.load.r_load);
  const double c_total = damping.c_p + damping.c_e;
  double z_cap = res.mass * y0 * 2.0 * M_PI * f_n / c_total;
  for (int i = 0; i < 64; ++i) {
    z_cap = res.mass * y0 * 2.0 * M_PI * backbone_frequency(res, z_cap) / c_total;
  }
  const double f_lo = 0.3 * f_n;
  const double f_hi = 1.2 * backbone_frequency(res, z_cap);

  const int n_scan = 2000;
  std::vector<double> crossings;
  double prev_f = f_lo;
  double prev_d = disc(prev_f);
  for (int i = 1; i <= n_scan; ++i) {
    const double f = f_lo + (f_hi - f_lo) * i / n_scan;
    const double d = disc(f);
    if ((prev_d <= 0.0) != (d <= 0.0)) {
      crossings.push_back(num::bisect_root(disc, prev_f, f, 1e-3));
    }
    prev_f = f;
    prev_d = d;
  }

  if (crossings.empty()) {
    jumps.diagnostics = "no discriminant sign change over [" + std::to_string(f_lo) +
                        ", " + std::to_string(f_hi) + "] Hz (sub-critical forcing)";
    return jumps;
  }
  if (crossings.size() == 1) {
    jumps.diagnostics = "single discriminant crossing, bracket failure";
    return jumps;
  }
  jumps.f_jump_down = crossings.front();
  jumps.f_jump_up = crossings.back();
  jumps.diagnostics = "bistable band located";
  return jumps;
}

}  // namespace veh::hb
