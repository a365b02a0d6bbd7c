#include "veh/electrical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "veh/harmonic_balance.hpp"
#include "veh/magnetics.hpp"
#include "veh/numerics.hpp"

namespace veh::elec {

double output_voltage(const DeviceParams& device, double z_amp, double f) {
  veh::detail::require(std::isfinite(z_amp) && z_amp >= 0,
                       "output_voltage: z_amp must be finite and >= 0");
  veh::detail::require(std::isfinite(f) && f > 0, "output_voltage: f must be > 0");
  const double w = 2.0 * M_PI * f;
  const double divider = device.load.r_load / (device.r_coil + device.load.r_load);
  return device.coupling_k * z_amp * w / std::sqrt(2.0) * divider;
}

OperatingPoint operating_point(const DeviceParams& device, const Excitation& excitation,
                               Branch branch) {
  const auto roots = hb::response_amplitudes(device, excitation.amplitude_y0,
                                             excitation.frequency_hz);
  double z = -1.0;
  for (const auto& r : roots) {
    if (r.stability != hb::Stability::stable) continue;
    if (branch == Branch::up_sweep) {
      z = std::max(z, r.amplitude);
    } else {
      z = z < 0.0 ? r.amplitude : std::min(z, r.amplitude);
    }
  }
  if (z < 0.0) {
    throw model_error("operating_point: no stable response branch at f=" +
                      std::to_string(excitation.frequency_hz) + " Hz");
  }
  OperatingPoint op;
  op.f = excitation.frequency_hz;
  op.y0 = excitation.amplitude_y0;
  op.r_load = device.load.r_load;
  op.z_amp = z;
  op.v_rms = output_voltage(device, z, excitation.frequency_hz);
  op.p_load = op.v_rms * op.v_rms / device.load.r_load;
  return op;
}

TrackedPeak tracked_peak(const DeviceParams& device, double y0, double r_load) {
  veh::detail::require(std::isfinite(y0) && y0 >= 0, "tracked_peak: y0 must be >= 0");
  veh::detail::require(std::isfinite(r_load) && r_load > 0,
                       "tracked_peak: r_load must be > 0");
  const auto& res = device.resonator;
  const auto damping =
      damping_coefficients(res, device.coupling_k, device.r_coil, r_load);
  const double c_total = damping.c_p + damping.c_e;

  // At the peak the detuning vanishes, so Z c_total = m Y0 w(Z) with
  // w(Z)^2 = (k_lin + 0.75 k_cub Z^2)/m. The root exists only while the
  // forcing grows slower than the backbone, i.e. m Y0 dw/dZ < c_total.
  const double slope_inf = y0 * std::sqrt(0.75 * res.k_cub * res.mass);
  if (slope_inf >= c_total) {
    throw model_error(
        "tracked_peak: no finite resonance-tracked amplitude, base excitation "
        "outruns the stiffening backbone");
  }
  auto omega_of = [&](double z) {
    return std::sqrt((res.k_lin + 0.75 * res.k_cub * z * z) / res.mass);
  };
  auto g = [&](double z) { return z * c_total - res.mass * y0 * omega_of(z); };

  TrackedPeak pk;
  if (y0 == 0.0) {
    pk.z_amp = 0.0;
    pk.f_peak = natural_frequency(res);
  } else {
    double hi = res.mass * y0 * omega_of(0.0) / c_total;
    int guard = 0;
    while (g(hi) < 0.0) {
      hi *= 2.0;
      if (++guard > 200) {
        throw model_error("tracked_peak: failed to bracket the peak amplitude");
      }
    }
    const double z = num::bisect_root(g, 0.0, hi, hi * 1e-14);
    pk.z_amp = z;
    pk.f_peak = omega_of(z) / (2.0 * M_PI);
  }

  const double w = 2.0 * M_PI * pk.f_peak;
  const double divider = r_load / (device.r_coil + r_load);
  pk.v_rms = device.coupling_k * pk.z_amp * w / std::sqrt(2.0) * divider;
  pk.p_load = pk.v_rms * pk.v_rms / r_load;
  return pk;
}

namespace {

double power_at_load(const DeviceParams& device, const Excitation& excitation,
                     double r_load, LoadModel model, Branch branch) {
  DeviceParams d = device;
  d.load = ElectricalLoad(r_load);
  if (model == LoadModel::tracked_resonance) {
    return tracked_peak(d, excitation.amplitude_y0, r_load).p_load;
  }
  return operating_point(d, excitation, branch).p_load;
}

}  // namespace

OptimalLoad optimal_load(const DeviceParams& device, const Excitation& excitation,
                         double r_min, double r_max, LoadModel model, Branch branch) {
  veh::detail::require(std::isfinite(r_min) && r_min > 0 && std::isfinite(r_max),
                       "optimal_load: load range must be positive and finite");
  veh::detail::require(r_max / r_min >= 1e3,
                       "optimal_load: r_range must span at least 3 decades");

  auto p_of_logr = [&](double x) {
    return power_at_load(device, excitation, std::exp(x), model, branch);
  };

  const double x_lo = std::log(r_min), x_hi = std::log(r_max);
  const int n_scan = 49;
  std::vector<double> xs(n_scan), ps(n_scan);
  for (int i = 0; i < n_scan; ++i) {
    xs[i] = x_lo + (x_hi - x_lo) * i / (n_scan - 1);
    ps[i] = p_of_logr(xs[i]);
  }
  int arg = 0;
  for (int i = 1; i < n_scan; ++i) {
    if (ps[i] > ps[arg]) arg = i;
  }
  bool unimodal = true;
  for (int i = 1; i < n_scan; ++i) {
    const bool rising = ps[i] >= ps[i - 1] * (1.0 - 1e-12);
    const bool falling = ps[i] <= ps[i - 1] * (1.0 + 1e-12);
    if (i <= arg && !rising) unimodal = false;
    if (i > arg && !falling) unimodal = false;
  }

  OptimalLoad out;
  out.unimodal_prescan = unimodal;
  if (unimodal) {
    const double a = xs[std::max(0, arg - 1)];
    const double b = xs[std::min(n_scan - 1, arg + 1)];
    const auto best = num::golden_section_max(p_of_logr, a, b, 1e-4);
    if (best.value >= ps[arg]) {
      out.r_opt = std::exp(best.x);
      out.p_max = best.value;
    } else {
      out.r_opt = std::exp(xs[arg]);
      out.p_max = ps[arg];
    }
  } else {
    // Fall back to a dense grid; callers read unimodal_prescan as the warning.
    const int n_dense = 2001;
    double best_x = xs[arg], best_p = ps[arg];
    for (int i = 0; i < n_dense; ++i) {
      const double x = x_lo + (x_hi - x_lo) * i / (n_dense - 1);
      const double p = p_of_logr(x);
      if (p > best_p) {
        best_p = p;
        best_x = x;
      }
    }
    out.r_opt = std::exp(best_x);
    out.p_max = best_p;
  }
  return out;
}

double normalized_power_density(double p_w, double volume_m3, double y0_m,
                                double f_hz) {
  veh::detail::require(p_w >= 0 && std::isfinite(p_w), "NPD: power must be >= 0");
  veh::detail::require(volume_m3 > 0 && std::isfinite(volume_m3), "NPD: volume must be > 0");
  veh::detail::require(y0_m > 0 && std::isfinite(y0_m), "NPD: y0 must be > 0");
  veh::detail::require(f_hz > 0 && std::isfinite(f_hz), "NPD: f must be > 0");
  const double w = 2.0 * M_PI * f_hz;
  const double a_g = y0_m * w * w / 9.81;
  const double volume_cm3 = volume_m3 * 1e6;
  return p_w / (volume_cm3 * a_g * a_g);
}

ScalingReport scaling_study(const DeviceParams& base, const Excitation& excitation,
                            const std::vector<double>& s_list) {
  veh::detail::require(s_list.size() >= 5,
                       "scaling_study: need at least 5 scale points for the fit");
  for (double s : s_list) {
    veh::detail::require(std::isfinite(s) && s > 0, "scaling_study: scale factors must be > 0");
  }

  const double w_exc = 2.0 * M_PI * excitation.frequency_hz;
  const double accel = excitation.amplitude_y0 * w_exc * w_exc;  // held fixed

  ScalingReport report;
  report.assumptions = {
      "all linear dimensions scale by s (magnet, coil, gap)",
      "base acceleration amplitude held fixed across scales",
      "each device operates at its own resonance-tracked peak and optimal load",
      "k_lin ~ s and mass ~ s^3 (constant material strain regime)",
      "k_cub ~ 1/s^3 (relative stiffening held fixed)",
      "device volume ~ s^3",
  };

  for (double s : s_list) {
    const MagnetSpec magnet(base.magnet.side_a * s, base.magnet.side_b * s,
                            base.magnet.thickness * s, base.magnet.remanence,
                            base.magnet.density, base.magnet.gap_z0 * s);
    const CoilSpec coil(base.coil.n_turns, base.coil.track_width * s,
                        base.coil.track_thickness * s, base.coil.track_separation * s,
                        base.coil.outer_side * s, base.coil.resistivity);
    const auto layout = mag::build_layout(coil);
    const double r_coil = mag::coil_resistance(layout, coil.resistivity);
    const double coupling = mag::transduction_coefficient(magnet, layout, magnet.gap_z0);

    const ResonatorParams res(base.resonator.mass * s * s * s,
                              base.resonator.k_lin * s,
                              base.resonator.k_cub / (s * s * s),
                              base.resonator.zeta_p, base.resonator.gamma_sat);
    const double f_res = natural_frequency(res);
    const double w_res = 2.0 * M_PI * f_res;
    const double y0_s = accel / (w_res * w_res);

    const DeviceParams scaled(res, magnet, coil, base.load, coupling, r_coil,
                              base.device_volume * s * s * s);
    const Excitation exc_s(y0_s, f_res);
    const double r_lo = std::max(1e-2, r_coil * 1e-2);
    const auto best = optimal_load(scaled, exc_s, r_lo, r_lo * 1e6,
                                   LoadModel::tracked_resonance);

    ScalingPoint pt;
    pt.s = s;
    pt.f_res = f_res;
    pt.y0 = y0_s;
    pt.coupling_k = coupling;
    pt.r_coil = r_coil;
    pt.r_opt = best.r_opt;
    pt.p_max = best.p_max;
    pt.npd = normalized_power_density(best.p_max, scaled.device_volume, y0_s, f_res);
    report.points.push_back(pt);
  }

  std::vector<double> log_s, log_npd;
  for (const auto& pt : report.points) {
    log_s.push_back(std::log(pt.s));
    log_npd.push_back(std::log(pt.npd));
  }
  double var = 0.0;
  const double mean = std::accumulate(log_s.begin(), log_s.end(), 0.0) / log_s.size();
  for (double x : log_s) var += (x - mean) * (x - mean);
  if (var == 0.0) {
    throw model_error("scaling_study: degenerate fit, all scale factors identical");
  }
  const auto fit = num::fit_line(log_s, log_npd);
  report.exponent = fit.slope;
  report.r_squared = fit.r_squared;
  return report;
}

std::vector<ThicknessPoint> thickness_projection(const DeviceParams& device,
                                                 const Excitation& excitation,
                                                 const std::vector<double>& t_list) {
  for (double t : t_list) {
    veh::detail::require(std::isfinite(t) && t >= 5e-6 && t <= 100e-6,
                         "thickness_projection: thickness outside the plausible "
                         "5-100 um fabrication range");
  }
  std::vector<ThicknessPoint> table;
  table.reserve(t_list.size());
  for (double t : t_list) {
    const CoilSpec coil(device.coil.n_turns, device.coil.track_width, t,
                        device.coil.track_separation, device.coil.outer_side,
                        device.coil.resistivity);
    const auto layout = mag::build_layout(coil);
    const double r_coil = mag::coil_resistance(layout, coil.resistivity);
    DeviceParams d = device;
    d.coil = coil;
    d.r_coil = r_coil;
    const auto best =
        optimal_load(d, excitation, 1.0, 1e6, LoadModel::tracked_resonance);
    table.push_back({t, r_coil, best.r_opt, best.p_max});
  }
  for (size_t i = 1; i < table.size(); ++i) {
    if (t_list[i] > t_list[i - 1] && table[i].p_max < table[i - 1].p_max) {
      throw model_error("thickness_projection: power not monotone in thickness");
    }
  }
  return table;
}

}  // namespace veh::elec
