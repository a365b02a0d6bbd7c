// Command-line front end: simulation, optimization and fitting runs driven by
// a flat key-value config, emitting CSV artifacts and key-value summaries.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "veh/config.hpp"
#include "veh/csv.hpp"
#include "veh/device.hpp"
#include "veh/dynamics.hpp"
#include "veh/electrical.hpp"
#include "veh/fitting.hpp"
#include "veh/harmonic_balance.hpp"
#include "veh/magnetics.hpp"

namespace {

namespace fs = std::filesystem;
using veh::io::CsvWriter;

struct CliArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string data_path;
  unsigned seed = 42;
};

veh::io::RunConfig load_config(const CliArgs& args) {
  if (args.config_path.empty()) return veh::io::default_config();
  std::ifstream in(args.config_path);
  if (!in) {
    throw veh::io::config_error(
        {{0, args.config_path, "cannot open configuration file"}});
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return veh::io::parse_config(buf.str());
}

std::string out_path(const CliArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

void write_summary(const CliArgs& args, const std::string& name,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  const std::string path = out_path(args, name);
  std::ofstream out(path);
  out << "{\n";
  for (size_t i = 0; i < entries.size(); ++i) {
    out << "  \"" << entries[i].first << "\": " << entries[i].second
        << (i + 1 < entries.size() ? "," : "") << "\n";
  }
  out << "}\n";
  std::cout << "wrote " << path << "\n";
}

std::string num(double v) { return CsvWriter::format(v); }
std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// ---------------------------------------------------------------------------

int cmd_coil(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto layout = veh::mag::build_layout(device.coil);
  const double r_coil = veh::mag::coil_resistance(layout, device.coil.resistivity);

  const double z_lo = config.number("coil_gap_min_m");
  const double z_hi = config.number("coil_gap_max_m");
  const int n = static_cast<int>(config.number("coil_gap_points_count"));
  veh::detail::require(n >= 2 && z_hi > z_lo, "coil: bad gap scan range");

  CsvWriter csv(out_path(args, "coil.csv"),
                {"z_gap_m", "flux_wb", "k_vspm", "r_coil_ohm"});
  for (int i = 0; i < n; ++i) {
    const double z = z_lo + (z_hi - z_lo) * i / (n - 1);
    const double phi = veh::mag::flux_linkage(device.magnet, layout, z);
    const double k = veh::mag::transduction_coefficient(device.magnet, layout, z);
    csv.row({z, phi, k, r_coil});
  }
  std::cout << "wrote " << out_path(args, "coil.csv") << "\n";
  return 0;
}

int cmd_freq_response(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto excitation = veh::io::build_excitation(config);

  const double f_lo = config.number("freq_min_hz");
  const double f_hi = config.number("freq_max_hz");
  const int n = static_cast<int>(config.number("freq_points_count"));
  veh::detail::require(n >= 2 && f_hi > f_lo && f_lo > 0, "freq-response: bad grid");

  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = f_lo + (f_hi - f_lo) * i / (n - 1);
  const auto response =
      veh::hb::frequency_response(device, excitation.amplitude_y0, grid);

  CsvWriter csv(out_path(args, "freq_response.csv"),
                {"f_hz", "z_root1_m", "z_root2_m", "z_root3_m", "stab_root1",
                 "stab_root2", "stab_root3"});
  for (const auto& pt : response.points) {
    std::vector<std::string> cells = {num(pt.f), "nan", "nan", "nan", "none",
                                      "none", "none"};
    for (size_t i = 0; i < pt.roots.size() && i < 3; ++i) {
      cells[1 + i] = num(pt.roots[i].amplitude);
      cells[4 + i] =
          pt.roots[i].stability == veh::hb::Stability::stable ? "stable" : "unstable";
    }
    csv.raw_row(cells);
  }
  std::cout << "wrote " << out_path(args, "freq_response.csv") << "\n";

  if (config.choice("freq_emit_backbone") == "true") {
    double z_max = 0;
    for (const auto& pt : response.points) {
      for (const auto& r : pt.roots) z_max = std::max(z_max, r.amplitude);
    }
    CsvWriter bb(out_path(args, "backbone.csv"), {"z_m", "f_peak_hz"});
    const int nb = 100;
    for (int i = 0; i < nb; ++i) {
      const double z = z_max * i / (nb - 1);
      bb.row({z, veh::hb::backbone_frequency(device.resonator, z)});
    }
    std::cout << "wrote " << out_path(args, "backbone.csv") << "\n";
  }

  const auto jumps = veh::hb::jump_frequencies(device, excitation.amplitude_y0);
  write_summary(args, "freq_response_summary.json",
                {{"f_jump_up_hz", jumps.f_jump_up ? num(*jumps.f_jump_up) : "null"},
                 {"f_jump_down_hz", jumps.f_jump_down ? num(*jumps.f_jump_down) : "null"},
                 {"diagnostics", quoted(jumps.diagnostics)}});
  return 0;
}

void write_sweep_csv(const std::string& path, const veh::dyn::SweepResult& result) {
  CsvWriter csv(path, {"f_hz", "z_amp_m", "v_rms_v"});
  for (const auto& bin : result.bins) csv.row({bin.f, bin.z_amp, bin.v_out_rms});
}

int cmd_sweep(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);

  veh::dyn::SweepSpec up;
  up.f_start = config.number("sweep_f_start_hz");
  up.f_end = config.number("sweep_f_end_hz");
  up.rate = config.number("sweep_rate_hz_per_s");
  up.bin_width = config.number("sweep_bin_hz");
  up.direction = veh::dyn::SweepDirection::up;
  up.excitation_y0 = config.number("excitation_y0_m");

  veh::dyn::SweepSpec down = up;
  std::swap(down.f_start, down.f_end);
  down.direction = veh::dyn::SweepDirection::down;

  const std::string mode = config.choice("sweep_direction");
  if (mode == "up") {
    write_sweep_csv(out_path(args, "sweep_up.csv"), veh::dyn::sweep(device, up));
    std::cout << "wrote " << out_path(args, "sweep_up.csv") << "\n";
    return 0;
  }
  if (mode == "down") {
    write_sweep_csv(out_path(args, "sweep_down.csv"), veh::dyn::sweep(device, down));
    std::cout << "wrote " << out_path(args, "sweep_down.csv") << "\n";
    return 0;
  }

  const auto results = veh::dyn::sweep_batch(device, {up, down});
  write_sweep_csv(out_path(args, "sweep_up.csv"), results[0]);
  write_sweep_csv(out_path(args, "sweep_down.csv"), results[1]);
  const auto metrics = veh::dyn::hysteresis_metrics(results[0], results[1]);
  write_summary(
      args, "sweep_summary.json",
      {{"f_peak_up_hz", num(metrics.f_peak_up)},
       {"f_peak_down_hz", num(metrics.f_peak_down)},
       {"jump_up_f_hz", metrics.jump_up_f ? num(*metrics.jump_up_f) : "null"},
       {"jump_down_f_hz", metrics.jump_down_f ? num(*metrics.jump_down_f) : "null"},
       {"width_hz", num(metrics.width_hz)},
       {"v_peak_up_v", num(metrics.v_peak_up)},
       {"v_peak_down_v", num(metrics.v_peak_down)}});
  std::cout << "hysteresis width " << metrics.width_hz << " Hz, peak "
            << metrics.v_peak_up << " V up / " << metrics.v_peak_down << " V down\n";
  return 0;
}

int cmd_optimal_load(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto excitation = veh::io::build_excitation(config);
  const double r_lo = config.number("load_r_min_ohm");
  const double r_hi = config.number("load_r_max_ohm");
  const auto model = config.choice("load_model") == "tracked"
                         ? veh::elec::LoadModel::tracked_resonance
                         : veh::elec::LoadModel::fixed_frequency;
  const auto branch = config.choice("branch") == "down" ? veh::elec::Branch::down_sweep
                                                        : veh::elec::Branch::up_sweep;

  CsvWriter csv(out_path(args, "load_scan.csv"), {"r_load_ohm", "p_load_w", "v_rms_v"});
  const int n = 60;
  for (int i = 0; i < n; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n - 1));
    veh::DeviceParams d = device;
    d.load = veh::ElectricalLoad(r);
    if (model == veh::elec::LoadModel::tracked_resonance) {
      const auto pk = veh::elec::tracked_peak(d, excitation.amplitude_y0, r);
      csv.row({r, pk.p_load, pk.v_rms});
    } else {
      const auto op = veh::elec::operating_point(d, excitation, branch);
      csv.row({r, op.p_load, op.v_rms});
    }
  }

  const auto best = veh::elec::optimal_load(device, excitation, r_lo, r_hi, model, branch);
  write_summary(args, "optimal_load_summary.json",
                {{"r_opt_ohm", num(best.r_opt)},
                 {"p_max_w", num(best.p_max)},
                 {"unimodal_prescan", best.unimodal_prescan ? "true" : "false"},
                 {"f_hz", num(excitation.frequency_hz)},
                 {"y0_m", num(excitation.amplitude_y0)}});
  return 0;
}

int cmd_fit(const CliArgs& args) {
  if (args.data_path.empty()) {
    throw veh::io::config_error({{0, "--data", "fit requires a measured-curve CSV"}});
  }
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto excitation = veh::io::build_excitation(config);

  std::optional<veh::dyn::SweepDirection> direction;
  if (config.choice("sweep_direction") == "up") direction = veh::dyn::SweepDirection::up;
  if (config.choice("sweep_direction") == "down") direction = veh::dyn::SweepDirection::down;

  const auto curve = veh::io::read_measured_curve(args.data_path, excitation, direction);

  std::vector<veh::fit::FreeParam> free_params;
  for (const auto& tok : [&] {
         std::vector<std::string> toks;
         std::string cur;
         for (char c : config.choice("fit_free") + ",") {
           if (c == ',') {
             if (!cur.empty()) toks.push_back(cur);
             cur.clear();
           } else {
             cur += c;
           }
         }
         return toks;
       }()) {
    if (tok == "zeta_p") free_params.push_back(veh::fit::FreeParam::zeta_p);
    else if (tok == "coupling_k") free_params.push_back(veh::fit::FreeParam::coupling_k);
    else if (tok == "k_cub") free_params.push_back(veh::fit::FreeParam::k_cub);
    else throw veh::io::config_error({{0, "fit_free", "unknown parameter '" + tok + "'"}});
  }

  const std::map<veh::fit::FreeParam, veh::fit::ParamBounds> bounds = {
      {veh::fit::FreeParam::zeta_p,
       {config.number("fit_zeta_p_lo_ratio"), config.number("fit_zeta_p_hi_ratio")}},
      {veh::fit::FreeParam::coupling_k,
       {config.number("fit_coupling_lo_vs_per_m"), config.number("fit_coupling_hi_vs_per_m")}},
      {veh::fit::FreeParam::k_cub,
       {config.number("fit_k_cub_lo_n_per_m3"), config.number("fit_k_cub_hi_n_per_m3")}},
  };

  veh::fit::FitOptions options;
  options.seed = args.seed;
  const auto report = veh::fit::fit_parameters(curve, device, free_params, bounds, options);

  const std::string path = out_path(args, "fit_report.txt");
  std::ofstream out(path);
  out << "converged = " << (report.converged ? "true" : "false") << "\n";
  out << "residual = " << num(report.residual) << "\n";
  out << "iterations = " << report.iterations << "\n";
  for (const auto& [p, v] : report.parameters) {
    out << veh::fit::to_string(p) << " = " << num(v) << "\n";
  }
  out << "diagnostics = " << report.diagnostics << "\n";
  std::cout << "wrote " << path << "\n";

  CsvWriter csv(out_path(args, "fit_residuals.csv"), {"x", "relative_residual"});
  for (size_t i = 0; i < report.per_point_residuals.size(); ++i) {
    csv.row({curve.x[i], report.per_point_residuals[i]});
  }
  return report.converged ? 0 : 1;
}

int cmd_scaling(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto excitation = veh::io::build_excitation(config);
  const auto report =
      veh::elec::scaling_study(device, excitation, config.list("scale_list_ratio"));

  CsvWriter csv(out_path(args, "scaling.csv"),
                {"s_ratio", "f_res_hz", "y0_m", "coupling_k_vs_per_m", "r_coil_ohm",
                 "r_opt_ohm", "p_max_w", "npd_w_per_cm3_g2"},
                report.assumptions);
  for (const auto& pt : report.points) {
    csv.row({pt.s, pt.f_res, pt.y0, pt.coupling_k, pt.r_coil, pt.r_opt, pt.p_max, pt.npd});
  }
  write_summary(args, "scaling_summary.json",
                {{"exponent", num(report.exponent)},
                 {"r_squared", num(report.r_squared)},
                 {"published_comparison",
                  quoted("fixed-acceleration resonance-tracked model; compare with the "
                         "published fourth-power density scaling")}});
  return 0;
}

int cmd_project_thickness(const CliArgs& args) {
  const auto config = load_config(args);
  const auto device = veh::io::build_device(config);
  const auto excitation = veh::io::build_excitation(config);
  const auto table = veh::elec::thickness_projection(device, excitation,
                                                     config.list("thickness_list_m"));
  CsvWriter csv(out_path(args, "thickness.csv"),
                {"t_m", "r_coil_ohm", "r_opt_ohm", "p_max_w"});
  for (const auto& pt : table) csv.row({pt.t, pt.r_coil, pt.r_opt, pt.p_max});
  std::cout << "wrote " << out_path(args, "thickness.csv") << "\n";
  return 0;
}

int cmd_reproduce_paper(const CliArgs& args) {
  const auto ref = veh::fit::reference_anchors();
  const auto device = veh::fit::calibrate_reference_device();
  const veh::Excitation exc(ref.y0_m, ref.f_hz);

  // Hysteresis sweeps at the anchor excitation and figure load.
  veh::dyn::SweepSpec up;
  up.f_start = 285;
  up.f_end = 365;
  up.rate = 1.0;
  up.direction = veh::dyn::SweepDirection::up;
  up.excitation_y0 = ref.y0_m;
  veh::dyn::SweepSpec down = up;
  std::swap(down.f_start, down.f_end);
  down.direction = veh::dyn::SweepDirection::down;

  // Saturation study: up sweeps at growing excitation with the
  // amplitude-dependent damping enabled.
  veh::DeviceParams sat_device = device;
  sat_device.resonator = veh::ResonatorParams(
      device.resonator.mass, device.resonator.k_lin, device.resonator.k_cub,
      device.resonator.zeta_p, ref.gamma_sat_study);
  std::vector<veh::dyn::SweepSpec> sat_specs;
  const std::vector<double> y0s = {1e-6, 2e-6, 3e-6, 4e-6, 5e-6};
  for (double y0 : y0s) {
    veh::dyn::SweepSpec s = up;
    s.f_start = 285;
    s.f_end = 345;
    s.excitation_y0 = y0;
    sat_specs.push_back(s);
  }

  const auto hyst = veh::dyn::sweep_batch(device, {up, down});
  const auto sat = veh::dyn::sweep_batch(sat_device, sat_specs);

  write_sweep_csv(out_path(args, "fig2_sweep_up.csv"), hyst[0]);
  write_sweep_csv(out_path(args, "fig2_sweep_down.csv"), hyst[1]);
  const auto metrics = veh::dyn::hysteresis_metrics(hyst[0], hyst[1]);

  {
    CsvWriter csv(out_path(args, "fig3_sweeps.csv"), {"y0_m", "f_hz", "z_amp_m", "v_rms_v"});
    for (size_t i = 0; i < sat.size(); ++i) {
      for (const auto& bin : sat[i].bins) {
        csv.row({y0s[i], bin.f, bin.z_amp, bin.v_out_rms});
      }
    }
  }

  {
    CsvWriter csv(out_path(args, "fig4_load.csv"), {"r_load_ohm", "p_load_w", "v_rms_v"});
    const int n = 60;
    for (int i = 0; i < n; ++i) {
      const double r = 10.0 * std::pow(1e5, static_cast<double>(i) / (n - 1));
      const auto pk = veh::elec::tracked_peak(device, ref.y0_m, r);
      csv.row({r, pk.p_load, pk.v_rms});
    }
  }

  const auto best = veh::elec::optimal_load(device, exc, 10.0, 1e6,
                                            veh::elec::LoadModel::tracked_resonance);
  veh::DeviceParams high_load = device;
  high_load.load = veh::ElectricalLoad(1e6);
  const auto op_high = veh::elec::operating_point(high_load, exc);
  const double npd = veh::elec::normalized_power_density(best.p_max, device.device_volume,
                                                         ref.y0_m, ref.f_hz);
  const double raw_density_uw_cm3 = best.p_max / (device.device_volume * 1e6) * 1e6;

  write_summary(
      args, "reproduce_summary.json",
      {{"p_max_w", num(best.p_max)},
       {"p_max_published_w", num(ref.p_max_w)},
       {"r_opt_ohm", num(best.r_opt)},
       {"v_high_load_v_rms", num(op_high.v_rms)},
       {"v_high_published_v", num(ref.v_high_v)},
       {"zeta_p_device", num(device.resonator.zeta_p)},
       {"zeta_p_published", num(ref.zeta_fit)},
       {"f_peak_up_hz", num(metrics.f_peak_up)},
       {"f_peak_down_hz", num(metrics.f_peak_down)},
       {"hysteresis_width_hz", num(metrics.width_hz)},
       {"v_peak_up_v", num(metrics.v_peak_up)},
       {"v_peak_down_v", num(metrics.v_peak_down)},
       {"raw_power_density_uw_per_cm3", num(raw_density_uw_cm3)},
       {"raw_density_published_uw_per_cm3", quoted("up to 40")},
       {"npd_w_per_cm3_g2", num(npd)},
       {"npd_published_band_w_per_cm3_g2", quoted("1.6e-6 to 3.8e-6")},
       {"natural_frequency_hz", num(veh::natural_frequency(device.resonator))},
       {"coupling_k_vs_per_m", num(device.coupling_k)},
       {"r_coil_ohm", num(device.r_coil)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial electromagnetic vibration harvester toolkit"};
  app.require_subcommand(1);

  CliArgs args;
  app.add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", args.seed, "Seed for multi-start fitting")->capture_default_str();

  struct Sub {
    CLI::App* cmd;
    int (*run)(const CliArgs&);
  };
  std::vector<Sub> subs;
  auto add = [&](const std::string& name, const std::string& desc,
                 int (*run)(const CliArgs&)) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("config", args.config_path, "Flat key-value configuration file");
    subs.push_back({cmd, run});
    return cmd;
  };

  add("coil", "Coil geometry, resistance, flux and transduction scan", cmd_coil);
  add("freq-response", "Multivalued amplitude branches over a frequency grid",
      cmd_freq_response);
  add("sweep", "Quasi-static directional frequency sweeps with hysteresis metrics",
      cmd_sweep);
  add("optimal-load", "Load-resistance scan and golden-section power maximum",
      cmd_optimal_load);
  auto* fit_cmd = add("fit", "Recover parameters from a measured curve", cmd_fit);
  fit_cmd->add_option("--data", args.data_path, "Measured-curve CSV");
  add("scaling", "Power-density scaling study over linear scale factors", cmd_scaling);
  add("project-thickness", "Power projection against coil track thickness",
      cmd_project_thickness);
  add("reproduce-paper",
      "Regenerate the reference-prototype study (figure CSVs and summary)",
      cmd_reproduce_paper);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& sub : subs) {
      if (sub.cmd->parsed()) return sub.run(args);
    }
    std::cerr << "no command given\n" << app.help() << "\n";
    return 2;
  } catch (const veh::io::config_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const veh::invalid_parameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const veh::model_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
