// Command-line front end: scan, budget, trap-fit, resonator, selftest.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ioncav/config.hpp"
#include "ioncav/errors.hpp"
#include "ioncav/lineshape.hpp"
#include "ioncav/photometrics.hpp"
#include "ioncav/report.hpp"
#include "ioncav/resonator.hpp"
#include "ioncav/selftest.hpp"
#include "ioncav/trapchar.hpp"
#include "ioncav/units.hpp"

using namespace ioncav;

namespace {

#ifndef IONCAV_DEFAULT_CONFIG
#define IONCAV_DEFAULT_CONFIG "configs/paper_defaults.json"
#endif

struct Options {
  std::string config = IONCAV_DEFAULT_CONFIG;
  std::string out;
  int points = 0;
  std::optional<double> intensity;
  unsigned parallel = 1;
  std::string trap_csv;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

std::string run_scan(const Options& opt) {
  RunConfig cfg = parse_config(opt.config);
  if (opt.points != 0) {
    if (opt.points < 3) throw ConfigError("--points must be >= 3");
    cfg.scan.points = opt.points;
  }
  if (opt.intensity) {
    if (!(*opt.intensity >= 0.0)) throw ConfigError("--intensity must be >= 0");
    cfg.drive.intensity_sat = *opt.intensity;
  }
  if (opt.parallel < 1) throw ConfigError("--parallel must be >= 1");
  const LineshapeTable t = scan(cfg.system_params(), cfg.scan_grid(), opt.parallel);
  return scan_csv(t);
}

std::string run_budget(const Options& opt) {
  const RunConfig cfg = parse_config(opt.config);
  const BudgetConfig& b = cfg.budget;

  CavityInputs in;
  in.fsr = b.fsr_hz;
  in.fwhm = b.fwhm_hz;
  const CavityMetrics m = cavity_metrics(in);
  const EfficiencyChain chain = efficiency_chain(b.detected_per_s, b.stages);

  double output = 0.0;
  for (std::size_t i = 0; i < chain.stages.size(); ++i)
    if (chain.stages[i].label == b.output_stage) output = chain.rates[i];

  const SystemParams p = cfg.system_params();
  const double coop = std::pow(units::angular(cfg.cavity.g_hz), 2) / (p.cavity.kappa * p.gamma);
  const double c_eff = p.cavity.g * p.cavity.g / (p.cavity.kappa * p.gamma);
  const double p_coll = collection_probability(b.t_out_over_loss, p.cavity.kappa, p.gamma, c_eff);
  const double gamma_sc = scatter_rate(p.i_rel, p.delta_0, p.gamma);
  const double solid = b.solid_angle_sr ? *b.solid_angle_sr : cavity_solid_angle(b.wavelength_m, b.waist_m);
  const double iso = b.isotropic_per_s ? *b.isotropic_per_s : isotropic_rate(gamma_sc, solid);

  ordered_json j;
  j["cavity"] = {{"length_m", m.length},
                 {"fsr_hz", m.fsr},
                 {"fwhm_hz", m.fwhm},
                 {"finesse", m.finesse},
                 {"kappa_hz", units::linear(m.kappa)},
                 {"round_trip_loss_ppm", m.total_loss_ppm}};
  ordered_json ladder = ordered_json::array();
  ladder.push_back({{"stage", "detected"}, {"efficiency", 1.0}, {"rate_per_s", chain.detected}});
  for (std::size_t i = 0; i < chain.stages.size(); ++i)
    ladder.push_back({{"stage", chain.stages[i].label},
                      {"efficiency", chain.stages[i].efficiency},
                      {"rate_per_s", chain.rates[i]}});
  j["ladder"] = ladder;
  j["cavity_output_per_s"] = output;
  j["cavity_collected_per_s"] = chain.source_rate();
  j["cooperativity"] = coop;
  j["effective_cooperativity"] = c_eff;
  j["collection_probability"] = p_coll;
  j["scatter_rate_per_s"] = gamma_sc;
  j["predicted_collected_per_s"] = p_coll * gamma_sc;
  j["solid_angle_sr"] = solid;
  j["isotropic_rate_per_s"] = iso;
  j["enhancement_factor"] = enhancement_factor(output, iso);
  j["saturation_intensity_mw_per_cm2"] =
      0.1 * saturation_intensity(b.wavelength_m, units::angular(cfg.atom.gamma_hz));
  return json_text(j);
}

std::string run_trap_fit(const Options& opt) {
  const RunConfig cfg = parse_config(opt.config);
  const std::vector<TrapMeasurement> data = read_trap_csv(opt.trap_csv);
  const TrapDrive drive = cfg.trap_drive();
  const EtaFitReport rep = fit_eta(data, drive);

  const double x0 = 0.5 * cfg.trap.separation_um * 1e-6;
  const QuadrupoleMoments q = quadrupole_from_eta(cfg.trap.eta, x0, cfg.trap.anisotropy);

  ordered_json j;
  j["drive"] = {{"rf_volts", cfg.trap.rf_volts}, {"rf_hz", cfg.trap.rf_hz}, {"mass_amu", cfg.trap.mass_amu}};
  ordered_json fits = ordered_json::array();
  for (const auto& f : rep.fits)
    fits.push_back({{"separation_um", f.separation * 1e6},
                    {"eta", f.eta},
                    {"anisotropy", f.r},
                    {"points", f.points},
                    {"sse_hz2", f.sse / (units::two_pi * units::two_pi)}});
  j["fits"] = fits;
  j["sse_hz2"] = rep.sse / (units::two_pi * units::two_pi);
  ordered_json ref = {{"eta", cfg.trap.eta},
                      {"separation_um", cfg.trap.separation_um},
                      {"q_x_per_m2", q.q_x},
                      {"q_y_per_m2", q.q_y},
                      {"q_z_per_m2", q.q_z}};
  for (TrapAxis a : {TrapAxis::x, TrapAxis::y, TrapAxis::z})
    ref[std::string("secular_") + to_string(a) + "_hz"] =
        units::linear(secular_frequency(0.0, drive.v0, drive.omega_rf, q[a], drive.mass));
  j["reference"] = ref;
  return json_text(j);
}

std::string run_resonator(const Options& opt) {
  const RunConfig cfg = parse_config(opt.config);
  const ResonatorConfig& r = cfg.resonator;
  const MirrorGeometry shared = cfg.mirror_geometry(r.length_m);
  const double dl = length_diff_from_offset(r.offset_hz, shared);
  const MirrorGeometry solved = cfg.mirror_geometry(r.length_m - dl);

  ordered_json j;
  j["length_uv_m"] = r.length_m;
  j["radius_ir_m"] = r.radius_ir_m;
  j["radius_uv_m"] = r.radius_uv_m;
  j["nu_ir_hz"] = shared.nu_ir;
  j["fsr_hz"] = units::speed_of_light / (2.0 * r.length_m);
  j["gouy_phase_ir_rad"] = gouy_phase(r.length_m, r.radius_ir_m);
  j["gouy_phase_uv_rad"] = gouy_phase(r.length_m, r.radius_uv_m);
  j["gouy_offset_hz"] = dual_band_offset(shared);
  j["offset_hz"] = r.offset_hz;
  j["length_diff_m"] = dl;
  j["length_diff_nm"] = dl * 1e9;
  j["offset_check_hz"] = dual_band_offset(solved);
  return json_text(j);
}

std::string run_selftest_table(bool& all_passed) {
  const std::vector<CheckResult> checks = run_selftest();
  std::string out;
  all_passed = true;
  for (const auto& c : checks) {
    out += c.passed ? "PASS  " : "FAIL  ";
    out += c.name;
    out += "  (" + c.detail + ")\n";
    all_passed = all_passed && c.passed;
  }
  return out;
}

int fail(ErrorCategory cat, const std::string& msg) {
  std::string line = msg;
  for (char& ch : line)
    if (ch == '\n') ch = ' ';
  std::cerr << "ERROR(" << to_string(cat) << "): " << line << '\n';
  return static_cast<int>(cat);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven ion-cavity simulator and photon-budget toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "write output here instead of stdout");
  };

  CLI::App* scan_cmd = app.add_subcommand("scan", "cavity-detuning scan as CSV");
  add_common(scan_cmd);
  scan_cmd->add_option("--points", opt.points, "number of grid points (>= 3)");
  scan_cmd->add_option("--intensity", opt.intensity, "drive intensity in units of I_sat");
  scan_cmd->add_option("--parallel", opt.parallel, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* budget_cmd = app.add_subcommand("budget", "photon budget as JSON");
  add_common(budget_cmd);

  CLI::App* trap_cmd = app.add_subcommand("trap-fit", "fit eta to secular-frequency data");
  add_common(trap_cmd);
  trap_cmd->add_option("measurements", opt.trap_csv, "CSV with header u0_volts,separation_um,axis,omega_hz")
      ->required();

  CLI::App* res_cmd = app.add_subcommand("resonator", "dual-band offset and length difference");
  add_common(res_cmd);

  CLI::App* self_cmd = app.add_subcommand("selftest", "run built-in oracle checks");
  self_cmd->add_option("--out", opt.out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    return fail(ErrorCategory::config, e.what());
  }

  try {
    if (scan_cmd->parsed()) {
      emit(run_scan(opt), opt.out);
    } else if (budget_cmd->parsed()) {
      emit(run_budget(opt), opt.out);
    } else if (trap_cmd->parsed()) {
      emit(run_trap_fit(opt), opt.out);
    } else if (res_cmd->parsed()) {
      emit(run_resonator(opt), opt.out);
    } else if (self_cmd->parsed()) {
      bool ok = false;
      emit(run_selftest_table(ok), opt.out);
      if (!ok) return fail(ErrorCategory::numerical, "selftest had failing checks");
    }
  } catch (const Error& e) {
    return fail(e.category(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCategory::numerical, e.what());
  }
  return 0;
}
