#pragma once

// Run configuration: JSON file with linear frequencies in Hz.
//
// Every key carries its unit as a suffix (_hz, _deg, _m, _per_s, _volts,
// _amu, _um). Unknown keys are rejected; a key that differs from a known one
// only in its unit suffix is reported as a unit error.

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ioncav/cavity_model.hpp"
#include "ioncav/errors.hpp"
#include "ioncav/lineshape.hpp"
#include "ioncav/photometrics.hpp"
#include "ioncav/resonator.hpp"
#include "ioncav/steadystate.hpp"
#include "ioncav/trapchar.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

struct AtomConfig {
  double gamma_hz = 0.0;
  double zeeman_s_hz = 1e6;
  double zeeman_p_hz = 1e6 / 3.0;
  double delta0_hz = 0.0;
};

struct CavityConfig {
  double g_hz = 0.0;
  double g_averaging_factor = 1.0 / std::sqrt(2.0);
  double kappa_hz = 0.0;
  int fock_cutoff = 2;
};

struct DriveConfig {
  double intensity_sat = 0.0;
  double theta_k_deg = 0.0;
  double psi_pol_deg = 0.0;
};

struct ScanConfig {
  double delta_c_start_hz = -450e6;
  double delta_c_stop_hz = 450e6;
  int points = 181;
};

struct BudgetConfig {
  double detected_per_s = 8000.0;
  std::vector<EfficiencyStage> stages{
      {"pmt", 0.19}, {"prism", 0.235}, {"vacuum_window", 0.9}, {"outcoupling", 0.24}};
  std::string output_stage = "vacuum_window";  // photons leaving the cavity are counted in front of it
  double t_out_over_loss = 0.24;
  double fsr_hz = 70.5e9;
  double fwhm_hz = 47.4e6;
  double wavelength_m = 369.5e-9;
  double waist_m = 25e-6;
  std::optional<double> solid_angle_sr;  // overrides the waist when set
  std::optional<double> isotropic_per_s;  // overrides the computed free-space rate
};

struct TrapConfig {
  double rf_volts = 300.0;
  double rf_hz = 21.6e6;
  double mass_amu = 174.0;
  double eta = 0.45;
  double separation_um = 180.0;
  double anisotropy = 0.5;
};

struct ResonatorConfig {
  double length_m = 2.126e-3;
  double radius_ir_m = 25e-3;
  double radius_uv_m = 25e-3;
  double wavelength_ir_m = 739e-9;
  double offset_hz = 2.3e9;
};

struct RunConfig {
  AtomConfig atom;
  CavityConfig cavity;
  DriveConfig drive;
  ScanConfig scan;
  BudgetConfig budget;
  TrapConfig trap;
  ResonatorConfig resonator;

  /// Model parameters in angular units at cavity detuning zero.
  SystemParams system_params() const {
    SystemParams p;
    p.gamma = units::angular(atom.gamma_hz);
    p.delta_0 = units::angular(atom.delta0_hz);
    p.zeeman = {units::angular(atom.zeeman_s_hz), units::angular(atom.zeeman_p_hz)};
    p.cavity.g = units::angular(cavity.g_hz * cavity.g_averaging_factor);
    p.cavity.kappa = units::angular(cavity.kappa_hz);
    p.cavity.delta_c = 0.0;
    p.cavity.n_max = cavity.fock_cutoff;
    p.i_rel = drive.intensity_sat;
    p.geometry = {units::deg_to_rad(drive.theta_k_deg), units::deg_to_rad(drive.psi_pol_deg)};
    return p;
  }

  /// Scan grid in rad/s.
  std::vector<double> scan_grid() const {
    std::vector<double> g = linear_grid(scan.delta_c_start_hz, scan.delta_c_stop_hz, scan.points);
    for (double& v : g) v = units::angular(v);
    return g;
  }

  TrapDrive trap_drive() const {
    return {trap.rf_volts, units::angular(trap.rf_hz), trap.mass_amu * units::atomic_mass_unit};
  }

  MirrorGeometry mirror_geometry(double length_ir) const {
    return {length_ir, resonator.length_m, resonator.radius_ir_m, resonator.radius_uv_m,
            units::speed_of_light / resonator.wavelength_ir_m};
  }
};

namespace detail {

inline const std::vector<std::string>& unit_suffixes() {
  static const std::vector<std::string> s{"_hz", "_deg", "_m", "_per_s", "_volts", "_amu",
                                          "_um", "_sr", "_rad", "_mhz", "_ghz", "_khz", "_rad_s",
                                          "_s", "_nm", "_mm"};
  return s;
}

inline std::string strip_unit(const std::string& key) {
  std::string best = key;
  for (const auto& s : unit_suffixes())
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) {
      const std::string stem = key.substr(0, key.size() - s.size());
      if (stem.size() < best.size()) best = stem;
    }
  return best;
}

/// Reads one JSON object, remembering which keys were used.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(where() + " must be a JSON object");
    j_ = &j;
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_->contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_->contains(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    const auto& v = (*j_)[key];
    if (!v.is_number()) throw ConfigError("key '" + key_path(key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("key '" + key_path(key) + "' must be finite");
    return x;
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_->contains(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    const auto& v = (*j_)[key];
    if (!v.is_number_integer()) throw ConfigError("key '" + key_path(key) + "' must be an integer");
    return v.get<int>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_->contains(key)) {
      if (fallback) return *fallback;
      missing(key);
    }
    const auto& v = (*j_)[key];
    if (!v.is_string()) throw ConfigError("key '" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  const nlohmann::json* child(const std::string& key) {
    seen_.insert(key);
    return j_->contains(key) ? &(*j_)[key] : nullptr;
  }

  /// Throw for an absent required key, naming a same-stem key with another
  /// unit suffix if one is present.
  [[noreturn]] void missing(const std::string& key) const {
    const std::string stem = strip_unit(key);
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (it.key() != key && strip_unit(it.key()) == stem)
        throw ConfigError("unit-suffix violation at '" + key_path(it.key()) + "': expected '" +
                          key_path(key) + "'");
    throw ConfigError("missing required key '" + key_path(key) + "'");
  }

  /// Reject keys that were never read.
  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (seen_.count(it.key())) continue;
      const std::string stem = strip_unit(it.key());
      for (const auto& known : seen_)
        if (strip_unit(known) == stem)
          throw ConfigError("unit-suffix violation at '" + key_path(it.key()) + "': expected '" +
                            key_path(known) + "'");
      throw ConfigError("unknown key '" + key_path(it.key()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config root" : "'" + path_ + "'"; }

  const nlohmann::json* j_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

inline const nlohmann::json& empty_object() {
  static const nlohmann::json e = nlohmann::json::object();
  return e;
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace detail

/// Parse and validate a configuration document. An empty document is
/// treated as an empty object.
inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    root = nlohmann::json::object();
  } else {
    try {
      root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
  }
  detail::Section top(root, "");
  RunConfig cfg;
  using detail::require;

  {
    const auto* a = top.child("atom");
    detail::Section s(a ? *a : detail::empty_object(), "atom");
    cfg.atom.gamma_hz = s.number("gamma_hz");
    cfg.atom.zeeman_s_hz = s.number("zeeman_s_hz", 1e6);
    cfg.atom.zeeman_p_hz = s.number("zeeman_p_hz", cfg.atom.zeeman_s_hz / 3.0);
    cfg.atom.delta0_hz = s.number("delta0_hz");
    s.finish();
    require(cfg.atom.gamma_hz > 0.0, "atom.gamma_hz must be > 0");
    require(cfg.atom.zeeman_s_hz >= 0.0, "atom.zeeman_s_hz must be >= 0");
    require(cfg.atom.zeeman_p_hz >= 0.0, "atom.zeeman_p_hz must be >= 0");
  }
  {
    const auto* c = top.child("cavity");
    detail::Section s(c ? *c : detail::empty_object(), "cavity");
    cfg.cavity.g_hz = s.number("g_hz");
    cfg.cavity.g_averaging_factor = s.number("g_averaging_factor", 1.0 / std::sqrt(2.0));
    cfg.cavity.kappa_hz = s.number("kappa_hz");
    cfg.cavity.fock_cutoff = s.integer("fock_cutoff", 2);
    s.finish();
    require(cfg.cavity.g_hz >= 0.0, "cavity.g_hz must be >= 0");
    require(cfg.cavity.g_averaging_factor >= 0.0 && cfg.cavity.g_averaging_factor <= 1.0,
            "cavity.g_averaging_factor must lie in [0, 1]");
    require(cfg.cavity.kappa_hz >= 0.0, "cavity.kappa_hz must be >= 0");
    require(cfg.cavity.fock_cutoff >= min_fock_cutoff && cfg.cavity.fock_cutoff <= max_fock_cutoff,
            "cavity.fock_cutoff must lie in the supported range 1-3, got " +
                std::to_string(cfg.cavity.fock_cutoff));
  }
  {
    const auto* d = top.child("drive");
    detail::Section s(d ? *d : detail::empty_object(), "drive");
    cfg.drive.intensity_sat = s.number("intensity_sat");
    cfg.drive.theta_k_deg = s.number("theta_k_deg");
    cfg.drive.psi_pol_deg = s.number("psi_pol_deg");
    s.finish();
    require(cfg.drive.intensity_sat >= 0.0, "drive.intensity_sat must be >= 0");
    require(cfg.drive.theta_k_deg >= 0.0 && cfg.drive.theta_k_deg <= 180.0,
            "drive.theta_k_deg must lie in [0, 180]");
    require(cfg.drive.psi_pol_deg >= 0.0 && cfg.drive.psi_pol_deg < 180.0,
            "drive.psi_pol_deg must lie in [0, 180)");
  }
  {
    const auto* sc = top.child("scan");
    detail::Section s(sc ? *sc : detail::empty_object(), "scan");
    cfg.scan.delta_c_start_hz = s.number("delta_c_start_hz", -450e6);
    cfg.scan.delta_c_stop_hz = s.number("delta_c_stop_hz", 450e6);
    cfg.scan.points = s.integer("points", 181);
    s.finish();
    require(cfg.scan.points >= 3, "scan.points must be >= 3");
    require(cfg.scan.delta_c_stop_hz > cfg.scan.delta_c_start_hz,
            "scan.delta_c_stop_hz must exceed scan.delta_c_start_hz");
  }
  if (const auto* b = top.child("budget")) {
    detail::Section s(*b, "budget");
    cfg.budget.detected_per_s = s.number("detected_per_s", cfg.budget.detected_per_s);
    if (const auto* st = s.child("stages")) {
      if (!st->is_array() || st->empty()) throw ConfigError("budget.stages must be a nonempty array");
      cfg.budget.stages.clear();
      for (std::size_t i = 0; i < st->size(); ++i) {
        detail::Section e((*st)[i], "budget.stages[" + std::to_string(i) + "]");
        EfficiencyStage stage{e.text("label"), e.number("efficiency")};
        e.finish();
        require(stage.efficiency > 0.0 && stage.efficiency <= 1.0,
                "budget.stages[" + std::to_string(i) + "].efficiency must lie in (0, 1]");
        cfg.budget.stages.push_back(stage);
      }
    }
    cfg.budget.output_stage = s.text("output_stage", cfg.budget.output_stage);
    cfg.budget.t_out_over_loss = s.number("t_out_over_loss", cfg.budget.t_out_over_loss);
    cfg.budget.fsr_hz = s.number("fsr_hz", cfg.budget.fsr_hz);
    cfg.budget.fwhm_hz = s.number("fwhm_hz", cfg.budget.fwhm_hz);
    cfg.budget.wavelength_m = s.number("wavelength_m", cfg.budget.wavelength_m);
    cfg.budget.waist_m = s.number("waist_m", cfg.budget.waist_m);
    cfg.budget.solid_angle_sr = s.optional_number("solid_angle_sr");
    cfg.budget.isotropic_per_s = s.optional_number("isotropic_per_s");
    s.finish();
    require(cfg.budget.detected_per_s > 0.0, "budget.detected_per_s must be > 0");
    require(cfg.budget.t_out_over_loss >= 0.0 && cfg.budget.t_out_over_loss <= 1.0,
            "budget.t_out_over_loss must lie in [0, 1]");
    require(cfg.budget.fsr_hz > 0.0 && cfg.budget.fwhm_hz > 0.0, "budget.fsr_hz and budget.fwhm_hz must be > 0");
    require(cfg.budget.wavelength_m > 0.0 && cfg.budget.waist_m > 0.0,
            "budget.wavelength_m and budget.waist_m must be > 0");
    bool found = false;
    for (const auto& st : cfg.budget.stages) found = found || st.label == cfg.budget.output_stage;
    require(found, "budget.output_stage '" + cfg.budget.output_stage + "' names no stage");
  }
  if (const auto* t = top.child("trap")) {
    detail::Section s(*t, "trap");
    cfg.trap.rf_volts = s.number("rf_volts", cfg.trap.rf_volts);
    cfg.trap.rf_hz = s.number("rf_hz", cfg.trap.rf_hz);
    cfg.trap.mass_amu = s.number("mass_amu", cfg.trap.mass_amu);
    cfg.trap.eta = s.number("eta", cfg.trap.eta);
    cfg.trap.separation_um = s.number("separation_um", cfg.trap.separation_um);
    cfg.trap.anisotropy = s.number("anisotropy", cfg.trap.anisotropy);
    s.finish();
    require(cfg.trap.rf_volts > 0.0 && cfg.trap.rf_hz > 0.0 && cfg.trap.mass_amu > 0.0,
            "trap.rf_volts, trap.rf_hz and trap.mass_amu must be > 0");
    require(cfg.trap.eta > 0.0 && cfg.trap.eta <= 1.0, "trap.eta must lie in (0, 1]");
    require(cfg.trap.separation_um > 0.0, "trap.separation_um must be > 0");
    require(cfg.trap.anisotropy >= 0.0 && cfg.trap.anisotropy <= 1.0, "trap.anisotropy must lie in [0, 1]");
  }
  if (const auto* r = top.child("resonator")) {
    detail::Section s(*r, "resonator");
    cfg.resonator.length_m = s.number("length_m", cfg.resonator.length_m);
    cfg.resonator.radius_ir_m = s.number("radius_ir_m", cfg.resonator.radius_ir_m);
    cfg.resonator.radius_uv_m = s.number("radius_uv_m", cfg.resonator.radius_uv_m);
    cfg.resonator.wavelength_ir_m = s.number("wavelength_ir_m", cfg.resonator.wavelength_ir_m);
    cfg.resonator.offset_hz = s.number("offset_hz", cfg.resonator.offset_hz);
    s.finish();
    require(cfg.resonator.length_m > 0.0 && cfg.resonator.radius_ir_m > 0.0 &&
                cfg.resonator.radius_uv_m > 0.0 && cfg.resonator.wavelength_ir_m > 0.0,
            "resonator lengths and radii must be > 0");
    require(cfg.resonator.length_m < 2.0 * cfg.resonator.radius_ir_m &&
                cfg.resonator.length_m < 2.0 * cfg.resonator.radius_uv_m,
            "resonator.length_m must be below twice each mirror radius");
  }
  top.finish();
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const Error& e) {
    rethrow_with_context(e, path);
  }
}

inline constexpr const char* trap_csv_header = "u0_volts,separation_um,axis,omega_hz";

/// Trap measurements from CSV text (header as above, linear frequencies).
inline std::vector<TrapMeasurement> parse_trap_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trap CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != trap_csv_header)
    throw ConfigError("trap CSV header must be '" + std::string(trap_csv_header) + "', got '" + line + "'");
  std::vector<TrapMeasurement> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    const std::string where = "trap CSV line " + std::to_string(row);
    if (f.size() != 4) throw ConfigError(where + ": expected 4 fields");
    auto num = [&](const std::string& s, const char* name) {
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(where + ": field " + name + " is not a number");
      }
    };
    TrapMeasurement m;
    m.u0 = num(f[0], "u0_volts");
    m.separation = num(f[1], "separation_um") * 1e-6;
    m.axis = parse_axis(f[2]);
    m.omega = units::angular(num(f[3], "omega_hz"));
    out.push_back(m);
  }
  if (out.empty()) throw ConfigError("trap CSV has no data rows");
  return out;
}

inline std::vector<TrapMeasurement> read_trap_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trap CSV '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trap_csv(ss.str());
}

}  // namespace ioncav
