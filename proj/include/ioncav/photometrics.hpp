#pragma once

// Photon-budget arithmetic: cavity figures of merit, collection
// probability, free-space comparison rates and the detection ladder.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

/// Any consistent subset of cavity data. Lengths in m, frequencies in Hz,
/// mirror figures in parts per million.
struct CavityInputs {
  std::optional<double> length;
  std::optional<double> fsr;
  std::optional<double> fwhm;
  std::optional<double> t_out_ppm;
  std::optional<double> t_in_ppm;
  std::optional<double> loss_ppm;  // absorption + scatter
};

struct CavityMetrics {
  double length = 0.0;
  double fsr = 0.0;
  double fwhm = 0.0;
  double finesse = 0.0;
  double kappa = 0.0;  // field half-width, rad/s (= pi * fwhm)
  double t_out_ppm = 0.0;
  double t_in_ppm = 0.0;
  double loss_ppm = 0.0;
  double total_loss_ppm = 0.0;  // round trip
  double outcoupling_efficiency = 0.0;
};

namespace detail {

inline void require_positive(const std::optional<double>& v, const char* name) {
  if (v && !(*v > 0.0 && std::isfinite(*v)))
    throw DomainError(std::string(name) + " must be positive and finite");
}

inline bool agree(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

/// Fill every field derivable from `in`. Round-trip loss comes from the
/// finesse (2 pi / F) when the linewidth is known, otherwise from the sum of
/// the mirror figures. Over-specified inputs must agree to 1%.
inline CavityMetrics cavity_metrics(const CavityInputs& in) {
  detail::require_positive(in.length, "length");
  detail::require_positive(in.fsr, "fsr");
  detail::require_positive(in.fwhm, "fwhm");
  for (const auto* v : {&in.t_out_ppm, &in.t_in_ppm, &in.loss_ppm})
    if (*v && !(**v >= 0.0 && std::isfinite(**v)))
      throw DomainError("mirror transmission and loss figures must be >= 0");

  CavityMetrics m;
  const double c = units::speed_of_light;
  if (in.length && in.fsr) {
    if (!detail::agree(c / (2.0 * *in.length), *in.fsr, 0.01))
      throw ConsistencyError("length " + std::to_string(*in.length) + " m and fsr " +
                             std::to_string(*in.fsr) + " Hz disagree by more than 1%");
    m.length = *in.length;
    m.fsr = *in.fsr;
  } else if (in.length) {
    m.length = *in.length;
    m.fsr = c / (2.0 * m.length);
  } else if (in.fsr) {
    m.fsr = *in.fsr;
    m.length = c / (2.0 * m.fsr);
  } else {
    throw UnderdeterminedError("cavity metrics need a length or a free spectral range");
  }

  const bool have_all_mirrors = in.t_out_ppm && in.t_in_ppm && in.loss_ppm;
  m.t_out_ppm = in.t_out_ppm.value_or(0.0);
  m.t_in_ppm = in.t_in_ppm.value_or(0.0);
  m.loss_ppm = in.loss_ppm.value_or(0.0);
  const double mirror_sum = m.t_out_ppm + m.t_in_ppm + m.loss_ppm;

  if (in.fwhm) {
    m.fwhm = *in.fwhm;
    m.finesse = m.fsr / m.fwhm;
    m.total_loss_ppm = 1e6 * units::two_pi / m.finesse;
    if (have_all_mirrors && !detail::agree(mirror_sum, m.total_loss_ppm, 0.01))
      throw ConsistencyError("mirror losses sum to " + std::to_string(mirror_sum) +
                             " ppm but the finesse implies " + std::to_string(m.total_loss_ppm) +
                             " ppm");
  } else if (have_all_mirrors && mirror_sum > 0.0) {
    m.total_loss_ppm = mirror_sum;
    m.finesse = units::two_pi / (1e-6 * mirror_sum);
    m.fwhm = m.fsr / m.finesse;
  }
  m.kappa = units::pi * m.fwhm;

  if (in.t_out_ppm && m.total_loss_ppm > 0.0) {
    m.outcoupling_efficiency = m.t_out_ppm / m.total_loss_ppm;
    if (m.outcoupling_efficiency > 1.0 + 1e-12)
      throw ConsistencyError("output transmission exceeds the total round-trip loss");
  }
  return m;
}

/// (T_out / L) * 2 kappa / (2 kappa + gamma) * 2 C / (1 + 2 C). Infinite
/// kappa or c_eff take their limiting value.
inline double collection_probability(double t_out_over_loss, double kappa, double gamma,
                                     double c_eff) {
  if (!(t_out_over_loss >= 0.0 && t_out_over_loss <= 1.0))
    throw DomainError("outcoupling efficiency must lie in [0, 1]");
  if (!(kappa >= 0.0) || !(gamma >= 0.0) || !(c_eff >= 0.0))
    throw DomainError("kappa, gamma and c_eff must be >= 0");
  const double leak = std::isinf(kappa) ? 1.0 : (kappa + gamma > 0.0 ? 2.0 * kappa / (2.0 * kappa + gamma) : 0.0);
  const double purcell = std::isinf(c_eff) ? 1.0 : 2.0 * c_eff / (1.0 + 2.0 * c_eff);
  return t_out_over_loss * leak * purcell;
}

/// 2 lambda^2 / (pi w0^2): twice the solid angle of the mode in one direction.
inline double cavity_solid_angle(double lambda, double w0) {
  if (!(lambda > 0.0) || !(w0 > 0.0)) throw DomainError("wavelength and waist must be positive");
  return 2.0 * lambda * lambda / (units::pi * w0 * w0);
}

/// Two-level scattering rate (1/s) at saturation parameter s = i_rel.
inline double scatter_rate(double i_rel, double delta, double gamma) {
  if (!(i_rel >= 0.0)) throw DomainError("saturation parameter must be >= 0");
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  if (std::isinf(i_rel)) return 0.5 * gamma;
  const double x = 2.0 * delta / gamma;
  return 0.5 * gamma * i_rel / (1.0 + i_rel + x * x);
}

/// Free-space rate into half of `solid_angle_full` (the outcoupling side).
inline double isotropic_rate(double gamma_sc, double solid_angle_full) {
  if (!(gamma_sc >= 0.0) || !(solid_angle_full > 0.0))
    throw DomainError("rate must be >= 0 and solid angle > 0");
  return gamma_sc * 0.5 * solid_angle_full / (4.0 * units::pi);
}

struct EfficiencyStage {
  std::string label;
  double efficiency = 1.0;
};

struct EfficiencyChain {
  double detected = 0.0;
  std::vector<EfficiencyStage> stages;
  std::vector<double> rates;  // rate in front of each stage, walking back from the detector

  double source_rate() const { return rates.empty() ? detected : rates.back(); }
};

/// Back-propagate a detected rate through loss stages ordered from the
/// detector outward.
inline EfficiencyChain efficiency_chain(double detected, std::vector<EfficiencyStage> stages) {
  if (!(detected > 0.0) || !std::isfinite(detected)) throw DomainError("detected rate must be > 0");
  EfficiencyChain chain{detected, std::move(stages), {}};
  double rate = detected;
  for (const auto& s : chain.stages) {
    if (!(s.efficiency > 0.0 && s.efficiency <= 1.0))
      throw DomainError("efficiency of stage '" + s.label + "' must lie in (0, 1]");
    rate /= s.efficiency;
    chain.rates.push_back(rate);
  }
  return chain;
}

inline EfficiencyChain efficiency_chain(double detected, const std::vector<double>& efficiencies) {
  std::vector<EfficiencyStage> stages;
  for (std::size_t i = 0; i < efficiencies.size(); ++i)
    stages.push_back({"stage_" + std::to_string(i + 1), efficiencies[i]});
  return efficiency_chain(detected, std::move(stages));
}

inline double enhancement_factor(double cavity_output, double isotropic) {
  if (!(isotropic > 0.0)) throw DomainError("isotropic rate must be > 0");
  if (!(cavity_output >= 0.0)) throw DomainError("cavity output must be >= 0");
  return cavity_output / isotropic;
}

/// hbar w0^3 gamma / (12 pi c^2) in W/m^2.
inline double saturation_intensity(double lambda, double gamma) {
  if (!(lambda > 0.0) || !(gamma > 0.0)) throw DomainError("wavelength and gamma must be positive");
  const double c = units::speed_of_light;
  const double w0 = units::two_pi * c / lambda;
  return units::hbar * w0 * w0 * w0 * gamma / (12.0 * units::pi * c * c);
}

}  // namespace ioncav
