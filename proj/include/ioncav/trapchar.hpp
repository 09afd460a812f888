#pragma once

// RF-trap secular frequencies in the lowest-order pseudopotential and
// extraction of the voltage efficiency factor from measured frequencies.

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

/// x0 is half the electrode separation (m); omega_rf in rad/s; v0 is the
/// RF amplitude and u0 the DC bias on the RF electrode (V).
struct TrapGeometry {
  double x0 = 0.0;
  double eta = 0.0;
  double omega_rf = 0.0;
  double v0 = 0.0;
  double u0 = 0.0;
  double mass = 0.0;

  void validate() const {
    if (!(x0 > 0.0) || !(omega_rf > 0.0) || !(mass > 0.0))
      throw DomainError("x0, omega_rf and mass must be positive");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  }
};

enum class TrapAxis { x, y, z };

inline TrapAxis parse_axis(const std::string& s) {
  if (s == "x") return TrapAxis::x;
  if (s == "y") return TrapAxis::y;
  if (s == "z") return TrapAxis::z;
  throw ConfigError("unknown trap axis '" + s + "' (expected x, y or z)");
}

inline const char* to_string(TrapAxis a) {
  switch (a) {
    case TrapAxis::x: return "x";
    case TrapAxis::y: return "y";
    case TrapAxis::z: return "z";
  }
  return "?";
}

/// Curvatures of the trap potential (1/m^2). The z component is built as
/// -(q_x + q_y) so the sum is zero in floating point.
struct QuadrupoleMoments {
  double q_x = 0.0;
  double q_y = 0.0;
  double q_z = 0.0;

  double operator[](TrapAxis a) const {
    switch (a) {
      case TrapAxis::x: return q_x;
      case TrapAxis::y: return q_y;
      case TrapAxis::z: return q_z;
    }
    return 0.0;
  }
};

/// q_x = eta / x0^2, q_y = -r q_x, q_z = -(1 - r) q_x.
inline QuadrupoleMoments quadrupole_from_eta(double eta, double x0, double r) {
  if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("anisotropy r must lie in [0, 1], got " + std::to_string(r));
  QuadrupoleMoments q;
  q.q_x = eta / (x0 * x0);
  q.q_y = -r * q.q_x;
  q.q_z = -(q.q_x + q.q_y);
  return q;
}

/// e U0 Q / m + (1/2) (e V0 Q / (m Omega))^2, the square of the secular frequency.
inline double secular_radicand(double u0, double v0, double omega_rf, double q, double mass) {
  if (!(omega_rf > 0.0) || !(mass > 0.0)) throw DomainError("omega_rf and mass must be positive");
  const double e = units::elementary_charge;
  const double rf = e * v0 * q / (mass * omega_rf);
  return e * u0 * q / mass + 0.5 * rf * rf;
}

/// Secular angular frequency (rad/s) along an axis with curvature q.
inline double secular_frequency(double u0, double v0, double omega_rf, double q, double mass) {
  const double rad = secular_radicand(u0, v0, omega_rf, q, mass);
  if (rad < 0.0)
    throw InstabilityError("bias " + std::to_string(u0) + " V leaves the trap unconfined (radicand " +
                               std::to_string(rad) + " s^-2)",
                           rad);
  return std::sqrt(rad);
}

/// DC bias at which the radicand vanishes on an axis with curvature q < 0.
inline double instability_threshold(double v0, double omega_rf, double q, double mass) {
  if (q == 0.0) throw DomainError("threshold undefined for zero curvature");
  const double e = units::elementary_charge;
  return -0.5 * e * v0 * v0 * q / (mass * omega_rf * omega_rf);
}

struct TrapMeasurement {
  double u0 = 0.0;          // V
  double separation = 0.0;  // 2 x0, m
  TrapAxis axis = TrapAxis::x;
  double omega = 0.0;       // rad/s
};

struct TrapDrive {
  double v0 = 0.0;
  double omega_rf = 0.0;
  double mass = 0.0;
};

struct EtaFit {
  double separation = 0.0;  // m
  double eta = 0.0;
  double r = 0.0;
  double sse = 0.0;  // (rad/s)^2
  std::size_t points = 0;
};

struct EtaFitReport {
  std::vector<EtaFit> fits;  // ordered by separation
  double sse = 0.0;
};

namespace detail {

struct EtaProblem {
  const std::vector<TrapMeasurement>* data;
  TrapDrive drive;
  double x0;
};

inline double model_omega(const TrapMeasurement& m, const TrapDrive& d, double x0, double eta,
                          double r, double* d_eta, double* d_r) {
  const double base = eta / (x0 * x0);
  double q = 0.0, dq_eta = 0.0, dq_r = 0.0;
  switch (m.axis) {
    case TrapAxis::x: q = base; dq_eta = 1.0 / (x0 * x0); break;
    case TrapAxis::y: q = -r * base; dq_eta = -r / (x0 * x0); dq_r = -base; break;
    case TrapAxis::z: q = -(1.0 - r) * base; dq_eta = -(1.0 - r) / (x0 * x0); dq_r = base; break;
  }
  const double rad = secular_radicand(m.u0, d.v0, d.omega_rf, q, d.mass);
  const double w = std::sqrt(std::max(rad, 0.0));
  if (d_eta || d_r) {
    const double e = units::elementary_charge;
    const double k = e * d.v0 / (d.mass * d.omega_rf);
    const double drad_dq = e * m.u0 / d.mass + k * k * q;
    const double dw_dq = w > 0.0 ? 0.5 * drad_dq / w : 0.0;
    if (d_eta) *d_eta = dw_dq * dq_eta;
    if (d_r) *d_r = dw_dq * dq_r;
  }
  return w;
}

inline int eta_residual(const gsl_vector* p, void* params, gsl_vector* f) {
  const auto* prob = static_cast<const EtaProblem*>(params);
  const double eta = gsl_vector_get(p, 0);
  const double r = gsl_vector_get(p, 1);
  for (std::size_t i = 0; i < prob->data->size(); ++i) {
    const auto& m = (*prob->data)[i];
    gsl_vector_set(f, i, model_omega(m, prob->drive, prob->x0, eta, r, nullptr, nullptr) - m.omega);
  }
  return GSL_SUCCESS;
}

inline int eta_jacobian(const gsl_vector* p, void* params, gsl_matrix* j) {
  const auto* prob = static_cast<const EtaProblem*>(params);
  const double eta = gsl_vector_get(p, 0);
  const double r = gsl_vector_get(p, 1);
  for (std::size_t i = 0; i < prob->data->size(); ++i) {
    double de = 0.0, dr = 0.0;
    model_omega((*prob->data)[i], prob->drive, prob->x0, eta, r, &de, &dr);
    gsl_matrix_set(j, i, 0, de);
    gsl_matrix_set(j, i, 1, dr);
  }
  return GSL_SUCCESS;
}

/// |Q| from a frequency via the RF term alone.
inline double rf_only_curvature(double omega, const TrapDrive& d) {
  return std::sqrt(2.0) * d.mass * d.omega_rf * omega / (units::elementary_charge * d.v0);
}

inline EtaFit fit_one_separation(const std::vector<TrapMeasurement>& data, const TrapDrive& drive) {
  const double x0 = 0.5 * data.front().separation;
  std::set<TrapAxis> axes;
  for (const auto& m : data) axes.insert(m.axis);
  if (data.size() < 2 || axes.size() < 2)
    throw UnderdeterminedError("separation " + std::to_string(data.front().separation * 1e6) +
                               " um: need >= 2 measurements on >= 2 distinct axes to fit eta and r");

  // Start from the RF-only estimate at the smallest |u0| on each axis.
  std::map<TrapAxis, const TrapMeasurement*> nearest;
  for (const auto& m : data)
    if (!nearest.count(m.axis) || std::abs(m.u0) < std::abs(nearest[m.axis]->u0)) nearest[m.axis] = &m;
  double eta0 = 0.0, r0 = 0.5;
  if (nearest.count(TrapAxis::x)) {
    eta0 = rf_only_curvature(nearest[TrapAxis::x]->omega, drive) * x0 * x0;
    if (nearest.count(TrapAxis::y))
      r0 = rf_only_curvature(nearest[TrapAxis::y]->omega, drive) * x0 * x0 / eta0;
    else
      r0 = 1.0 - rf_only_curvature(nearest[TrapAxis::z]->omega, drive) * x0 * x0 / eta0;
  } else {
    // |q_y| + |q_z| = q_x
    const double qy = rf_only_curvature(nearest[TrapAxis::y]->omega, drive);
    const double qz = rf_only_curvature(nearest[TrapAxis::z]->omega, drive);
    eta0 = (qy + qz) * x0 * x0;
    r0 = qy / (qy + qz);
  }
  r0 = std::clamp(r0, 0.0, 1.0);

  EtaProblem prob{&data, drive, x0};
  gsl_set_error_handler_off();
  gsl_multifit_nlinear_fdf fdf;
  fdf.f = eta_residual;
  fdf.df = eta_jacobian;
  fdf.fvv = nullptr;
  fdf.n = data.size();
  fdf.p = 2;
  fdf.params = &prob;
  gsl_multifit_nlinear_parameters fparams = gsl_multifit_nlinear_default_parameters();
  std::unique_ptr<gsl_multifit_nlinear_workspace, void (*)(gsl_multifit_nlinear_workspace*)> w(
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fparams, data.size(), 2),
      gsl_multifit_nlinear_free);
  if (!w) throw SolverError("could not allocate least-squares workspace");
  double start[2] = {eta0, r0};
  gsl_vector_view x = gsl_vector_view_array(start, 2);
  gsl_multifit_nlinear_init(&x.vector, &fdf, w.get());
  int info = 0;
  const int status = gsl_multifit_nlinear_driver(500, 1e-12, 1e-12, 0.0, nullptr, nullptr, &info, w.get());
  if (status != GSL_SUCCESS && status != GSL_EMAXITER && status != GSL_ENOPROG)
    throw SolverError(std::string("eta fit failed: ") + gsl_strerror(status));

  EtaFit fit;
  fit.separation = data.front().separation;
  fit.eta = gsl_vector_get(w->x, 0);
  fit.r = gsl_vector_get(w->x, 1);
  double chisq = 0.0;
  gsl_blas_ddot(w->f, w->f, &chisq);
  fit.sse = chisq;
  fit.points = data.size();
  if (!(fit.r >= 0.0 && fit.r <= 1.0))
    throw ModelError("fitted anisotropy r = " + std::to_string(fit.r) + " lies outside [0, 1]");
  return fit;
}

}  // namespace detail

/// Least-squares (eta, r) for every electrode separation in the data set.
inline EtaFitReport fit_eta(const std::vector<TrapMeasurement>& measurements, const TrapDrive& drive) {
  if (!(drive.v0 > 0.0) || !(drive.omega_rf > 0.0) || !(drive.mass > 0.0))
    throw DomainError("v0, omega_rf and mass must be positive");
  if (measurements.empty()) throw UnderdeterminedError("no trap measurements");
  std::map<double, std::vector<TrapMeasurement>> groups;
  for (const auto& m : measurements) {
    if (!(m.separation > 0.0) || !(m.omega > 0.0) || !std::isfinite(m.u0))
      throw DomainError("measurement needs positive separation and frequency");
    groups[m.separation].push_back(m);
  }
  EtaFitReport rep;
  for (auto& [sep, data] : groups) {
    // Canonical order makes the fit independent of input order.
    std::sort(data.begin(), data.end(), [](const TrapMeasurement& a, const TrapMeasurement& b) {
      if (a.axis != b.axis) return a.axis < b.axis;
      if (a.u0 != b.u0) return a.u0 < b.u0;
      return a.omega < b.omega;
    });
    rep.fits.push_back(detail::fit_one_separation(data, drive));
    rep.sse += rep.fits.back().sse;
  }
  return rep;
}

}  // namespace ioncav
