#pragma once

// Four-level S1/2 <-> P1/2 Zeeman structure of a nuclear-spin-free ion.
//
// Basis order (fixed everywhere): |S,-1/2>, |S,+1/2>, |P,-1/2>, |P,+1/2>.
// Lab frame: z along the magnetic field, x along the cavity axis, y = z cross x.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "ioncav/errors.hpp"
#include "ioncav/qspace.hpp"
#include "ioncav/units.hpp"

namespace ioncav {

enum class AtomLevel : std::size_t { s_minus = 0, s_plus = 1, p_minus = 2, p_plus = 3 };

inline constexpr std::size_t atom_dim = 4;

constexpr std::size_t index_of(AtomLevel l) noexcept { return static_cast<std::size_t>(l); }

/// Zeeman half-splittings (rad/s): ground levels sit at -/+delta_s,
/// excited levels at delta_0 -/+ delta_p.
struct ZeemanParams {
  double delta_s = 0.0;
  double delta_p = 0.0;

  void validate() const {
    if (!(delta_s >= 0.0) || !(delta_p >= 0.0))
      throw DomainError("Zeeman splittings must be >= 0");
  }
};

/// Pump direction and linear polarization angle.
///
/// The beam travels along k = (sin theta_k, 0, cos theta_k). The polarization
/// is rotated by psi_pol inside the plane transverse to k, starting from the
/// normalized projection of the cavity axis onto that plane (or from y when
/// the projection vanishes, i.e. a beam along the cavity axis).
struct DriveGeometry {
  double theta_k = 0.0;
  double psi_pol = 0.0;

  void validate() const {
    if (!(theta_k >= 0.0 && theta_k <= units::pi))
      throw DomainError("theta_k must lie in [0, pi], got " + std::to_string(theta_k));
    if (!(psi_pol >= 0.0 && psi_pol < units::pi))
      throw DomainError("psi_pol must lie in [0, pi), got " + std::to_string(psi_pol));
  }
};

/// Unit complex 3-vector in the lab Cartesian frame.
class PolVector {
 public:
  PolVector(Complex x, Complex y, Complex z) : c_{x, y, z} {
    const double n2 = std::norm(x) + std::norm(y) + std::norm(z);
    if (std::abs(n2 - 1.0) > 1e-12)
      throw DomainError("polarization vector is not unit norm (|e|^2 = " + std::to_string(n2) +
                        ")");
  }

  /// Scale an arbitrary nonzero vector to unit length.
  static PolVector normalized(Complex x, Complex y, Complex z) {
    const double n = std::sqrt(std::norm(x) + std::norm(y) + std::norm(z));
    if (n == 0.0) throw DomainError("cannot normalize a zero polarization vector");
    return {x / n, y / n, z / n};
  }

  static PolVector x_hat() { return {1.0, 0.0, 0.0}; }
  static PolVector y_hat() { return {0.0, 1.0, 0.0}; }
  static PolVector z_hat() { return {0.0, 0.0, 1.0}; }

  Complex x() const noexcept { return c_[0]; }
  Complex y() const noexcept { return c_[1]; }
  Complex z() const noexcept { return c_[2]; }
  Complex operator[](std::size_t i) const { return c_.at(i); }

  PolVector conj() const { return {std::conj(c_[0]), std::conj(c_[1]), std::conj(c_[2])}; }

 private:
  std::array<Complex, 3> c_;
};

/// Spherical components (v_-1, v_0, v_+1) with v_q = e_q^* . v and
/// e_{+-1} = -+(x +- i y)/sqrt2, e_0 = z.
struct SphericalComponents {
  std::array<Complex, 3> v{};  // indexed by q + 1

  Complex operator[](int q) const { return v.at(static_cast<std::size_t>(q + 1)); }
  double norm2() const { return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]); }
};

inline SphericalComponents spherical_components(const PolVector& e) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  SphericalComponents out;
  out.v[0] = s * (e.x() + i * e.y());   // q = -1
  out.v[1] = e.z();                     // q =  0
  out.v[2] = -s * (e.x() - i * e.y());  // q = +1
  return out;
}

/// <1,q; 1/2,m_s | 1/2,m_p> in the Condon-Shortley convention, with the
/// photon angular momentum coupled first. Arguments are doubled
/// projections for the half-integer spins: two_m_s, two_m_p in {-1, +1}.
inline double cg_coeff(int two_m_s, int q, int two_m_p) {
  if ((two_m_s != 1 && two_m_s != -1) || (two_m_p != 1 && two_m_p != -1) || q < -1 || q > 1)
    throw DomainError("invalid quantum numbers (2m_s=" + std::to_string(two_m_s) +
                      ", q=" + std::to_string(q) + ", 2m_p=" + std::to_string(two_m_p) + ")");
  if (two_m_p != two_m_s + 2 * q) return 0.0;
  // j1 = 1 (x) j2 = 1/2 -> J = j1 - 1/2:
  //   <1, M-1/2; 1/2, +1/2 | J M> = -sqrt((1 - M + 1/2) / 3)
  //   <1, M+1/2; 1/2, -1/2 | J M> = +sqrt((1 + M + 1/2) / 3)
  const double m = 0.5 * two_m_p;
  if (two_m_s == 1) return -std::sqrt((1.5 - m) / 3.0);
  return std::sqrt((1.5 + m) / 3.0);
}

/// Spherical components {A_-1, A_0, A_+1} of the dipole lowering operator on
/// the 4-dim atomic space: A_q = sum_m cg(m, q, m+q) |S,m><P,m+q|.
inline std::array<Operator, 3> lowering_operators() {
  std::array<Operator, 3> out{Operator::zero(SpaceLayout{atom_dim}),
                              Operator::zero(SpaceLayout{atom_dim}),
                              Operator::zero(SpaceLayout{atom_dim})};
  for (int q = -1; q <= 1; ++q) {
    Matrix m = Matrix::Zero(atom_dim, atom_dim);
    for (int two_ms : {-1, 1}) {
      for (int two_mp : {-1, 1}) {
        const double c = cg_coeff(two_ms, q, two_mp);
        if (c == 0.0) continue;
        const auto row = static_cast<Eigen::Index>(two_ms < 0 ? AtomLevel::s_minus : AtomLevel::s_plus);
        const auto col = static_cast<Eigen::Index>(two_mp < 0 ? AtomLevel::p_minus : AtomLevel::p_plus);
        m(row, col) = c;
      }
    }
    out[static_cast<std::size_t>(q + 1)] = Operator(std::move(m));
  }
  return out;
}

/// A.e = sum_q A_q (e_q)^*: lowering part of the dipole coupling to field
/// polarization e. Its adjoint raises with amplitude e_q on Delta m = q.
inline Operator dipole_projection(const std::array<Operator, 3>& lowering, const PolVector& e) {
  const SphericalComponents c = spherical_components(e);
  Operator out = Operator::zero(lowering[0].layout());
  for (int q = -1; q <= 1; ++q) out += std::conj(c[q]) * lowering[static_cast<std::size_t>(q + 1)];
  return out;
}

/// Real linear polarization for the given pump geometry (see DriveGeometry).
inline PolVector drive_polarization(const DriveGeometry& g) {
  g.validate();
  const double st = std::sin(g.theta_k);
  const double ct = std::cos(g.theta_k);
  const std::array<double, 3> k{st, 0.0, ct};
  // Projection of x onto the plane orthogonal to k.
  std::array<double, 3> ref{1.0 - st * st, 0.0, -st * ct};
  const double norm = std::sqrt(ref[0] * ref[0] + ref[2] * ref[2]);
  if (norm < 1e-12) {
    ref = {0.0, 1.0, 0.0};
  } else {
    for (double& r : ref) r /= norm;
  }
  // second transverse direction k x ref
  const std::array<double, 3> b{k[1] * ref[2] - k[2] * ref[1], k[2] * ref[0] - k[0] * ref[2],
                                k[0] * ref[1] - k[1] * ref[0]};
  const double cp = std::cos(g.psi_pol);
  const double sp = std::sin(g.psi_pol);
  return PolVector::normalized(cp * ref[0] + sp * b[0], cp * ref[1] + sp * b[1],
                               cp * ref[2] + sp * b[2]);
}

/// Propagation direction used by drive_polarization.
inline std::array<double, 3> drive_direction(const DriveGeometry& g) {
  return {std::sin(g.theta_k), 0.0, std::cos(g.theta_k)};
}

/// Atomic Hamiltonian in the frame rotating at the laser frequency (hbar = 1).
inline Operator build_h_atom(double delta_0, const ZeemanParams& z) {
  z.validate();
  Matrix h = Matrix::Zero(atom_dim, atom_dim);
  h(0, 0) = -z.delta_s;
  h(1, 1) = z.delta_s;
  h(2, 2) = delta_0 - z.delta_p;
  h(3, 3) = delta_0 + z.delta_p;
  return Operator(std::move(h));
}

/// Classical drive: -(Omega/2) [A.e + (A.e)^dagger].
inline Operator build_h_drive(double omega_rabi, const PolVector& eps) {
  const Operator lower = dipole_projection(lowering_operators(), eps);
  return Complex(-0.5 * omega_rabi, 0.0) * (lower + lower.adjoint());
}

/// Omega = gamma sqrt(I / 2 I_sat).
inline double rabi_from_intensity(double i_rel, double gamma) {
  if (!(i_rel >= 0.0))
    throw DomainError("relative intensity must be >= 0, got " + std::to_string(i_rel));
  return gamma * std::sqrt(0.5 * i_rel);
}

}  // namespace ioncav
