#pragma once

// Two degenerate polarization modes of the resonator and their coupling to
// the atomic dipole. Subsystem order is (atom, mode H, mode V).

#include <cmath>
#include <string>
#include <vector>

#include "ioncav/errors.hpp"
#include "ioncav/ion_model.hpp"
#include "ioncav/qspace.hpp"

namespace ioncav {

inline constexpr std::size_t atom_slot = 0;
inline constexpr std::size_t mode_h_slot = 1;
inline constexpr std::size_t mode_v_slot = 2;

inline constexpr int min_fock_cutoff = 1;
inline constexpr int max_fock_cutoff = 3;

/// Rates in rad/s. `kappa` is the field half-linewidth; `delta_c` = w_c - w_L.
struct CavityParams {
  double g = 0.0;
  double kappa = 0.0;
  double delta_c = 0.0;
  int n_max = 2;

  void validate() const {
    if (!(g >= 0.0)) throw DomainError("cavity coupling g must be >= 0");
    if (!(kappa >= 0.0)) throw DomainError("cavity kappa must be >= 0");
    if (!std::isfinite(delta_c)) throw DomainError("cavity detuning must be finite");
    if (n_max < min_fock_cutoff || n_max > max_fock_cutoff)
      throw InvalidTruncation("Fock cutoff must be in [1, 3], got " + std::to_string(n_max));
  }
};

struct ModeBasis {
  PolVector h;  // y: couples sigma+- equally
  PolVector v;  // z: couples pi
};

inline ModeBasis mode_basis() { return {PolVector::y_hat(), PolVector::z_hat()}; }

inline SpaceLayout system_layout(int n_max) {
  if (n_max < 1) throw InvalidTruncation("Fock cutoff must be >= 1");
  const auto m = static_cast<std::size_t>(n_max) + 1;
  return SpaceLayout{atom_dim, m, m};
}

namespace detail {

inline void require_system_layout(const CavityParams& p, const SpaceLayout& layout) {
  if (!(layout == system_layout(p.n_max)))
    throw LayoutError("layout does not match (4, n_max+1, n_max+1) for n_max = " +
                      std::to_string(p.n_max));
}

}  // namespace detail

/// Mode annihilation operator embedded on the full space.
inline Operator mode_annihilation(std::size_t slot, const SpaceLayout& layout) {
  if (slot != mode_h_slot && slot != mode_v_slot) throw LayoutError("not a cavity-mode slot");
  return embed(annihilation(static_cast<int>(layout.dim(slot)) - 1), slot, layout);
}

inline Operator number_operator(std::size_t slot, const SpaceLayout& layout) {
  const Operator a = mode_annihilation(slot, layout);
  return a.adjoint() * a;
}

/// Projector onto the P manifold, embedded on the full space.
inline Operator excited_projector(const SpaceLayout& layout) {
  Matrix p = Matrix::Zero(atom_dim, atom_dim);
  p(2, 2) = 1.0;
  p(3, 3) = 1.0;
  return embed(Operator(std::move(p)), atom_slot, layout);
}

/// Atomic excitation plus photon number in both modes; conserved by H_jc.
inline Operator excitation_number(const SpaceLayout& layout) {
  return excited_projector(layout) + number_operator(mode_h_slot, layout) +
         number_operator(mode_v_slot, layout);
}

inline Operator build_h_cav(const CavityParams& p, const SpaceLayout& layout) {
  p.validate();
  detail::require_system_layout(p, layout);
  return Complex(p.delta_c, 0.0) *
         (number_operator(mode_h_slot, layout) + number_operator(mode_v_slot, layout));
}

/// i g sum_p [a_p^dagger (A.e_p) - (A.e_p)^dagger a_p], using the same
/// dipole projection as the classical drive. The mode vectors are real, so
/// this matches the e_p^* form of the coupling.
inline Operator build_h_jc(const CavityParams& p, const SpaceLayout& layout) {
  p.validate();
  detail::require_system_layout(p, layout);
  const auto lowering = lowering_operators();
  const ModeBasis modes = mode_basis();
  Operator h = Operator::zero(layout);
  const std::pair<std::size_t, const PolVector*> channels[] = {{mode_h_slot, &modes.h},
                                                              {mode_v_slot, &modes.v}};
  for (const auto& [slot, e] : channels) {
    const Operator atom = embed(dipole_projection(lowering, *e), atom_slot, layout);
    const Operator a = mode_annihilation(slot, layout);
    h += a.adjoint() * atom - atom.adjoint() * a;
  }
  return Complex(0.0, p.g) * h;
}

/// A dissipation channel: jump operator and its rate. The Lindblad operator
/// entering the master equation is sqrt(rate) * jump.
struct CollapseOperator {
  std::string label;
  double rate = 0.0;
  Operator jump;

  Operator scaled() const { return Complex(std::sqrt(rate), 0.0) * jump; }
};

/// Spontaneous emission (rate gamma per spherical component) and cavity
/// field decay (rate 2 kappa per mode).
inline std::vector<CollapseOperator> collapse_operators(double gamma, const CavityParams& p,
                                                       const SpaceLayout& layout) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
  p.validate();
  detail::require_system_layout(p, layout);
  const auto lowering = lowering_operators();
  std::vector<CollapseOperator> out;
  out.reserve(5);
  const char* names[] = {"atom_q-1", "atom_q0", "atom_q+1"};
  for (std::size_t i = 0; i < 3; ++i)
    out.push_back({names[i], gamma, embed(lowering[i], atom_slot, layout)});
  out.push_back({"mode_h", 2.0 * p.kappa, mode_annihilation(mode_h_slot, layout)});
  out.push_back({"mode_v", 2.0 * p.kappa, mode_annihilation(mode_v_slot, layout)});
  return out;
}

}  // namespace ioncav
