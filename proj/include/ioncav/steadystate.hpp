#pragma once

// Master-equation assembly and steady-state solution.
//
// Vectorization is column stacking: vec(rho)[i + j d] = rho(i, j), so that
// vec(A X B) = (B^T (x) A) vec(X).

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ioncav/cavity_model.hpp"
#include "ioncav/errors.hpp"
#include "ioncav/ion_model.hpp"
#include "ioncav/qspace.hpp"
#include "ioncav/sparse_lu.hpp"

namespace ioncav {

/// Condition-number estimate above which the steady state is declared
/// non-unique.
inline constexpr double non_unique_condition_threshold = 1e12;
/// Eigenvalues of the steady state in [-tol, 0) are clipped to zero; more
/// negative values raise NegativityError.
inline constexpr double negativity_tolerance = 1e-10;

/// All physical inputs of the coupled ion-cavity model, angular units.
struct SystemParams {
  double gamma = 0.0;    // excited-state decay rate (rad/s)
  double delta_0 = 0.0;  // atom-laser detuning w_0 - w_L (rad/s)
  ZeemanParams zeeman;
  CavityParams cavity;
  double i_rel = 0.0;    // I / I_sat
  DriveGeometry geometry;

  void validate() const {
    if (!(gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    if (!std::isfinite(delta_0)) throw DomainError("delta_0 must be finite");
    if (!(i_rel >= 0.0)) throw DomainError("relative intensity must be >= 0");
    zeeman.validate();
    cavity.validate();
    geometry.validate();
  }

  double rabi() const { return rabi_from_intensity(i_rel, gamma); }

  /// Every rate and detuning multiplied by `factor` (I/I_sat unchanged, so
  /// the Rabi frequency scales through gamma).
  SystemParams scaled(double factor) const {
    SystemParams s = *this;
    s.gamma *= factor;
    s.delta_0 *= factor;
    s.zeeman.delta_s *= factor;
    s.zeeman.delta_p *= factor;
    s.cavity.g *= factor;
    s.cavity.kappa *= factor;
    s.cavity.delta_c *= factor;
    return s;
  }
};

/// Sparse superoperator acting on column-stacked density matrices.
struct Liouvillian {
  SpaceLayout layout;
  SparseMatrix matrix;

  std::size_t dim() const noexcept { return layout.total(); }
};

namespace detail {

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

inline std::vector<Entry> nonzeros(const Matrix& m) {
  std::vector<Entry> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0, 0.0)) out.push_back({i, j, m(i, j)});
  return out;
}

/// Append coeff * (B^T (x) A) for d x d operators given as nonzero lists.
inline void add_kron(std::vector<Eigen::Triplet<Complex>>& out, const std::vector<Entry>& b,
                     const std::vector<Entry>& a, Eigen::Index d, Complex coeff) {
  for (const Entry& eb : b) {
    // (B^T)(p, q) = B(q, p)
    const Eigen::Index p = eb.col;
    const Eigen::Index q = eb.row;
    for (const Entry& ea : a)
      out.emplace_back(ea.row + p * d, ea.col + q * d, coeff * eb.value * ea.value);
  }
}

inline std::vector<Entry> identity_entries(Eigen::Index d) {
  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) out.push_back({i, i, Complex(1.0, 0.0)});
  return out;
}

inline double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

/// Induced 1-norm (max column sum).
inline double norm1(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    out = std::max(out, col);
  }
  return out;
}

}  // namespace detail

/// Superoperator for d(rho)/dt = -i[H, rho] + sum_k (C rho C^+ - 1/2 {C^+ C, rho}).
/// `collapse` holds already-scaled Lindblad operators.
inline Liouvillian build_liouvillian(const Operator& h, std::span<const Operator> collapse) {
  const double hscale = h.matrix().size() ? h.matrix().cwiseAbs().maxCoeff() : 0.0;
  if (h.hermiticity_error() > 1e-12 * std::max(1.0, hscale))
    throw ModelError("Hamiltonian is not Hermitian (max |H - H^+| = " +
                     std::to_string(h.hermiticity_error()) + ")");
  for (const Operator& c : collapse)
    if (!(c.layout() == h.layout())) throw LayoutError("collapse operator layout differs from H");

  const auto d = static_cast<Eigen::Index>(h.dim());
  const Complex i(0.0, 1.0);
  const auto id = detail::identity_entries(d);
  std::vector<Eigen::Triplet<Complex>> triplets;

  const auto hn = detail::nonzeros(h.matrix());
  detail::add_kron(triplets, id, hn, d, -i);  // -i (I (x) H)
  detail::add_kron(triplets, hn, id, d, i);  // +i (H^T (x) I)
  for (const Operator& c : collapse) {
    const Matrix& cm = c.matrix();
    const Matrix cdc = cm.adjoint() * cm;
    detail::add_kron(triplets, detail::nonzeros(cm.adjoint()), detail::nonzeros(cm), d, 1.0);  // C rho C^+
    const auto cdc_n = detail::nonzeros(cdc);
    detail::add_kron(triplets, id, cdc_n, d, -0.5);
    detail::add_kron(triplets, cdc_n, id, d, -0.5);
  }
  SparseMatrix l(d * d, d * d);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.prune(Complex(0.0, 0.0));
  l.makeCompressed();
  return {h.layout(), std::move(l)};
}

inline Liouvillian build_liouvillian(const Operator& h, const std::vector<CollapseOperator>& collapse) {
  std::vector<Operator> scaled;
  scaled.reserve(collapse.size());
  for (const auto& c : collapse) scaled.push_back(c.scaled());
  return build_liouvillian(h, std::span<const Operator>(scaled));
}

/// Reshape a column-stacked vector into a d x d matrix.
inline Matrix unvec(const Vector& v, Eigen::Index d) {
  Matrix m(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = v(i + j * d);
  return m;
}

inline Vector vec(const Matrix& m) {
  Vector v(m.size());
  const Eigen::Index d = m.rows();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < d; ++i) v(i + j * d) = m(i, j);
  return v;
}

/// ||L vec(rho)||_2 / ||L||_1.
inline double relative_residual(const Liouvillian& l, const Operator& rho) {
  const double n = detail::norm1(l.matrix);
  if (n == 0.0) return 0.0;
  return (l.matrix * vec(rho.matrix())).norm() / n;
}

/// Density matrix returned by solve_steady plus solver diagnostics.
struct SteadyState {
  Operator rho;
  double residual = 0.0;            // relative, see relative_residual
  double condition_estimate = 0.0;  // 1-norm condition of the constrained system
  double min_eigenvalue = 0.0;      // before clipping
};

/// Solve L rho = 0 with tr(rho) = 1 by replacing the (0,0) population
/// equation with the trace constraint, then Hermitize and clip.
inline SteadyState solve_steady(const Liouvillian& l) {
  const auto d = static_cast<Eigen::Index>(l.dim());
  const Eigen::Index n = d * d;
  const double scale = detail::max_abs(l.matrix);
  if (scale == 0.0 && d > 1)
    throw NonUniqueSteadyState("Liouvillian is identically zero; every state is stationary");

  const double inv = scale > 0.0 ? 1.0 / scale : 1.0;
  // Replace the rho_00 equation by tr(rho) = 1.
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(l.matrix.nonZeros() + d));
  for (int k = 0; k < l.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(l.matrix, k); it; ++it)
      if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value() * inv);
  for (Eigen::Index k = 0; k < d; ++k) triplets.emplace_back(0, k + k * d, Complex(1.0, 0.0));
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());

  const SparseComplexLU lu(std::move(a));
  if (lu.singular())
    throw NonUniqueSteadyState("constrained Liouvillian is singular: steady state is not unique");

  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  const Vector x = lu.solve(rhs);
  const double cond = lu.condition_estimate();
  if (!std::isfinite(cond) || cond > non_unique_condition_threshold || !x.allFinite())
    throw NonUniqueSteadyState("steady state is not unique (condition estimate " +
                               std::to_string(cond) + ")");

  Matrix rho = unvec(x, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const Complex tr = rho.trace();
  if (std::abs(tr) == 0.0) throw SolverError("steady state has zero trace");
  rho /= tr.real();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double min_ev = ev.minCoeff();
  if (min_ev < -negativity_tolerance)
    throw NegativityError("steady state has eigenvalue " + std::to_string(min_ev));
  if (min_ev < 0.0) {
    const Eigen::VectorXd clipped = ev.cwiseMax(0.0);
    rho = eig.eigenvectors() * clipped.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
  }

  SteadyState out{Operator(l.layout, std::move(rho)), 0.0, cond, min_ev};
  out.residual = relative_residual(l, out.rho);
  return out;
}

/// Steady state plus the observables derived from it.
struct SteadyStateResult {
  Operator rho;
  double n_h = 0.0;
  double n_v = 0.0;
  double count_rate = 0.0;  // photons/s leaving the cavity, 2 kappa (n_h + n_v)
  double p_excited = 0.0;
  double residual = 0.0;
  double condition_estimate = 0.0;
  double min_eigenvalue = 0.0;
};

inline SteadyStateResult observables(const Operator& rho, const SystemParams& params) {
  const SpaceLayout& layout = rho.layout();
  if (!(layout == system_layout(params.cavity.n_max)))
    throw LayoutError("density matrix layout does not match the cavity truncation");
  SteadyStateResult r{rho};
  r.n_h = expectation(rho, number_operator(mode_h_slot, layout)).real();
  r.n_v = expectation(rho, number_operator(mode_v_slot, layout)).real();
  r.p_excited = expectation(rho, excited_projector(layout)).real();
  r.count_rate = 2.0 * params.cavity.kappa * (r.n_h + r.n_v);
  return r;
}

/// Full Hamiltonian and dissipators for one parameter set.
struct SystemModel {
  SpaceLayout layout;
  Operator hamiltonian;
  std::vector<CollapseOperator> collapse;
};

inline SystemModel build_system(const SystemParams& p) {
  p.validate();
  const SpaceLayout layout = system_layout(p.cavity.n_max);
  const PolVector eps = drive_polarization(p.geometry);
  Operator h = embed(build_h_atom(p.delta_0, p.zeeman) + build_h_drive(p.rabi(), eps), atom_slot,
                     layout);
  h += build_h_cav(p.cavity, layout);
  h += build_h_jc(p.cavity, layout);
  return {layout, std::move(h), collapse_operators(p.gamma, p.cavity, layout)};
}

inline SteadyStateResult solve_system(const SystemParams& p) {
  const SystemModel model = build_system(p);
  const Liouvillian l = build_liouvillian(model.hamiltonian, model.collapse);
  SteadyState ss = solve_steady(l);
  SteadyStateResult r = observables(ss.rho, p);
  r.residual = ss.residual;
  r.condition_estimate = ss.condition_estimate;
  r.min_eigenvalue = ss.min_eigenvalue;
  return r;
}

struct TruncationReport {
  int n_max = 0;          // truncation used for the reported answer
  int n_max_checked = 0;  // the next truncation used for comparison
  double photons = 0.0;   // n_h + n_v at n_max
  double photons_checked = 0.0;
  double relative_change = 0.0;
  bool converged = false;
};

/// Compare total photon number at n_max and n_max + 1.
inline TruncationReport converge_truncation(const SystemParams& p, double tolerance = 1e-3) {
  if (p.cavity.n_max > max_fock_cutoff - 1)
    throw InvalidTruncation("convergence check needs n_max <= " +
                            std::to_string(max_fock_cutoff - 1));
  SystemParams next = p;
  next.cavity.n_max = p.cavity.n_max + 1;
  const SteadyStateResult a = solve_system(p);
  const SteadyStateResult b = solve_system(next);
  TruncationReport rep;
  rep.n_max = p.cavity.n_max;
  rep.n_max_checked = next.cavity.n_max;
  rep.photons = a.n_h + a.n_v;
  rep.photons_checked = b.n_h + b.n_v;
  const double denom = std::max(std::abs(rep.photons), std::abs(rep.photons_checked));
  rep.relative_change = denom > 0.0 ? std::abs(rep.photons_checked - rep.photons) / denom : 0.0;
  rep.converged = rep.relative_change <= tolerance;
  return rep;
}

}  // namespace ioncav
