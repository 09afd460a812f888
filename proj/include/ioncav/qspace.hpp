#pragma once

// Dense complex operator algebra on small composite Hilbert spaces.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ioncav/errors.hpp"

namespace ioncav {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest total Hilbert-space dimension the library accepts.
inline constexpr std::size_t max_total_dimension = 256;

/// Ordered subsystem dimensions of a tensor-product space.
class SpaceLayout {
 public:
  SpaceLayout() : SpaceLayout(std::vector<std::size_t>{1}) {}

  explicit SpaceLayout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw LayoutError("layout needs at least one subsystem");
    total_ = 1;
    for (std::size_t d : dims_) {
      if (d < 1) throw LayoutError("subsystem dimension must be >= 1");
      total_ *= d;
      if (total_ > max_total_dimension)
        throw LayoutError("total dimension exceeds " + std::to_string(max_total_dimension));
    }
  }

  SpaceLayout(std::initializer_list<std::size_t> dims)
      : SpaceLayout(std::vector<std::size_t>(dims)) {}

  std::span<const std::size_t> dims() const noexcept { return dims_; }
  std::size_t subsystems() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t slot) const { return dims_.at(slot); }
  std::size_t total() const noexcept { return total_; }

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

/// A square complex matrix tagged with the layout of the space it acts on.
class Operator {
 public:
  Operator(SpaceLayout layout, Matrix m) : layout_(std::move(layout)), m_(std::move(m)) {
    const auto n = static_cast<Eigen::Index>(layout_.total());
    if (m_.rows() != n || m_.cols() != n)
      throw LayoutError("matrix is " + std::to_string(m_.rows()) + "x" +
                        std::to_string(m_.cols()) + " but layout has total dimension " +
                        std::to_string(n));
  }

  /// Single-subsystem operator inferred from the matrix size.
  explicit Operator(Matrix m)
      : layout_{static_cast<std::size_t>(m.rows())}, m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw LayoutError("operator matrix must be square");
  }

  static Operator zero(const SpaceLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total());
    return {layout, Matrix::Zero(n, n)};
  }
  static Operator identity(const SpaceLayout& layout) {
    const auto n = static_cast<Eigen::Index>(layout.total());
    return {layout, Matrix::Identity(n, n)};
  }

  const SpaceLayout& layout() const noexcept { return layout_; }
  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return layout_.total(); }

  Complex operator()(Eigen::Index row, Eigen::Index col) const { return m_(row, col); }

  Operator adjoint() const { return {layout_, m_.adjoint()}; }
  Complex trace() const { return m_.trace(); }

  /// max |M - M^dagger|
  double hermiticity_error() const {
    if (m_.size() == 0) return 0.0;
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }

  Operator& operator+=(const Operator& o) {
    require_same_layout(o);
    m_ += o.m_;
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    require_same_layout(o);
    m_ -= o.m_;
    return *this;
  }
  Operator& operator*=(Complex s) {
    m_ *= s;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, Complex s) { return a *= s; }
  friend Operator operator*(Complex s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same_layout(b);
    return {a.layout_, a.m_ * b.m_};
  }

 private:
  void require_same_layout(const Operator& o) const {
    if (!(layout_ == o.layout_)) throw LayoutError("operator layouts differ");
  }

  SpaceLayout layout_;
  Matrix m_;
};

/// Truncated bosonic annihilation operator on span{|0>, ..., |n_max>}.
inline Operator annihilation(int n_max) {
  if (n_max < 1)
    throw InvalidTruncation("Fock truncation n_max must be >= 1, got " + std::to_string(n_max));
  const auto dim = static_cast<Eigen::Index>(n_max) + 1;
  Matrix a = Matrix::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(std::move(a));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Tensor product; the result's layout concatenates both layouts.
inline Operator kron(const Operator& a, const Operator& b) {
  std::vector<std::size_t> dims(a.layout().dims().begin(), a.layout().dims().end());
  dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
  return {SpaceLayout(std::move(dims)), kron(a.matrix(), b.matrix())};
}

/// Lift a single-subsystem operator into `layout` at position `slot`,
/// padding every other slot with the identity.
inline Operator embed(const Operator& op, std::size_t slot, const SpaceLayout& layout) {
  if (slot >= layout.subsystems())
    throw LayoutError("slot " + std::to_string(slot) + " out of range");
  if (op.dim() != layout.dim(slot))
    throw LayoutError("operator dimension " + std::to_string(op.dim()) +
                      " does not match slot dimension " + std::to_string(layout.dim(slot)));
  std::size_t left = 1;
  std::size_t right = 1;
  for (std::size_t i = 0; i < slot; ++i) left *= layout.dim(i);
  for (std::size_t i = slot + 1; i < layout.subsystems(); ++i) right *= layout.dim(i);
  const auto l = static_cast<Eigen::Index>(left);
  const auto r = static_cast<Eigen::Index>(right);
  Matrix m = kron(kron(Matrix::Identity(l, l), op.matrix()), Matrix::Identity(r, r));
  return {layout, std::move(m)};
}

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

/// tr(rho * obs). `rho` must be trace-normalized to 1e-9.
inline Complex expectation(const Operator& rho, const Operator& obs) {
  if (!(rho.layout() == obs.layout())) throw LayoutError("rho and observable layouts differ");
  const Complex tr = rho.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > 1e-9)
    throw NormalizationError("density matrix trace is " + std::to_string(tr.real()) + " + " +
                             std::to_string(tr.imag()) + "i, expected 1");
  // tr(AB) = sum_ij A_ij B_ji
  return rho.matrix().cwiseProduct(obs.matrix().transpose()).sum();
}

/// |psi><psi| for a normalized state vector on `layout`.
inline Operator projector(const SpaceLayout& layout, const Vector& psi) {
  return {layout, psi * psi.adjoint()};
}

/// Basis ket for a multi-index over the layout's subsystems.
inline Vector basis_state(const SpaceLayout& layout, std::span<const std::size_t> index) {
  if (index.size() != layout.subsystems()) throw LayoutError("basis index has wrong arity");
  std::size_t flat = 0;
  for (std::size_t s = 0; s < index.size(); ++s) {
    if (index[s] >= layout.dim(s)) throw LayoutError("basis index out of range");
    flat = flat * layout.dim(s) + index[s];
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  v(static_cast<Eigen::Index>(flat)) = 1.0;
  return v;
}

inline Vector basis_state(const SpaceLayout& layout, std::initializer_list<std::size_t> index) {
  return basis_state(layout, std::span<const std::size_t>(index.begin(), index.size()));
}

}  // namespace ioncav
