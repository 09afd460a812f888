#include <gtest/gtest.h>

#include "ioncav/qspace.hpp"

using namespace ioncav;

TEST(SpaceLayout, TotalIsProductOfDims) {
  const SpaceLayout l{4, 3, 3};
  EXPECT_EQ(l.total(), 36u);
  EXPECT_EQ(l.subsystems(), 3u);
  EXPECT_EQ(l.dim(1), 3u);
}

TEST(SpaceLayout, RejectsBadShapes) {
  EXPECT_THROW(SpaceLayout(std::vector<std::size_t>{}), LayoutError);
  EXPECT_THROW((SpaceLayout{4, 0}), LayoutError);
  EXPECT_THROW((SpaceLayout{4, 5, 5, 5}), LayoutError);  // 500 > 256
  EXPECT_NO_THROW((SpaceLayout{4, 4, 4, 4}));            // exactly 256
}

TEST(Operator, RejectsMismatchedMatrix) {
  EXPECT_THROW(Operator(SpaceLayout{2, 2}, Matrix::Zero(3, 3)), LayoutError);
  EXPECT_THROW(Operator(Matrix::Zero(2, 3)), LayoutError);
}

TEST(Operator, ProductRequiresSameLayout) {
  const Operator a = Operator::identity(SpaceLayout{2, 3});
  const Operator b = Operator::identity(SpaceLayout{3, 2});
  EXPECT_THROW(a * b, LayoutError);
  EXPECT_THROW(a + b, LayoutError);
}

TEST(Annihilation, MatrixElements) {
  const Operator a = annihilation(3);
  ASSERT_EQ(a.dim(), 4u);
  for (int n = 1; n <= 3; ++n) EXPECT_DOUBLE_EQ(a(n - 1, n).real(), std::sqrt(double(n)));
  const Operator num = a.adjoint() * a;
  for (int n = 0; n <= 3; ++n) EXPECT_NEAR(num(n, n).real(), n, 1e-15);
  EXPECT_THROW(annihilation(0), InvalidTruncation);
}

TEST(Annihilation, CommutatorIsIdentityExceptTopLevel) {
  const Operator a = annihilation(2);
  const Operator c = commutator(a, a.adjoint());
  EXPECT_NEAR(c(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(c(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(c(2, 2).real(), -2.0, 1e-15);  // truncation artifact
}

TEST(Kron, MatchesIndexFormula) {
  Matrix a(2, 2), b(3, 3);
  a << 1.0, 2.0, Complex(0, 1), 4.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = Complex(i + 1, j);
  const Matrix k = kron(a, b);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_EQ(k(i, j), a(i / 3, j / 3) * b(i % 3, j % 3));
}

TEST(Embed, SlotOrderIsRowMajor) {
  const SpaceLayout l{2, 3};
  const Operator n = embed(annihilation(2).adjoint() * annihilation(2), 1, l);
  const Vector psi = basis_state(l, {1, 2});
  EXPECT_NEAR((n.matrix() * psi - 2.0 * psi).norm(), 0.0, 1e-14);
  EXPECT_THROW(embed(annihilation(1), 1, l), LayoutError);
  EXPECT_THROW(embed(annihilation(2), 2, l), LayoutError);
}

TEST(Embed, OperatorsOnDifferentSlotsCommute) {
  const SpaceLayout l{4, 3, 3};
  const Operator a = embed(annihilation(2), 1, l);
  const Operator b = embed(annihilation(2), 2, l);
  EXPECT_LT(commutator(a, b.adjoint()).matrix().norm(), 1e-14);
}

TEST(Expectation, RequiresNormalizedState) {
  const SpaceLayout l{3};
  const Operator rho = projector(l, basis_state(l, {2}));
  const Operator num = annihilation(2).adjoint() * annihilation(2);
  EXPECT_NEAR(expectation(rho, num).real(), 2.0, 1e-15);
  EXPECT_THROW(expectation(Complex(2.0, 0.0) * rho, num), NormalizationError);
}

TEST(BasisState, RejectsBadIndex) {
  const SpaceLayout l{2, 3};
  EXPECT_THROW(basis_state(l, {0}), LayoutError);
  EXPECT_THROW(basis_state(l, {2, 0}), LayoutError);
}

TEST(Operator, Hermiticity) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = Complex(0, 1);
  m(1, 0) = Complex(0, -1);
  EXPECT_TRUE(Operator(m).is_hermitian());
  m(1, 0) = Complex(0, 1);
  EXPECT_NEAR(Operator(m).hermiticity_error(), 2.0, 1e-15);
}
