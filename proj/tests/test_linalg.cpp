#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "twistcart/dense.hpp"
#include "twistcart/linalg.hpp"
#include "twistcart/rational.hpp"

using namespace twistcart;
using Q = Rational;
using QV = SparseVector<Rational>;
using QM = SparseMatrix<Rational>;
using GV = SparseVector<Gaussian>;
using GM = SparseMatrix<Gaussian>;

namespace {

QM dense(const std::vector<std::vector<Q>>& rows) { return QM::from_dense(rows); }

QM random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int density_pct) {
  std::vector<std::vector<Q>> rows(r, std::vector<Q>(c, Q(0)));
  for (auto& row : rows)
    for (auto& x : row)
      if (static_cast<int>(rng() % 100) < density_pct) x = Q(static_cast<long>(rng() % 7) - 3) / Q(static_cast<long>(1 + rng() % 3));
  return dense(rows);
}

}  // namespace

TEST(Rational, CanonicalFormAndStrings) {
  Q a = parse_rational("6/-4");
  EXPECT_EQ(to_string(a), "-3/2");
  EXPECT_EQ(to_string(parse_rational("4/2")), "2");
  EXPECT_EQ(parse_rational("0/5"), Q(0));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_THROW(parse_rational(""), Error);
}

TEST(Gaussian, FieldAxiomsAndConjugation) {
  Gaussian z(Q(1, 2), Q(-3)), w(Q(2), Q(5, 7));
  EXPECT_EQ(z * (w / z), w);
  EXPECT_EQ(conj(conj(z)), z);
  EXPECT_EQ(z * conj(z), Gaussian(z.norm()));
  EXPECT_EQ(Gaussian::i() * Gaussian::i(), Gaussian(Q(-1)));
}

TEST(Rank, Examples) {
  EXPECT_EQ(rank(QM::identity(2)), 2u);
  EXPECT_EQ(rank(QM(3, 3)), 0u);
  EXPECT_EQ(rank(dense({{1, 2}, {2, 4}})), 1u);
}

TEST(Rank, GaussianEntries) {
  // rows (1, i) and (i, -1) are proportional
  GM m = GM::from_dense({{Gaussian(1), Gaussian::i()}, {Gaussian::i(), Gaussian(-1)}});
  EXPECT_EQ(rank(m), 1u);
  GM n = GM::from_dense({{Gaussian(1), Gaussian::i()}, {Gaussian::i(), Gaussian(1)}});
  EXPECT_EQ(rank(n), 2u);
}

TEST(Kernel, Examples) {
  EXPECT_EQ(kernel_basis(QM::identity(3)).dim(), 0u);
  EXPECT_EQ(kernel_basis(QM(3, 3)).dim(), 3u);
  Subspace<Q> k = kernel_basis(dense({{1, 1}}));
  ASSERT_EQ(k.dim(), 1u);
  EXPECT_TRUE(contains(k, QV::from_dense({1, -1})));
  EXPECT_FALSE(contains(k, QV::from_dense({1, 1})));
}

TEST(Image, Examples) {
  EXPECT_EQ(image_basis(QM::identity(3)).dim(), 3u);
  EXPECT_EQ(image_basis(QM(2, 3)).dim(), 0u);
  Subspace<Q> im = image_basis(dense({{1}, {2}}));
  ASSERT_EQ(im.dim(), 1u);
  EXPECT_TRUE(contains(im, QV::from_dense({1, 2})));
}

TEST(Quotient, Examples) {
  Subspace<Q> q3 = span<Q>(3, {QV::unit(0), QV::unit(1), QV::unit(2)});
  EXPECT_EQ(quotient_dim(q3, q3).dim, 0u);
  EXPECT_EQ(quotient_dim(span<Q>(3, {}), q3).dim, 3u);
  Subspace<Q> diag = span<Q>(2, {QV::from_dense({1, 1})});
  Subspace<Q> q2 = span<Q>(2, {QV::unit(0), QV::unit(1)});
  auto r = quotient_dim(diag, q2);
  EXPECT_EQ(r.dim, 1u);
  ASSERT_EQ(r.representatives.size(), 1u);
  EXPECT_FALSE(contains(diag, r.representatives[0]));
}

TEST(Quotient, NotContained) {
  Subspace<Q> a = span<Q>(2, {QV::unit(0)}), b = span<Q>(2, {QV::unit(1)});
  try {
    quotient_dim(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotContained);
  }
}

TEST(LinalgProperty, RankNullityOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 7, c = 1 + rng() % 7;
    QM m = random_matrix(rng, r, c, 40);
    Subspace<Q> k = kernel_basis(m);
    EXPECT_EQ(rank(m) + k.dim(), c);
    for (const auto& v : k.basis) EXPECT_TRUE(m.apply(v).empty());
    EXPECT_EQ(image_basis(m).dim(), rank(m));
  }
}

TEST(LinalgProperty, ImageOfComposableZeroProductInKernel) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    // m2 * m1 = 0 by construction: m1 maps into ker m2
    QM m2 = random_matrix(rng, 3, 5, 50);
    Subspace<Q> k = kernel_basis(m2);
    if (k.basis.empty()) continue;
    std::vector<QV> cols;
    for (int j = 0; j < 4; ++j) {
      QV v;
      for (const auto& b : k.basis) v = axpy(v, Q(static_cast<long>(rng() % 5) - 2), b);
      cols.push_back(v);
    }
    QM m1 = QM::from_columns(5, cols);
    ASSERT_TRUE((m2 * m1).is_zero_matrix());
    EXPECT_TRUE(is_subspace_of(image_basis(m1), k));
  }
}

TEST(LinalgProperty, InsertionOrderIndependence) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    QM m = random_matrix(rng, 5, 6, 50);
    std::vector<QV> cols = m.columns();
    Subspace<Q> a = span(5, cols);
    std::shuffle(cols.begin(), cols.end(), rng);
    Subspace<Q> b = span(5, cols);
    EXPECT_EQ(a, b);
    // same matrix assembled from shuffled triplets
    auto tr = m.triplets();
    std::shuffle(tr.begin(), tr.end(), rng);
    EXPECT_EQ(QM::from_triplets(5, 6, tr), m);
  }
}

TEST(Sparse, NoStoredZeros) {
  QM m = QM::from_triplets(2, 2, {{0, 0, Q(1)}, {0, 0, Q(-1)}, {1, 1, Q(2)}});
  EXPECT_EQ(m.nnz(), 1u);
  QV v = axpy(QV::unit(0), Q(-1), QV::unit(0));
  EXPECT_TRUE(v.empty());
}

TEST(Intersect, CoordinatesAndSpans) {
  // span{(1,1,0), (0,1,1)} ∩ {x : x_2 = 0} = span{(1,1,0)}
  std::vector<QV> vs{QV::from_dense({1, 1, 0}), QV::from_dense({0, 1, 1})};
  auto cut = intersect_coordinates(vs, {true, true, false});
  ASSERT_EQ(cut.size(), 1u);
  EXPECT_EQ(rank_of(std::vector<QV>{cut[0], QV::from_dense({1, 1, 0})}), 1u);
  // span{e0, e1} ∩ span{e1 + e2, e0 + e1} has dimension 1: e0 + e1
  auto both = intersect<Q>({QV::unit(0), QV::unit(1)}, {QV::from_dense({0, 1, 1}), QV::from_dense({1, 1, 0})}, 3);
  ASSERT_EQ(both.size(), 1u);
  EXPECT_EQ(rank_of(std::vector<QV>{both[0], QV::from_dense({1, 1, 0})}), 1u);
}

TEST(Dense, InverseAndDeterminant) {
  Matrix<Q> a{{2, 1}, {1, 1}};
  EXPECT_EQ(determinant(a), Q(1));
  EXPECT_EQ(a * inverse(a), Matrix<Q>::identity(2));
  Matrix<Q> s{{1, 2}, {2, 4}};
  EXPECT_EQ(determinant(s), Q(0));
  EXPECT_THROW(inverse(s), Error);
  EXPECT_TRUE(leading_minors_positive(Matrix<Q>{{2, 1}, {1, 2}}));
  EXPECT_FALSE(leading_minors_positive(Matrix<Q>{{1, 2}, {2, 1}}));
}
