#include <gtest/gtest.h>

#include <random>

#include "twistcart/corpus.hpp"
#include "twistcart/gc_linalg.hpp"

using namespace twistcart;
using namespace twistcart::corpus;

namespace {

Rational rnd(std::mt19937_64& rng) {
  return Rational(static_cast<long>(rng() % 9) - 4) / Rational(static_cast<long>(1 + rng() % 3));
}

RMat random_antisymmetric(std::mt19937_64& rng, std::size_t n) {
  RMat b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      b(i, j) = rnd(rng);
      b(j, i) = -b(i, j);
    }
  return b;
}

RVec random_vec(std::mt19937_64& rng, std::size_t n) {
  RVec v(n);
  for (auto& x : v) x = rnd(rng);
  return v;
}

bool all_zero(const RVec& v) {
  for (const auto& x : v)
    if (!is_zero(x)) return false;
  return true;
}

// v lies in span(basis) over the Gaussian rationals
bool in_span(const std::vector<CVec>& basis, const CVec& v) {
  std::vector<CVec> ext = basis;
  ext.push_back(v);
  return complex_rank(ext) == complex_rank(basis);
}

std::vector<GCSample> valid_structures() {
  std::vector<GCSample> out;
  for (const auto& s : gc_point_examples().structures)
    if (s.valid) out.push_back(s);
  return out;
}

}  // namespace

TEST(Pairing, Examples) {
  RVec u{1, 1}, x{1, 0}, y{1, 0};
  EXPECT_EQ(pairing(u, x), Rational(1, 2));
  EXPECT_EQ(pairing(x, y), Rational(0));
  EXPECT_THROW(pairing(RVec{1, 0}, RVec{1, 0, 0, 0}), Error);
  for (std::size_t n : {1, 2, 3}) EXPECT_EQ(signature(pairing_matrix(n)), std::make_pair(n, n));
  EXPECT_EQ(signature(RMat{{1, 0, 0}, {0, -1, 0}, {0, 0, 0}}), (std::pair<std::size_t, std::size_t>{1, 1}));
}

TEST(IsGC, Examples) {
  // omega = [[0, 1], [-1, 0]], omega^-1 = -omega, J = [[0, -omega^-1], [omega, 0]]
  RMat by_hand{{0, 0, 0, 1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {-1, 0, 0, 0}};
  EXPECT_EQ(j_symplectic(std_omega(1)), by_hand);
  EXPECT_TRUE(is_gc(by_hand).ok);
  EXPECT_TRUE(is_gc(j_complex(std_complex(1))).ok);
  GCCheck id = is_gc(RMat::identity(4));
  EXPECT_FALSE(id.ok);
  ASSERT_FALSE(id.failures.empty());
  EXPECT_EQ(id.failures.front(), "J² ≠ −1");
  // squares to -1 but does not preserve the pairing
  RMat skew{{0, -2, 0, 0}, {Rational(1, 2), 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
  GCCheck sk = is_gc(skew);
  EXPECT_FALSE(sk.ok);
  EXPECT_EQ(sk.failures.size(), 1u);
  for (const auto& s : gc_point_examples().structures) EXPECT_EQ(is_gc(s.j).ok, s.valid) << s.name;
}

TEST(Eigenspace, SymplecticPlaneByHand) {
  // J v = (v3, -v2, v1, -v0) = i v gives (1, 0, 0, i) and (0, 1, -i, 0)
  auto l = i_eigenspace(j_symplectic(std_omega(1)));
  ASSERT_EQ(l.size(), 2u);
  Gaussian i = Gaussian::i();
  EXPECT_TRUE(in_span(l, CVec{Gaussian(1), Gaussian(0), Gaussian(0), i}));
  EXPECT_TRUE(in_span(l, CVec{Gaussian(0), Gaussian(1), -i, Gaussian(0)}));
  EXPECT_FALSE(in_span(l, CVec{Gaussian(1), Gaussian(0), Gaussian(0), -i}));
}

TEST(Eigenspace, RoundTripAndConjugates) {
  for (const auto& s : valid_structures()) {
    auto l = i_eigenspace(s.j);
    std::size_t n2 = s.j.rows();
    EXPECT_EQ(l.size(), n2 / 2) << s.name;
    EXPECT_EQ(gc_from_isotropic(l), s.j) << s.name;
    CMat jc = complexify(s.j);
    for (const auto& v : l) {
      CVec w = jc.apply(conj(v)), expect = conj(v);
      for (auto& x : expect) x = -Gaussian::i() * x;
      EXPECT_EQ(w, expect) << s.name;
      for (const auto& u : l) EXPECT_TRUE(is_zero(pairing(u, v))) << s.name;
    }
  }
  EXPECT_THROW(i_eigenspace(RMat::identity(4)), Error);
}

TEST(Eigenspace, RejectsBadSubspaces) {
  // L = V_C is isotropic but equals its conjugate
  std::vector<CVec> v{{Gaussian(1), Gaussian(0), Gaussian(0), Gaussian(0)}, {Gaussian(0), Gaussian(1), Gaussian(0), Gaussian(0)}};
  try {
    gc_from_isotropic(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotTransverse);
  }
  // <e1 + e1*, e1 + e1*> = 1
  try {
    gc_from_isotropic({CVec{Gaussian(1), Gaussian(1)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotIsotropic);
  }
}

TEST(BTransform, GroupLawAndAxioms) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng() % 4;
    RMat j = trial % 2 ? j_complex(std_complex((n + 1) / 2)) : j_symplectic(std_omega((n + 1) / 2));
    std::size_t m = j.rows() / 2;
    RMat b1 = random_antisymmetric(rng, m), b2 = random_antisymmetric(rng, m);
    RMat t = b_transform(j, b1);
    EXPECT_TRUE(is_gc(t).ok);
    EXPECT_EQ(b_transform(t, -b1), j);
    EXPECT_EQ(b_transform(t, b2), b_transform(j, b1 + b2));
    EXPECT_EQ(b_transform(j, RMat(m, m)), j);
  }
  RMat sym{{0, 1}, {1, 0}};
  EXPECT_THROW(b_transform(j_symplectic(std_omega(1)), sym), Error);
}

TEST(GKPair, EuclideanPlaneByHand) {
  GKTriple t{RMat::identity(2), std_complex(1), std_complex(1), RMat(2, 2)};
  auto [j1, j2] = gk_from_triple(t);
  // I = [[0, -1], [1, 0]]: J1 = diag(I, -I^T); omega = g I = I, J2 = [[0, -omega^-1], [omega, 0]]
  RMat j1_hand{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
  RMat j2_hand{{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}};
  EXPECT_EQ(j1, j1_hand);
  EXPECT_EQ(j2, j2_hand);
  EXPECT_TRUE(check_gk_pair(j1, j2).ok());
  GKTriple back = extract_bihermitian(j1, j2);
  EXPECT_EQ(back.g, RMat::identity(2));
  EXPECT_EQ(back.iplus, std_complex(1));
  EXPECT_EQ(back.iminus, std_complex(1));
  EXPECT_EQ(back.b, RMat(2, 2));
}

TEST(GKPair, CorpusTriples) {
  std::mt19937_64 rng(32);
  for (const auto& ts : gc_point_examples().triples) {
    auto [j1, j2] = gk_from_triple(ts.triple);
    GKPairCheck c = check_gk_pair(j1, j2);
    EXPECT_TRUE(c.ok()) << ts.name;
    RMat g = -(j1 * j2);
    std::size_t n2 = j1.rows();
    for (int k = 0; k < 100; ++k) {
      RVec a = random_vec(rng, n2);
      if (all_zero(a)) continue;
      EXPECT_GT(pairing(g.apply(a), a), Rational(0)) << ts.name;
    }
    for (std::size_t k = 0; k < n2; ++k) {
      RVec e(n2, Rational(0));
      e[k] = 1;
      EXPECT_GT(pairing(g.apply(e), e), Rational(0)) << ts.name;
    }
    GKTriple back = extract_bihermitian(j1, j2);
    EXPECT_EQ(back.g, ts.triple.g) << ts.name;
    EXPECT_EQ(back.iplus, ts.triple.iplus) << ts.name;
    EXPECT_EQ(back.iminus, ts.triple.iminus) << ts.name;
    EXPECT_EQ(back.b, ts.triple.b) << ts.name;
    // b != 0 is the b-transform of the b = 0 pair
    GKTriple flat = ts.triple;
    flat.b = RMat(flat.g.rows(), flat.g.rows());
    auto [f1, f2] = gk_from_triple(flat);
    EXPECT_EQ(j1, b_transform(f1, ts.triple.b)) << ts.name;
    EXPECT_EQ(j2, b_transform(f2, ts.triple.b)) << ts.name;
  }
}

TEST(GKPair, InvalidInputs) {
  GKTriple t{RMat::identity(2), std_complex(1), std_complex(1), RMat(2, 2)};
  GKTriple bad = t;
  bad.g = RMat{{1, 0}, {0, -1}};
  try {
    gk_from_triple(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidTriple);
  }
  bad = t;
  bad.b = RMat::identity(2);
  EXPECT_THROW(gk_from_triple(bad), Error);
  auto [j1, j2] = gk_from_triple(t);
  try {
    extract_bihermitian(j1, -j2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositive);
  }
  // another complex structure on R2: [[1, -2], [1, -1]] squares to -1
  RMat other = j_complex(RMat{{1, -2}, {1, -1}});
  ASSERT_NE(j1 * other, other * j1);
  try {
    extract_bihermitian(j1, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
  }
}

TEST(Poisson, BlocksAndAntisymmetry) {
  RMat w = std_omega(2);
  EXPECT_EQ(poisson_bivector(j_symplectic(w)), -inverse(w));
  EXPECT_EQ(poisson_bivector(j_complex(std_complex(2))), RMat(4, 4));
  for (const auto& s : valid_structures()) {
    RMat beta = poisson_bivector(s.j);
    EXPECT_EQ(beta.transpose(), -beta) << s.name;
  }
  EXPECT_THROW(poisson_bivector(RMat::identity(2)), Error);
}

TEST(Moment, CorpusSamplesVanish) {
  for (const auto& h : gc_point_examples().hamiltonian)
    for (const auto& r : moment_residual(h.data)) {
      EXPECT_TRUE(r.condition_zero()) << h.name;
      EXPECT_TRUE(r.poisson_zero()) << h.name;
    }
  HamiltonianPointData zero;
  zero.j = j_symplectic(std_omega(1));
  zero.samples.push_back({RVec(2, Rational(0)), RVec(2, Rational(0)), RVec(2, Rational(0))});
  EXPECT_TRUE(moment_residual(zero).front().condition_zero());
}

TEST(Moment, PerturbationShowsUpThroughJ) {
  std::mt19937_64 rng(33);
  HamiltonianPointData h = symplectic_rotation_sample(2, {1, 2, Rational(1, 2), -3});
  RVec delta = random_vec(rng, 4);
  delta[0] += 1;
  for (std::size_t i = 0; i < 4; ++i) h.samples[0].dmu[i] += delta[i];
  auto r = moment_residual(h);
  RVec lifted(8, Rational(0));
  for (std::size_t i = 0; i < 4; ++i) lifted[4 + i] = delta[i];
  EXPECT_EQ(r[0].condition, h.j.apply(lifted));
  EXPECT_FALSE(r[0].condition_zero());
  EXPECT_TRUE(r[1].condition_zero());
  h.samples[1].alpha.pop_back();
  EXPECT_THROW(moment_residual(h), Error);
}

TEST(Moment, ConditionImpliesPoissonRelation) {
  std::mt19937_64 rng(34);
  for (const auto& s : valid_structures()) {
    std::size_t n2 = s.j.rows(), n = n2 / 2;
    for (int k = 0; k < 5; ++k) {
      RVec dmu = random_vec(rng, n), lifted(n2, Rational(0));
      for (std::size_t i = 0; i < n; ++i) lifted[n + i] = dmu[i];
      RVec jv = s.j.apply(lifted);
      MomentSample m{dmu, RVec(n), RVec(n)};
      for (std::size_t i = 0; i < n; ++i) {
        m.xi_m[i] = -jv[i];
        m.alpha[i] = -jv[n + i];
      }
      MomentResidual r = moment_residual(HamiltonianPointData{s.j, {m}, {}}).front();
      ASSERT_TRUE(r.condition_zero());
      EXPECT_TRUE(r.poisson_zero()) << s.name;
    }
  }
}

TEST(HamEq, Relations) {
  std::mt19937_64 rng(35);
  auto ex = gc_point_examples();
  const GKTriple& same = ex.triples[0].triple;
  for (int k = 0; k < 10; ++k) {
    RVec dmu = random_vec(rng, 2);
    EXPECT_TRUE(all_zero(ham_eq_relations(same, dmu, RVec(2, Rational(0))).first));
  }
  for (const auto& ts : ex.triples) {
    std::size_t n = ts.triple.g.rows();
    auto z = ham_eq_relations(ts.triple, RVec(n, Rational(0)), RVec(n, Rational(0)));
    EXPECT_TRUE(all_zero(z.first) && all_zero(z.second)) << ts.name;
    RVec dmu = random_vec(rng, n);
    RVec a = ts.triple.iplus.transpose().apply(dmu), b = ts.triple.iminus.transpose().apply(dmu), alpha(n);
    for (std::size_t i = 0; i < n; ++i) alpha[i] = (a[i] + b[i]) / 2;
    EXPECT_TRUE(all_zero(ham_eq_relations(ts.triple, dmu, alpha).second)) << ts.name;
  }
}

TEST(Hessian, Identity) {
  std::mt19937_64 rng(36);
  EXPECT_EQ(hessian_identity(random_antisymmetric(rng, 3), RMat(3, 3)).a, RMat(3, 3));
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng() % 5;
    RMat beta = random_antisymmetric(rng, n);
    // hess = M^T D M with some zero weights, so it has a kernel
    RMat m(n, n), d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = rnd(rng);
      d(i, i) = rng() % 2 ? rnd(rng) : Rational(0);
    }
    RMat hess = m.transpose() * d * m;
    HessianResult r = hessian_identity(beta, hess);
    EXPECT_EQ(r.a, beta * hess);
    EXPECT_TRUE(r.kernel_contained);
  }
  // beta invertible: ker A = ker hess
  RMat beta = std_omega(2);
  RMat hess{{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 2, 1}, {0, 0, 1, 0}};
  HessianResult r = hessian_identity(beta, hess);
  EXPECT_EQ(r.a.to_sparse().cols() - rank(r.a.to_sparse()), 1u);
  EXPECT_EQ(rank(r.a.to_sparse()), rank(hess.to_sparse()));
}

TEST(Compatibility, Examples) {
  RMat alpha{{1, 0}, {0, 0}, {2, 0}};  // alpha^(xi_1) != 0, alpha^(xi_2) = 0
  EXPECT_TRUE(compatibility_check(alpha, {}));
  EXPECT_TRUE(compatibility_check(RMat(3, 2), {{1, 0}}));
  EXPECT_FALSE(compatibility_check(alpha, {{1, 0}}));
  EXPECT_TRUE(compatibility_check(alpha, {{0, 1}}));
  EXPECT_FALSE(compatibility_check(alpha, {{0, 1}, {1, 1}}));
  EXPECT_THROW(compatibility_check(alpha, {{1, 0, 0}}), Error);
}

TEST(Courant, ConstantSections) {
  CDGAModel t3 = torus_model(3, {});
  QVec vol = QVec::unit(*t3.find_label("theta1*theta2*theta3"));
  RVec x{1, 0, 0, 0, 0, 0}, y{0, 1, 0, 0, 0, 0};
  EXPECT_EQ(courant_bracket_const(x, y, t3, vol), (RVec{0, 0, 0, 0, 0, 1}));
  EXPECT_EQ(courant_bracket_const(y, x, t3, vol), (RVec{0, 0, 0, 0, 0, -1}));
  EXPECT_TRUE(all_zero(courant_bracket_const(x, y, t3, QVec{})));
  CDGAModel t2 = torus_model(2, {});
  EXPECT_TRUE(is_involutive_const(i_eigenspace(j_symplectic(std_omega(1))), t2, QVec{}));
  EXPECT_TRUE(constant_gk_integrable(QVec{}));
  EXPECT_FALSE(constant_gk_integrable(vol));
  // theta1 is not a 3-form
  EXPECT_THROW(courant_bracket_const(x, y, t3, QVec::unit(1)), Error);
}
