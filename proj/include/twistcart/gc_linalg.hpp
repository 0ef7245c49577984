#pragma once

// Pointwise generalized complex linear algebra on V + V*, dim V = n, with
// vectors written as (X; xi) in R^{2n}. Everything is exact over Q, or over
// Q(i) for eigenspaces.

#include <string>
#include <utility>
#include <vector>

#include "twistcart/cartan.hpp"
#include "twistcart/dense.hpp"
#include "twistcart/error.hpp"
#include "twistcart/linalg.hpp"
#include "twistcart/rational.hpp"

namespace twistcart {

using RMat = Matrix<Rational>;
using CMat = Matrix<Gaussian>;
using RVec = std::vector<Rational>;
using CVec = std::vector<Gaussian>;

// Gram matrix of <X + a, Y + b> = (b(X) + a(Y)) / 2.
inline RMat pairing_matrix(std::size_t n) {
  RMat p(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    p(i, n + i) = Rational(1, 2);
    p(n + i, i) = Rational(1, 2);
  }
  return p;
}

template <class F>
F pairing(const std::vector<F>& u, const std::vector<F>& v) {
  if (u.size() != v.size() || u.size() % 2 != 0) throw Error(ErrorKind::DimensionMismatch, "pairing needs vectors in V + V*");
  std::size_t n = u.size() / 2;
  F s(0);
  for (std::size_t i = 0; i < n; ++i) s += u[i] * v[n + i] + u[n + i] * v[i];
  return s * F(Rational(1, 2));
}

// Signature (positive, negative) of a symmetric rational matrix by
// congruence diagonalization.
inline std::pair<std::size_t, std::size_t> signature(RMat a) {
  std::size_t n = a.rows(), pos = 0, neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && is_zero(a(p, p))) ++p;
    if (p == n) {
      // no nonzero diagonal entry left: create one from an off-diagonal pair
      std::size_t i = n, j = n;
      for (std::size_t r = k; r < n && i == n; ++r)
        for (std::size_t c = r + 1; c < n; ++c)
          if (!is_zero(a(r, c))) {
            i = r;
            j = c;
            break;
          }
      if (i == n) break;
      for (std::size_t c = 0; c < n; ++c) a(i, c) += a(j, c);
      for (std::size_t r = 0; r < n; ++r) a(r, i) += a(r, j);
      p = i;
    }
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(p, c), a(k, c));
      for (std::size_t r = 0; r < n; ++r) std::swap(a(r, p), a(r, k));
    }
    Rational d = a(k, k);
    if (sgn(d) > 0)
      ++pos;
    else
      ++neg;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (is_zero(a(r, k))) continue;
      Rational f = a(r, k) / d;
      for (std::size_t c = 0; c < n; ++c) a(r, c) -= f * a(k, c);
      for (std::size_t c = 0; c < n; ++c) a(c, r) -= f * a(c, k);
    }
  }
  return {pos, neg};
}

struct GCCheck {
  bool ok = true;
  std::vector<std::string> failures;
};

inline GCCheck is_gc(const RMat& j) {
  GCCheck r;
  if (j.rows() != j.cols() || j.rows() % 2 != 0) {
    r.ok = false;
    r.failures.push_back("J is not a square matrix of even size");
    return r;
  }
  std::size_t n2 = j.rows();
  if (j * j != -RMat::identity(n2)) r.failures.push_back("J² ≠ −1");
  RMat p = pairing_matrix(n2 / 2);
  if (j.transpose() * p * j != p) r.failures.push_back("J is not orthogonal for the pairing");
  r.ok = r.failures.empty();
  return r;
}

inline void require_gc(const RMat& j) {
  GCCheck c = is_gc(j);
  if (!c.ok) throw Error(ErrorKind::NotGC, c.failures.front());
}

inline CMat complexify(const RMat& a) {
  CMat c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) c(i, k) = Gaussian(a(i, k));
  return c;
}

inline CVec conj(const CVec& v) {
  CVec w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i].conj();
  return w;
}

inline std::size_t complex_rank(const std::vector<CVec>& vs) {
  Echelon<Gaussian> e;
  for (const auto& v : vs) e.insert(SparseVector<Gaussian>::from_dense(v));
  return e.dim();
}

// Basis of the +i eigenspace, in reduced echelon form.
inline std::vector<CVec> i_eigenspace(const RMat& j) {
  require_gc(j);
  std::size_t n2 = j.rows();
  CMat a = complexify(j) - Gaussian::i() * CMat::identity(n2);
  std::vector<std::vector<Gaussian>> rows(n2, std::vector<Gaussian>(n2));
  for (std::size_t r = 0; r < n2; ++r)
    for (std::size_t c = 0; c < n2; ++c) rows[r][c] = a(r, c);
  auto k = kernel_basis(SparseMatrix<Gaussian>::from_dense(rows));
  std::vector<CVec> out;
  for (const auto& v : k.basis) out.push_back(v.to_dense(n2));
  if (out.size() != n2 / 2) throw Error(ErrorKind::NotGC, "+i eigenspace has the wrong dimension");
  return out;
}

// The unique J with +i eigenspace L: J = S diag(i, -i) S^{-1}, S = [L | conj L].
inline RMat gc_from_isotropic(const std::vector<CVec>& l) {
  if (l.empty()) throw Error(ErrorKind::NotIsotropic, "empty subspace");
  std::size_t n2 = l.front().size();
  if (n2 % 2 != 0 || l.size() != n2 / 2) throw Error(ErrorKind::NotIsotropic, "L must have half the ambient dimension");
  if (complex_rank(l) != l.size()) throw Error(ErrorKind::NotIsotropic, "L basis is dependent");
  for (const auto& u : l)
    for (const auto& v : l)
      if (!is_zero(pairing(u, v))) throw Error(ErrorKind::NotIsotropic, "L is not isotropic");
  std::vector<CVec> all = l;
  for (const auto& u : l) all.push_back(conj(u));
  if (complex_rank(all) != n2) throw Error(ErrorKind::NotTransverse, "L meets its conjugate");
  CMat s = columns_to_matrix(all, n2);
  CMat d(n2, n2);
  for (std::size_t k = 0; k < n2; ++k) d(k, k) = k < n2 / 2 ? Gaussian::i() : -Gaussian::i();
  CMat j = s * d * inverse(s);
  RMat out(n2, n2);
  for (std::size_t r = 0; r < n2; ++r)
    for (std::size_t c = 0; c < n2; ++c) {
      if (!is_zero(j(r, c).im)) throw Error(ErrorKind::NotTransverse, "reconstructed J is not real");
      out(r, c) = j(r, c).re;
    }
  return out;
}

inline RMat shear(const RMat& b, int sign) {
  std::size_t n = b.rows();
  RMat s = RMat::identity(2 * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) s(n + r, c) = Rational(sign) * b(r, c);
  return s;
}

inline bool is_antisymmetric(const RMat& b) { return b.transpose() == -b; }

// (1 0; b 1) J (1 0; -b 1)
inline RMat b_transform(const RMat& j, const RMat& b) {
  require_gc(j);
  if (b.rows() * 2 != j.rows() || !is_antisymmetric(b)) throw Error(ErrorKind::NotGC, "b must be antisymmetric n x n");
  return shear(b, 1) * j * shear(b, -1);
}

inline RMat j_symplectic(const RMat& omega) {
  std::size_t n = omega.rows();
  RMat z(n, n);
  return RMat::blocks(z, -inverse(omega), omega, z);
}

inline RMat j_complex(const RMat& i) {
  std::size_t n = i.rows();
  RMat z(n, n);
  return RMat::blocks(i, z, z, -i.transpose());
}

struct GKTriple {
  RMat g, iplus, iminus, b;
};

inline void validate_triple(const GKTriple& t) {
  std::size_t n = t.g.rows();
  auto fail = [](const std::string& w) { throw Error(ErrorKind::InvalidTriple, w); };
  for (const RMat* m : {&t.g, &t.iplus, &t.iminus, &t.b})
    if (m->rows() != n || m->cols() != n) fail("blocks must be n x n");
  if (!is_symmetric(t.g)) fail("g is not symmetric");
  if (!leading_minors_positive(t.g)) fail("g is not positive definite");
  RMat id = RMat::identity(n);
  if (t.iplus * t.iplus != -id) fail("I+ does not square to -1");
  if (t.iminus * t.iminus != -id) fail("I- does not square to -1");
  if (t.iplus.transpose() * t.g * t.iplus != t.g) fail("I+ is not g-compatible");
  if (t.iminus.transpose() * t.g * t.iminus != t.g) fail("I- is not g-compatible");
  if (!is_antisymmetric(t.b)) fail("b is not antisymmetric");
}

// J_{1/2} = 1/2 (1 0; b 1) (I+ +- I-, -(w+^-1 -+ w-^-1); w+ -+ w-, -(I+* +- I-*)) (1 0; -b 1)
inline std::pair<RMat, RMat> gk_from_triple(const GKTriple& t) {
  validate_triple(t);
  RMat wp = t.g * t.iplus, wm = t.g * t.iminus;
  RMat wpi = inverse(wp), wmi = inverse(wm);
  RMat ipt = t.iplus.transpose(), imt = t.iminus.transpose();
  Rational h(1, 2);
  RMat core1 = RMat::blocks(t.iplus + t.iminus, -(wpi - wmi), wp - wm, -(ipt + imt));
  RMat core2 = RMat::blocks(t.iplus - t.iminus, -(wpi + wmi), wp + wm, -(ipt - imt));
  RMat j1 = h * (shear(t.b, 1) * core1 * shear(t.b, -1));
  RMat j2 = h * (shear(t.b, 1) * core2 * shear(t.b, -1));
  return {j1, j2};
}

struct GKPairCheck {
  bool j1_gc = false, j2_gc = false, commute = false, g_involution = false, positive = false;
  bool ok() const { return j1_gc && j2_gc && commute && g_involution && positive; }
};

// Gram matrix of G(A, B) = <-J1 J2 A, B>.
inline RMat metric_gram(const RMat& j1, const RMat& j2) {
  RMat g = -(j1 * j2);
  return g.transpose() * pairing_matrix(j1.rows() / 2);
}

inline GKPairCheck check_gk_pair(const RMat& j1, const RMat& j2) {
  GKPairCheck c;
  c.j1_gc = is_gc(j1).ok;
  c.j2_gc = is_gc(j2).ok;
  c.commute = j1 * j2 == j2 * j1;
  RMat g = -(j1 * j2);
  c.g_involution = g * g == RMat::identity(j1.rows());
  RMat gram = metric_gram(j1, j2);
  c.positive = is_symmetric(gram) && leading_minors_positive(gram);
  return c;
}

namespace detail {

inline std::vector<RVec> real_kernel(const RMat& a) {
  std::vector<std::vector<Rational>> rows(a.rows(), std::vector<Rational>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) rows[r][c] = a(r, c);
  std::vector<RVec> out;
  for (const auto& v : kernel_basis(SparseMatrix<Rational>::from_dense(rows)).basis) out.push_back(v.to_dense(a.cols()));
  return out;
}

}  // namespace detail

// From a commuting pair: C+- = ker(G -+ 1), pi|C+- invertible, C+- = graph of
// b +- g, and J1 restricted to C+- projects to I+-.
inline GKTriple extract_bihermitian(const RMat& j1, const RMat& j2) {
  require_gc(j1);
  require_gc(j2);
  if (j1 * j2 != j2 * j1) throw Error(ErrorKind::NotCommuting, "J1 and J2 do not commute");
  RMat gram = metric_gram(j1, j2);
  if (!is_symmetric(gram) || !leading_minors_positive(gram)) throw Error(ErrorKind::NotPositive, "G is not positive definite");
  std::size_t n2 = j1.rows(), n = n2 / 2;
  RMat big = -(j1 * j2);
  RMat mats[2], ims[2];
  for (int s = 0; s < 2; ++s) {
    Rational sign = s == 0 ? 1 : -1;
    auto basis = detail::real_kernel(big - sign * RMat::identity(n2));
    if (basis.size() != n) throw Error(ErrorKind::NotPositive, "eigenbundle has the wrong rank");
    RMat c = columns_to_matrix(basis, n2);
    RMat x = c.block(0, 0, n, n), xi = c.block(n, 0, n, n);
    RMat xinv;
    if (!try_inverse(x, xinv)) throw Error(ErrorKind::NotPositive, "projection of C to V is not invertible");
    mats[s] = xi * xinv;
    ims[s] = (j1 * c).block(0, 0, n, n) * xinv;
  }
  GKTriple t;
  Rational h(1, 2);
  t.g = h * (mats[0] - mats[1]);
  t.b = h * (mats[0] + mats[1]);
  t.iplus = ims[0];
  t.iminus = ims[1];
  return t;
}

inline RMat poisson_bivector(const RMat& j) {
  require_gc(j);
  std::size_t n = j.rows() / 2;
  return j.block(0, n, n, n);
}

struct MomentSample {
  RVec dmu, xi_m, alpha;
};

struct HamiltonianPointData {
  RMat j;
  std::vector<MomentSample> samples;  // one per torus basis vector
  std::vector<RVec> isotropy;         // basis of t_p
};

struct MomentResidual {
  RVec condition;  // J(0 + dmu) + (xi_M + alpha)
  RVec poisson;    // -beta(dmu) - xi_M
  bool condition_zero() const {
    for (const auto& x : condition)
      if (!is_zero(x)) return false;
    return true;
  }
  bool poisson_zero() const {
    for (const auto& x : poisson)
      if (!is_zero(x)) return false;
    return true;
  }
};

inline std::vector<MomentResidual> moment_residual(const HamiltonianPointData& h) {
  std::size_t n2 = h.j.rows(), n = n2 / 2;
  if (h.j.cols() != n2 || n2 % 2 != 0) throw Error(ErrorKind::DimensionMismatch, "J must be 2n x 2n");
  RMat beta = h.j.block(0, n, n, n);
  std::vector<MomentResidual> out;
  for (const auto& s : h.samples) {
    if (s.dmu.size() != n || s.xi_m.size() != n || s.alpha.size() != n)
      throw Error(ErrorKind::DimensionMismatch, "moment sample shapes");
    RVec v(n2);
    for (std::size_t i = 0; i < n; ++i) v[n + i] = s.dmu[i];
    RVec jv = h.j.apply(v);
    MomentResidual r;
    r.condition.resize(n2);
    for (std::size_t i = 0; i < n; ++i) {
      r.condition[i] = jv[i] + s.xi_m[i];
      r.condition[n + i] = jv[n + i] + s.alpha[i];
    }
    RVec bd = beta.apply(s.dmu);
    r.poisson.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.poisson[i] = -bd[i] - s.xi_m[i];
    out.push_back(std::move(r));
  }
  return out;
}

// w+^-1 dmu - w-^-1 dmu and I+* dmu + I-* dmu - 2 alpha
inline std::pair<RVec, RVec> ham_eq_relations(const GKTriple& t, const RVec& dmu, const RVec& alpha) {
  validate_triple(t);
  std::size_t n = t.g.rows();
  if (dmu.size() != n || alpha.size() != n) throw Error(ErrorKind::InvalidTriple, "covector shapes");
  RVec a = inverse(t.g * t.iplus).apply(dmu), b = inverse(t.g * t.iminus).apply(dmu);
  RVec c = t.iplus.transpose().apply(dmu), d = t.iminus.transpose().apply(dmu);
  RVec r1(n), r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r1[i] = a[i] - b[i];
    r2[i] = c[i] + d[i] - 2 * alpha[i];
  }
  return {r1, r2};
}

struct HessianResult {
  RMat a;
  bool kernel_contained = false;
};

inline HessianResult hessian_identity(const RMat& beta, const RMat& hess) {
  if (beta.cols() != hess.rows()) throw Error(ErrorKind::DimensionMismatch, "beta and hess shapes");
  HessianResult r;
  r.a = beta * hess;
  r.kernel_contained = true;
  for (const auto& v : detail::real_kernel(hess)) {
    for (const auto& x : r.a.apply(v))
      if (!is_zero(x)) r.kernel_contained = false;
  }
  return r;
}

// alpha_map: n x r, column i is alpha^{xi_i}. Compatible iff alpha kills t_p.
inline bool compatibility_check(const RMat& alpha_map, const std::vector<RVec>& isotropy) {
  for (const auto& xi : isotropy) {
    if (xi.size() != alpha_map.cols()) throw Error(ErrorKind::DimensionMismatch, "isotropy vector shape");
    for (const auto& x : alpha_map.apply(xi))
      if (!is_zero(x)) return false;
  }
  return true;
}

// Components H(d_a, d_b, d_c) of a constant 3-form on a torus model.
inline std::vector<Rational> three_form_tensor(const CDGAModel& torus, const QVec& h) {
  for (const auto& g : torus.generators)
    if (g.degree != 1) throw Error(ErrorKind::NotConstantModel, "model is not an exterior algebra on degree-1 generators");
  if (!torus.d.is_zero_matrix()) throw Error(ErrorKind::NotConstantModel, "model has nonzero d");
  for (const auto& [i, x] : h.entries)
    if (torus.degree.at(i) != 3) throw Error(ErrorKind::NotConstantModel, "H is not a 3-form");
  std::size_t n = torus.generators.size();
  std::vector<QMat> iota;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<QVec> on(n);
    on[a] = QVec::unit(0);
    iota.push_back(extend_derivation(torus, on, -1));
  }
  std::vector<Rational> t(n * n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) t[(a * n + b) * n + c] = iota[c].apply(iota[b].apply(iota[a].apply(h))).get(0);
  return t;
}

// Twisted Courant bracket of constant sections: only i_Y i_X H survives.
template <class F>
std::vector<F> courant_bracket_const(const std::vector<F>& u, const std::vector<F>& v, const CDGAModel& torus,
                                     const QVec& h) {
  std::size_t n = torus.generators.size();
  if (u.size() != 2 * n || v.size() != 2 * n) throw Error(ErrorKind::DimensionMismatch, "sections must live in V + V*");
  auto t = three_form_tensor(torus, h);
  std::vector<F> out(2 * n, F(0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        const Rational& x = t[(a * n + b) * n + c];
        if (!is_zero(x)) out[n + c] += u[a] * v[b] * F(x);
      }
  return out;
}

// Constant sections of L closed under the twisted bracket.
inline bool is_involutive_const(const std::vector<CVec>& l, const CDGAModel& torus, const QVec& h) {
  std::size_t base = complex_rank(l);
  for (const auto& u : l)
    for (const auto& v : l) {
      std::vector<CVec> ext = l;
      ext.push_back(courant_bracket_const(u, v, torus, h));
      if (complex_rank(ext) != base) return false;
    }
  return true;
}

// On constant-coefficient torus models d^c terms and db vanish, so the
// integrability conditions reduce to H + db = H = 0.
inline bool constant_gk_integrable(const QVec& h) { return h.empty(); }

}  // namespace twistcart
