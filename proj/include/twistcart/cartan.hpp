#pragma once

// Finite CDGA models with torus contractions, their Cartan complexes
// Omega^T (x) S[x_1..x_r] truncated at polynomial degree D, twisted
// differentials d_G + eta, and windowed twisted cohomology.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistcart/dg_core.hpp"
#include "twistcart/error.hpp"
#include "twistcart/linalg.hpp"

namespace twistcart {

struct Generator {
  std::string name;
  int degree = 1;
  int cap = 1;  // maximal power, only used for even generators
};

struct CDGAModel {
  std::string name;
  std::vector<Generator> generators;
  std::vector<std::vector<int>> basis;  // exponent vectors
  std::vector<int> degree;
  std::vector<std::string> label;
  std::vector<std::vector<QVec>> product;  // product[i][j] = e_i e_j
  QMat d;
  std::vector<QMat> contractions;

  std::size_t size() const { return basis.size(); }
  int top_degree() const { return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end()); }

  std::optional<std::size_t> find(const std::vector<int>& e) const {
    auto it = std::find(basis.begin(), basis.end(), e);
    if (it == basis.end()) return std::nullopt;
    return static_cast<std::size_t>(it - basis.begin());
  }

  std::optional<std::size_t> find_label(const std::string& l) const {
    auto it = std::find(label.begin(), label.end(), l);
    if (it == label.end()) return std::nullopt;
    return static_cast<std::size_t>(it - label.begin());
  }

  QVec mul(const QVec& a, const QVec& b) const {
    std::map<std::size_t, Rational> acc;
    for (const auto& [i, x] : a.entries)
      for (const auto& [j, y] : b.entries)
        for (const auto& [k, z] : product[i][j].entries) acc[k] += x * y * z;
    return QVec::from_map(acc);
  }
};

namespace detail {

inline std::vector<int> index_sequence(const std::vector<int>& e) {
  std::vector<int> s;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) s.push_back(static_cast<int>(i));
  return s;
}

inline std::string monomial_label(const std::vector<Generator>& g, const std::vector<int>& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += g[i].name;
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

// Product of two monomials in the free graded-commutative algebra.
inline std::pair<int, std::vector<int>> monomial_product(const std::vector<Generator>& g, const std::vector<int>& a,
                                                         const std::vector<int>& b) {
  std::vector<int> e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    e[i] = a[i] + b[i];
    bool odd = g[i].degree % 2 != 0;
    if ((odd && e[i] > 1) || (!odd && e[i] > g[i].cap)) return {0, {}};
  }
  int sign = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0 || g[i].degree % 2 == 0) continue;
    for (std::size_t j = 0; j < i; ++j)
      if (b[j] != 0 && g[j].degree % 2 != 0) sign = -sign;
  }
  return {sign, e};
}

}  // namespace detail

// Free graded-commutative algebra on the generators: exterior on odd
// generators, truncated polynomial on even ones. Basis ordered by degree,
// then lexicographically by generator indices.
inline CDGAModel free_algebra(const std::string& name, const std::vector<Generator>& gens) {
  CDGAModel m;
  m.name = name;
  m.generators = gens;
  for (const auto& g : gens) {
    if (g.degree <= 0) throw Error(ErrorKind::InvalidModel, "generator degree must be positive: " + g.name);
    if (g.degree % 2 == 0 && g.cap < 1) throw Error(ErrorKind::InvalidModel, "even generator needs a cap: " + g.name);
  }
  std::vector<std::vector<int>> all{{}};
  for (const auto& g : gens) {
    int maxp = g.degree % 2 != 0 ? 1 : g.cap;
    std::vector<std::vector<int>> next;
    for (const auto& e : all)
      for (int k = 0; k <= maxp; ++k) {
        auto f = e;
        f.push_back(k);
        next.push_back(f);
      }
    all = std::move(next);
  }
  auto deg = [&](const std::vector<int>& e) {
    int s = 0;
    for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * gens[i].degree;
    return s;
  };
  std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    int da = deg(a), db = deg(b);
    if (da != db) return da < db;
    return detail::index_sequence(a) < detail::index_sequence(b);
  });
  m.basis = all;
  for (const auto& e : all) {
    m.degree.push_back(deg(e));
    m.label.push_back(detail::monomial_label(gens, e));
  }
  std::size_t n = all.size();
  m.product.assign(n, std::vector<QVec>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto [s, e] = detail::monomial_product(gens, all[i], all[j]);
      if (s == 0) continue;
      m.product[i][j] = QVec{{{*m.find(e), Rational(s)}}};
    }
  m.d = QMat(n, n);
  return m;
}

// Extends values on generators to a graded derivation of the given degree.
inline QMat extend_derivation(const CDGAModel& m, const std::vector<QVec>& on_generators, int deg) {
  std::size_t n = m.size();
  std::vector<QVec> val(n);
  std::vector<bool> done(n, false);
  // basis is sorted by degree, so shorter monomials come first
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = m.basis[k];
    auto seq = detail::index_sequence(e);
    if (seq.empty()) {
      done[k] = true;
      continue;
    }
    int g = seq.front();
    std::vector<int> rest = e;
    rest[g] -= 1;
    std::size_t r = *m.find(rest);
    std::vector<int> ge(e.size(), 0);
    ge[g] = 1;
    std::size_t gi = *m.find(ge);
    if (!done[r]) throw Error(ErrorKind::InvalidModel, "derivation extension order");
    QVec first = m.mul(on_generators.at(g), QVec::unit(r));
    QVec second = m.mul(QVec::unit(gi), val[r]);
    int sign = (deg * m.generators[g].degree) % 2 != 0 ? -1 : 1;
    val[k] = axpy(first, Rational(sign), second);
    done[k] = true;
  }
  return QMat::from_columns(n, val);
}

inline void validate_model(const CDGAModel& m) {
  std::size_t n = m.size();
  auto fail = [](const std::string& axiom) { throw Error(ErrorKind::InvalidModel, axiom); };
  if (n == 0 || m.degree[0] != 0) fail("unit missing");
  if (m.d.rows() != n || m.d.cols() != n) fail("d has wrong shape");
  for (const auto& c : m.contractions)
    if (c.rows() != n || c.cols() != n) fail("contraction has wrong shape");
  if (m.product.size() != n) fail("product table has wrong shape");
  auto homogeneous = [&](const QMat& op, int shift, const std::string& what) {
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& [i, x] : op.column(j).entries)
        if (m.degree[i] != m.degree[j] + shift) fail(what + " is not of degree " + std::to_string(shift));
  };
  homogeneous(m.d, 1, "d");
  for (const auto& c : m.contractions) homogeneous(c, -1, "contraction");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      int s = (m.degree[i] * m.degree[j]) % 2 != 0 ? -1 : 1;
      if (m.product[i][j] != scale(m.product[j][i], Rational(s))) fail("graded commutativity");
      for (const auto& [k, x] : m.product[i][j].entries)
        if (m.degree[k] != m.degree[i] + m.degree[j]) fail("product is not graded");
    }
  for (std::size_t i = 0; i < n; ++i)
    if (m.product[0][i] != QVec::unit(i)) fail("basis element 0 is not a unit");
  if (!(m.d * m.d).is_zero_matrix()) fail("d^2 = 0");
  auto leibniz = [&](const QMat& op, const std::string& what) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        QVec lhs = op.apply(m.product[i][j]);
        int s = m.degree[i] % 2 != 0 ? -1 : 1;
        QVec rhs = axpy(m.mul(op.column(i), QVec::unit(j)), Rational(s), m.mul(QVec::unit(i), op.column(j)));
        if (lhs != rhs) fail(what + " Leibniz rule on (" + m.label[i] + ", " + m.label[j] + ")");
      }
  };
  leibniz(m.d, "d");
  for (std::size_t a = 0; a < m.contractions.size(); ++a) {
    const QMat& ia = m.contractions[a];
    leibniz(ia, "contraction " + std::to_string(a + 1));
    if (!(ia * ia).is_zero_matrix()) fail("contraction " + std::to_string(a + 1) + " squares to zero");
    if (!(m.d * ia + ia * m.d).is_zero_matrix()) fail("Cartan identity d i + i d = 0 for contraction " + std::to_string(a + 1));
    for (std::size_t b = a + 1; b < m.contractions.size(); ++b)
      if (!(ia * m.contractions[b] + m.contractions[b] * ia).is_zero_matrix())
        fail("contractions " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " anticommute");
  }
}

using Multi = std::vector<int>;
using EqKey = std::pair<std::size_t, Multi>;

// Equivariant form: model basis element tensor polynomial monomial.
struct EqForm {
  std::map<EqKey, Rational> terms;

  bool is_zero() const { return terms.empty(); }
  void add(const EqKey& k, const Rational& x) {
    Rational& t = terms[k];
    t += x;
    if (sgn(t) == 0) terms.erase(k);
  }
  friend EqForm operator+(EqForm a, const EqForm& b) {
    for (const auto& [k, x] : b.terms) a.add(k, x);
    return a;
  }
  friend EqForm operator-(EqForm a, const EqForm& b) {
    for (const auto& [k, x] : b.terms) a.add(k, -x);
    return a;
  }
  EqForm scaled(const Rational& s) const {
    EqForm r;
    if (sgn(s) == 0) return r;
    for (const auto& [k, x] : terms) r.terms[k] = x * s;
    return r;
  }
  friend bool operator==(const EqForm& a, const EqForm& b) { return a.terms == b.terms; }
};

inline int poly_degree(const Multi& m) {
  int s = 0;
  for (int e : m) s += e;
  return s;
}

inline EqForm eq_unit(int rank) {
  EqForm f;
  f.terms[{0, Multi(rank, 0)}] = 1;
  return f;
}

// Product; terms of polynomial degree above cap are dropped (cap < 0: none).
inline EqForm eq_mul(const CDGAModel& m, const EqForm& a, const EqForm& b, int cap = -1) {
  EqForm r;
  for (const auto& [ka, x] : a.terms)
    for (const auto& [kb, y] : b.terms) {
      Multi p = ka.second;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += kb.second.at(i);
      if (cap >= 0 && poly_degree(p) > cap) continue;
      for (const auto& [k, z] : m.product[ka.first][kb.first].entries) r.add({k, p}, x * y * z);
    }
  return r;
}

// d_G = d (x) 1 - sum_i iota_i (x) x_i, without truncation.
inline EqForm eq_dG(const CDGAModel& m, int rank, const EqForm& f) {
  EqForm r;
  for (const auto& [k, x] : f.terms) {
    for (const auto& [i, y] : m.d.column(k.first).entries) r.add({i, k.second}, x * y);
    for (int a = 0; a < rank; ++a) {
      Multi p = k.second;
      p[a] += 1;
      for (const auto& [i, y] : m.contractions.at(a).column(k.first).entries) r.add({i, p}, -x * y);
    }
  }
  return r;
}

inline std::vector<int> eq_degrees(const CDGAModel& m, const EqForm& f) {
  std::vector<int> ds;
  for (const auto& [k, x] : f.terms) ds.push_back(m.degree[k.first] + 2 * poly_degree(k.second));
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  return ds;
}

inline std::vector<Multi> poly_monomials(int rank, int cap) {
  std::vector<Multi> all{{}};
  for (int a = 0; a < rank; ++a) {
    std::vector<Multi> next;
    for (const auto& e : all)
      for (int k = 0; k <= cap; ++k) {
        auto f = e;
        f.push_back(k);
        if (poly_degree(f) <= cap) next.push_back(f);
      }
    all = std::move(next);
  }
  std::sort(all.begin(), all.end(), [](const Multi& a, const Multi& b) {
    int da = poly_degree(a), db = poly_degree(b);
    if (da != db) return da < db;
    return a > b;  // x1^2 before x1*x2 before x2^2
  });
  return all;
}

inline std::string poly_label(const Multi& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s.empty() ? "1" : s;
}

// Largest total degree whose classes are unaffected by truncation.
inline int trust_window(int top_form_degree, int rank, int cap) {
  if (rank == 0) return top_form_degree;
  return std::min(top_form_degree + 2 * cap - 2, 2 * cap);
}

struct CartanComplex {
  CDGAModel model;
  int rank = 0;
  int cap = 0;
  int window = 0;
  std::vector<EqKey> basis;
  std::vector<int> degree, polydeg;
  std::map<EqKey, std::size_t> index;
  QMat dG;

  std::size_t size() const { return basis.size(); }
  std::string label(std::size_t i) const { return model.label[basis[i].first] + "|" + poly_label(basis[i].second); }
};

inline QVec to_vector(const CartanComplex& c, const EqForm& f) {
  QVec v;
  for (const auto& [k, x] : f.terms) {
    auto it = c.index.find(k);
    if (it != c.index.end()) v.entries.emplace_back(it->second, x);
  }
  std::sort(v.entries.begin(), v.entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return v;
}

inline EqForm from_vector(const CartanComplex& c, const QVec& v) {
  EqForm f;
  for (const auto& [i, x] : v.entries) f.terms[c.basis.at(i)] = x;
  return f;
}

// Left multiplication by f on the truncated complex.
inline QMat mult_operator(const CartanComplex& c, const EqForm& f) {
  std::vector<QVec> cols(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    EqForm e;
    e.terms[c.basis[j]] = 1;
    cols[j] = to_vector(c, eq_mul(c.model, f, e, c.cap));
  }
  return QMat::from_columns(c.size(), cols);
}

inline CartanComplex build_cartan(const CDGAModel& m, int rank, int cap) {
  validate_model(m);
  if (cap < 1) throw Error(ErrorKind::InvalidModel, "polynomial cap must be at least 1");
  if (rank < 0 || static_cast<std::size_t>(rank) > m.contractions.size())
    throw Error(ErrorKind::InvalidModel, "rank exceeds the number of contractions");
  CartanComplex c;
  c.model = m;
  c.rank = rank;
  c.cap = rank == 0 ? 0 : cap;
  c.window = trust_window(m.top_degree(), rank, cap);
  auto polys = poly_monomials(rank, c.cap);
  for (std::size_t a = 0; a < m.size(); ++a)
    for (const auto& p : polys) {
      c.index[{a, p}] = c.basis.size();
      c.basis.push_back({a, p});
      c.degree.push_back(m.degree[a] + 2 * poly_degree(p));
      c.polydeg.push_back(poly_degree(p));
    }
  std::vector<QVec> cols(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    EqForm e;
    e.terms[c.basis[j]] = 1;
    cols[j] = to_vector(c, eq_dG(m, rank, e));
  }
  c.dG = QMat::from_columns(c.size(), cols);
  if (!(c.dG * c.dG).is_zero_matrix()) throw Error(ErrorKind::InvalidModel, "d_G^2 = 0");
  return c;
}

inline void check_form(const CartanComplex& c, const EqForm& f) {
  for (const auto& [k, x] : f.terms)
    if (k.first >= c.model.size() || k.second.size() != static_cast<std::size_t>(c.rank))
      throw Error(ErrorKind::DimensionMismatch, "form does not belong to this complex");
}

inline bool is_closed(const CartanComplex& c, const EqForm& f) {
  check_form(c, f);
  return eq_dG(c.model, c.rank, f).is_zero();
}

struct Twisting {
  EqForm form_part;    // form degree 3, polynomial degree 0
  EqForm moment_part;  // form degree 1, polynomial degree 1

  EqForm total() const { return form_part + moment_part; }
};

inline Twisting make_twisting(const CDGAModel& m, const EqForm& eta) {
  Twisting t;
  for (const auto& [k, x] : eta.terms) {
    int p = m.degree[k.first], q = poly_degree(k.second);
    if (p == 3 && q == 0)
      t.form_part.terms[k] = x;
    else if (p == 1 && q == 1)
      t.moment_part.terms[k] = x;
    else
      throw Error(ErrorKind::InvalidModel, "twisting term " + m.label[k.first] + "|" + poly_label(k.second) +
                                               " is not of total degree 3");
  }
  return t;
}

inline TotalComplex twisted_total(const CartanComplex& c, const EqForm& eta) {
  check_form(c, eta);
  TotalComplex t;
  t.degree = c.degree;
  for (std::size_t i = 0; i < c.size(); ++i) t.labels.push_back(c.label(i));
  t.delta = eta.is_zero() ? c.dG : c.dG + mult_operator(c, eta);
  return t;
}

struct TwistedResult {
  WindowedCohomology cohomology;
  int window = 0;
  int cap = 0;
  bool stable = true;
  std::array<std::size_t, 2> check_dims{0, 0};  // same window at cap + 2
};

inline bool same_window(const WindowedCohomology& a, const WindowedCohomology& b, int window) {
  if (a.dims != b.dims) return false;
  for (int s = 0; s < 2; ++s)
    for (int p = -64; p <= window; ++p) {
      auto ga = a.graded[s].count(p) ? a.graded[s].at(p) : 0;
      auto gb = b.graded[s].count(p) ? b.graded[s].at(p) : 0;
      if (ga != gb) return false;
    }
  return true;
}

// Z/2-folded twisted cohomology inside the trust window, cross-checked at
// polynomial cap D + 2.
inline TwistedResult twisted_cohomology(const CartanComplex& c, const Twisting& eta, bool check_stability = true) {
  EqForm e = eta.total();
  if (!is_closed(c, e)) throw Error(ErrorKind::NotClosed, "twisting is not d_G-closed");
  TwistedResult r;
  r.window = c.window;
  r.cap = c.cap;
  r.cohomology = windowed_cohomology(twisted_total(c, e), c.window);
  r.check_dims = r.cohomology.dims;
  if (check_stability && c.rank > 0) {
    CartanComplex c2 = build_cartan(c.model, c.rank, c.cap + 2);
    WindowedCohomology w2 = windowed_cohomology(twisted_total(c2, e), c.window);
    r.check_dims = w2.dims;
    r.stable = same_window(r.cohomology, w2, c.window);
    if (!r.stable) throw Error(ErrorKind::UnstableWindow, "cap " + std::to_string(c.cap) + " and cap " +
                                                              std::to_string(c.cap + 2) + " disagree inside the window");
  }
  return r;
}

// Untwisted cohomology by degree, restricted to the trust window.
inline std::map<int, std::size_t> untwisted_dims(const CartanComplex& c) {
  WindowedCohomology w = windowed_cohomology(twisted_total(c, EqForm{}), c.window);
  std::map<int, std::size_t> out;
  for (int s = 0; s < 2; ++s)
    for (const auto& [p, n] : w.graded[s])
      if (p <= c.window) out[p] += n;
  return out;
}

inline EqForm exp_form(const CartanComplex& c, const EqForm& b) {
  for (int d : eq_degrees(c.model, b))
    if (d != 2) throw Error(ErrorKind::InvalidModel, "b must have total degree 2");
  EqForm sum = eq_unit(c.rank), term = eq_unit(c.rank);
  for (int k = 1; !term.is_zero(); ++k) {
    term = eq_mul(c.model, term, b, c.cap).scaled(Rational(1, k));
    sum = sum + term;
  }
  return sum;
}

inline EqForm exp_b_transform(const CartanComplex& c, const EqForm& b, const EqForm& f) {
  return eq_mul(c.model, exp_form(c, b), f, c.cap);
}

// delta_eta o exp(b) == exp(b) o delta_(eta + d_G b) as operators on the
// truncated complex.
inline bool conjugation_identity_holds(const CartanComplex& c, const EqForm& eta, const EqForm& b) {
  QMat e = mult_operator(c, exp_form(c, b));
  QMat lhs = twisted_total(c, eta).delta * e;
  QMat rhs = e * twisted_total(c, eta + eq_dG(c.model, c.rank, b)).delta;
  return lhs == rhs;
}

inline QVec restriction_to_fiber(const CartanComplex& c, const EqForm& f) {
  std::map<std::size_t, Rational> acc;
  for (const auto& [k, x] : f.terms)
    if (poly_degree(k.second) == 0) acc[k.first] += x;
  (void)c;
  return QVec::from_map(acc);
}

inline EqForm fiber_form(const EqForm& f) {
  EqForm r;
  for (const auto& [k, x] : f.terms)
    if (poly_degree(k.second) == 0) r.terms[{k.first, Multi{}}] = x;
  return r;
}

// Decides whether a closed form is d_G-exact by a linear solve in the
// truncated complex (cap large enough to hold a primitive).
inline bool is_exact(const CartanComplex& c, const EqForm& f) {
  QVec v = to_vector(c, f);
  Echelon<Rational> e;
  for (const auto& col : c.dG.columns()) e.insert(col);
  return e.contains(v);
}

struct EulerReport {
  bool injective = true;
  std::size_t classes_checked = 0;
  int window = 0;
  int euler_degree = 0;
};

// Multiplication by [e] on twisted classes of filtration degree <= window -
// deg(e), tested modulo boundaries and classes beyond the window.
inline EulerReport euler_mult_injectivity(const CartanComplex& c, const Twisting& eta, const EqForm& e, int window) {
  if (!is_closed(c, e)) throw Error(ErrorKind::NotClosed, "Euler form is not d_G-closed");
  auto degs = eq_degrees(c.model, e);
  if (degs.empty()) throw Error(ErrorKind::InvalidModel, "Euler form is zero");
  EulerReport rep;
  rep.window = window;
  rep.euler_degree = degs.front();
  if (window > c.window || window - rep.euler_degree < 0)
    throw Error(ErrorKind::WindowTooSmall, "window does not fit the trusted range");
  TotalComplex t = twisted_total(c, eta.total());
  WindowedCohomology w = windowed_cohomology(t, window);
  ParityCycles pc = parity_cycles(t);
  QMat me = mult_operator(c, e);
  for (int s = 0; s < 2; ++s) {
    Echelon<Rational> neg;
    for (const auto& b : pc.boundaries[s]) neg.insert(b);
    std::vector<bool> beyond(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) beyond[i] = c.degree[i] > window;
    for (const auto& z : intersect_coordinates(pc.cycles[s], beyond)) neg.insert(z);
    for (const auto& r : w.representatives) {
      if (r.parity != s || r.degree > window - rep.euler_degree) continue;
      ++rep.classes_checked;
      if (!neg.insert(me.apply(r.vector))) rep.injective = false;
    }
  }
  return rep;
}

// Cochain view: degree-grouped basis; to_total maps Cartan index to the
// position in the cochain complex's total basis.
struct CochainView {
  CochainComplex complex;
  std::vector<std::size_t> to_total;
};

inline CochainView cochain_view(const CartanComplex& c) {
  CochainView v;
  std::map<int, std::vector<std::size_t>> by_degree;
  for (std::size_t i = 0; i < c.size(); ++i) by_degree[c.degree[i]].push_back(i);
  std::map<std::size_t, std::size_t> local;
  v.to_total.resize(c.size());
  std::size_t k = 0;
  for (const auto& [n, idx] : by_degree) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      local[idx[j]] = j;
      v.complex.labels[n].push_back(c.label(idx[j]));
      v.to_total[idx[j]] = k++;
    }
  }
  std::map<int, std::vector<std::tuple<std::size_t, std::size_t, Rational>>> trip;
  for (std::size_t j = 0; j < c.size(); ++j)
    for (const auto& [i, x] : c.dG.column(j).entries) trip[c.degree[j]].emplace_back(local[i], local[j], x);
  for (const auto& [n, idx] : by_degree)
    v.complex.d[n] = QMat::from_triplets(v.complex.dim(n + 1), idx.size(), trip[n]);
  return v;
}

inline QMat permute_operator(const QMat& m, const std::vector<std::size_t>& perm) {
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> t;
  for (const auto& [i, j, x] : m.triplets()) t.emplace_back(perm[i], perm[j], x);
  return QMat::from_triplets(m.rows(), m.cols(), t);
}

// A pair i: A -> N realised by an algebra map of models (restriction), with
// the same torus rank and cap on both members.
struct CartanPair {
  CartanComplex big, small;
  QMat restriction;  // small.model.size() x big.model.size()
};

// Algebra map determined by images of the generators; monomials go to the
// ordered product of the images.
inline QMat algebra_map(const CDGAModel& src, const CDGAModel& tgt, const std::vector<QVec>& on_generators) {
  if (on_generators.size() != src.generators.size())
    throw Error(ErrorKind::DimensionMismatch, "one image per generator expected");
  std::vector<QVec> cols(src.size());
  for (std::size_t k = 0; k < src.size(); ++k) {
    QVec v = QVec::unit(0);
    for (int g : detail::index_sequence(src.basis[k])) v = tgt.mul(v, on_generators[g]);
    cols[k] = v;
  }
  return QMat::from_columns(tgt.size(), cols);
}

// The restriction must be a unital algebra map commuting with d and with
// every contraction.
inline void validate_restriction(const CDGAModel& big, const CDGAModel& small, const QMat& r) {
  if (r.rows() != small.size() || r.cols() != big.size()) throw Error(ErrorKind::DimensionMismatch, "restriction shape");
  if (big.contractions.size() != small.contractions.size())
    throw Error(ErrorKind::InvalidModel, "pair members carry different numbers of contractions");
  if (r.column(0) != QVec::unit(0)) throw Error(ErrorKind::InvalidModel, "restriction is not unital");
  for (std::size_t j = 0; j < big.size(); ++j)
    for (const auto& [i, x] : r.column(j).entries)
      if (small.degree[i] != big.degree[j]) throw Error(ErrorKind::InvalidModel, "restriction is not of degree 0");
  if (r * big.d != small.d * r) throw Error(ErrorKind::InvalidModel, "restriction does not commute with d");
  for (std::size_t a = 0; a < big.contractions.size(); ++a)
    if (r * big.contractions[a] != small.contractions[a] * r)
      throw Error(ErrorKind::InvalidModel, "restriction does not commute with contraction " + std::to_string(a));
  for (std::size_t i = 0; i < big.size(); ++i)
    for (std::size_t j = 0; j < big.size(); ++j)
      if (r.apply(big.product[i][j]) != small.mul(r.column(i), r.column(j)))
        throw Error(ErrorKind::InvalidModel, "restriction is not multiplicative");
}

inline CartanPair build_pair(const CDGAModel& big, const CDGAModel& small, const QMat& restriction, int rank, int cap) {
  validate_restriction(big, small, restriction);
  return CartanPair{build_cartan(big, rank, cap), build_cartan(small, rank, cap), restriction};
}

inline EqForm restrict_form(const CartanPair& p, const EqForm& f) {
  EqForm r;
  for (const auto& [k, x] : f.terms)
    for (const auto& [i, y] : p.restriction.column(k.first).entries) r.add({i, k.second}, x * y);
  return r;
}

struct PairView {
  ConePair pair;
  CochainView big, small;
};

inline PairView pair_view(const CartanPair& p) {
  PairView v;
  v.big = cochain_view(p.big);
  v.small = cochain_view(p.small);
  ChainMap f;
  f.source = v.big.complex;
  f.target = v.small.complex;
  f.shift = 0;
  std::map<int, std::vector<std::tuple<std::size_t, std::size_t, Rational>>> trip;
  for (std::size_t j = 0; j < p.big.size(); ++j) {
    EqForm e;
    e.terms[p.big.basis[j]] = 1;
    QVec img = to_vector(p.small, restrict_form(p, e));
    int n = p.big.degree[j];
    std::size_t col = v.big.to_total[j] - v.big.complex.offset(n);
    for (const auto& [i, x] : img.entries) {
      std::size_t row = v.small.to_total[i] - v.small.complex.offset(n);
      trip[n].emplace_back(row, col, x);
    }
  }
  for (const auto& [n, l] : v.big.complex.labels)
    f.f[n] = QMat::from_triplets(v.small.complex.dim(n), l.size(), trip[n]);
  v.pair = ConePair{v.big.complex, v.small.complex, f};
  return v;
}

inline int cone_window(const CartanPair& p) { return std::min(p.big.window - 1, p.small.window); }

struct RelativeResult {
  WindowedCohomology cohomology;
  int window = 0;
  bool stable = true;
};

inline WindowedCohomology relative_once(const CartanPair& p, const EqForm& eta, int window) {
  if (!is_closed(p.big, eta)) throw Error(ErrorKind::NotClosed, "twisting is not d_G-closed");
  PairView v = pair_view(p);
  QMat eb = permute_operator(mult_operator(p.big, eta), v.big.to_total);
  QMat es = permute_operator(mult_operator(p.small, restrict_form(p, eta)), v.small.to_total);
  return windowed_cohomology(twisted_cone(v.pair, eb, es).t, window);
}

inline RelativeResult relative_twisted_cohomology(const CartanPair& p, const Twisting& eta, bool check_stability = true) {
  RelativeResult r;
  r.window = cone_window(p);
  EqForm e = eta.total();
  r.cohomology = relative_once(p, e, r.window);
  if (check_stability && p.big.rank > 0) {
    CartanPair p2 = build_pair(p.big.model, p.small.model, p.restriction, p.big.rank, p.big.cap + 2);
    WindowedCohomology w2 = relative_once(p2, e, r.window);
    r.stable = same_window(r.cohomology, w2, r.window);
    if (!r.stable) throw Error(ErrorKind::UnstableWindow, "relative cohomology changes at cap + 2");
  }
  return r;
}

inline SixTermReport six_term_check(const CartanPair& p, const Twisting& eta) {
  EqForm e = eta.total();
  if (!is_closed(p.big, e)) throw Error(ErrorKind::NotClosed, "twisting is not d_G-closed");
  PairView v = pair_view(p);
  QMat eb = permute_operator(mult_operator(p.big, e), v.big.to_total);
  QMat es = permute_operator(mult_operator(p.small, restrict_form(p, e)), v.small.to_total);
  return six_term_check(v.pair, eb, es, cone_window(p));
}

}  // namespace twistcart
