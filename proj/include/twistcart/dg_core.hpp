#pragma once

// Bounded cochain complexes, chain maps, mapping cones and cohomology.
// A TotalComplex forgets the grading of the differential and keeps only a
// degree per basis vector; twisted differentials live there.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "twistcart/error.hpp"
#include "twistcart/linalg.hpp"

namespace twistcart {

using QVec = SparseVector<Rational>;
using QMat = SparseMatrix<Rational>;

inline int parity_of(int n) { return ((n % 2) + 2) % 2; }

struct CochainComplex {
  std::map<int, std::vector<std::string>> labels;  // degree -> basis labels
  std::map<int, QMat> d;                           // d[n]: degree n -> n+1

  std::size_t dim(int n) const {
    auto it = labels.find(n);
    return it == labels.end() ? 0 : it->second.size();
  }
  int min_degree() const { return labels.empty() ? 0 : labels.begin()->first; }
  int top_degree() const { return labels.empty() ? -1 : labels.rbegin()->first; }

  QMat diff(int n) const {
    auto it = d.find(n);
    if (it != d.end()) return it->second;
    return QMat(dim(n + 1), dim(n));
  }

  std::size_t total_dim() const {
    std::size_t s = 0;
    for (const auto& [n, l] : labels) s += l.size();
    return s;
  }

  // Offset of degree n inside the total basis (degrees ascending).
  std::size_t offset(int n) const {
    std::size_t s = 0;
    for (const auto& [m, l] : labels) {
      if (m >= n) break;
      s += l.size();
    }
    return s;
  }

  void validate() const {
    for (const auto& [n, m] : d) {
      if (m.cols() != dim(n) || m.rows() != dim(n + 1))
        throw Error(ErrorKind::InvalidComplex, "differential shape mismatch in degree " + std::to_string(n));
    }
    for (const auto& [n, m] : d) {
      auto next = d.find(n + 1);
      if (next == d.end()) continue;
      if (!(next->second * m).is_zero_matrix())
        throw Error(ErrorKind::InvalidComplex, "d^2 != 0 at degree " + std::to_string(n));
    }
  }
};

struct TotalComplex {
  std::vector<int> degree;  // per basis vector
  std::vector<std::string> labels;
  QMat delta;

  std::size_t size() const { return degree.size(); }
};

inline TotalComplex total(const CochainComplex& c) {
  TotalComplex t;
  for (const auto& [n, l] : c.labels)
    for (const auto& s : l) {
      t.degree.push_back(n);
      t.labels.push_back(s);
    }
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> trip;
  for (const auto& [n, m] : c.d) {
    std::size_t src = c.offset(n), dst = c.offset(n + 1);
    for (const auto& [i, j, x] : m.triplets()) trip.emplace_back(dst + i, src + j, x);
  }
  t.delta = QMat::from_triplets(t.size(), t.size(), trip);
  return t;
}

struct CohomologyGroup {
  std::size_t dim = 0;
  std::vector<QVec> representatives;  // in the degree-n basis
};

// H^n = ker d^n / im d^(n-1) for every degree up to the top degree.
inline std::map<int, CohomologyGroup> cohomology(const CochainComplex& c) {
  c.validate();
  std::map<int, CohomologyGroup> h;
  for (const auto& [n, l] : c.labels) {
    Subspace<Rational> z = kernel_basis(c.diff(n));
    Subspace<Rational> b = image_basis(c.diff(n - 1));
    QuotientResult<Rational> q = quotient_dim(b, z);
    h[n] = CohomologyGroup{q.dim, q.representatives};
  }
  return h;
}

struct ChainMap {
  CochainComplex source, target;
  int shift = 0;
  std::map<int, QMat> f;  // f[n]: source degree n -> target degree n + shift

  QMat component(int n) const {
    auto it = f.find(n);
    if (it != f.end()) return it->second;
    return QMat(target.dim(n + shift), source.dim(n));
  }

  // d f = (-1)^shift f d
  void validate() const {
    for (const auto& [n, l] : source.labels) {
      QMat m = component(n);
      if (m.rows() != target.dim(n + shift) || m.cols() != source.dim(n))
        throw Error(ErrorKind::InvalidComplex, "chain map shape mismatch in degree " + std::to_string(n));
      QMat lhs = target.diff(n + shift) * m;
      QMat rhs = component(n + 1) * source.diff(n);
      if (shift % 2 != 0) rhs = rhs.scaled(Rational(-1));
      if (lhs != rhs) throw Error(ErrorKind::InvalidComplex, "chain map fails to commute at degree " + std::to_string(n));
    }
  }
};

inline ChainMap identity_map(const CochainComplex& c) {
  ChainMap m{c, c, 0, {}};
  for (const auto& [n, l] : c.labels) m.f[n] = QMat::identity(l.size());
  return m;
}

struct ConePair {
  CochainComplex big;    // N
  CochainComplex small;  // A
  ChainMap restriction;  // i*: N -> A, degree 0
};

// cone^n = N^(n+1) + A^n,  delta(n, a) = (-d n, d a + i* n)
inline CochainComplex mapping_cone(const ConePair& p) {
  p.big.validate();
  p.small.validate();
  p.restriction.validate();
  if (p.restriction.shift != 0) throw Error(ErrorKind::InvalidComplex, "restriction must have degree 0");
  CochainComplex c;
  int lo = std::min(p.big.min_degree() - 1, p.small.min_degree());
  int hi = std::max(p.big.top_degree() - 1, p.small.top_degree());
  for (int n = lo; n <= hi; ++n) {
    std::vector<std::string> l;
    for (const auto& s : p.big.labels.count(n + 1) ? p.big.labels.at(n + 1) : std::vector<std::string>{})
      l.push_back("N:" + s);
    for (const auto& s : p.small.labels.count(n) ? p.small.labels.at(n) : std::vector<std::string>{})
      l.push_back("A:" + s);
    if (!l.empty()) c.labels[n] = l;
  }
  for (int n = lo; n < hi; ++n) {
    std::size_t bn = p.big.dim(n + 1), an = p.small.dim(n);
    std::size_t bn1 = p.big.dim(n + 2), an1 = p.small.dim(n + 1);
    if (bn + an == 0 || bn1 + an1 == 0) continue;
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> t;
    for (const auto& [i, j, x] : p.big.diff(n + 1).triplets()) t.emplace_back(i, j, -x);
    for (const auto& [i, j, x] : p.restriction.component(n + 1).triplets()) t.emplace_back(bn1 + i, j, x);
    for (const auto& [i, j, x] : p.small.diff(n).triplets()) t.emplace_back(bn1 + i, bn + j, x);
    c.d[n] = QMat::from_triplets(bn1 + an1, bn + an, t);
  }
  c.validate();
  return c;
}

struct QuasiIsoDegree {
  int degree = 0;
  std::size_t source_dim = 0, target_dim = 0, rank = 0;
  bool bijective = false;
};

struct QuasiIsoReport {
  bool quasi_iso = true;
  std::vector<QuasiIsoDegree> degrees;
};

inline QuasiIsoReport is_quasi_iso(const ChainMap& f, int window) {
  f.validate();
  auto hs = cohomology(f.source);
  auto ht = cohomology(f.target);
  QuasiIsoReport rep;
  std::vector<int> degs;
  for (const auto& [n, g] : hs) degs.push_back(n);
  for (const auto& [n, g] : ht)
    if (!hs.count(n - f.shift)) degs.push_back(n - f.shift);
  std::sort(degs.begin(), degs.end());
  degs.erase(std::unique(degs.begin(), degs.end()), degs.end());
  for (int n : degs) {
    if (n > window) continue;
    QuasiIsoDegree d;
    d.degree = n;
    d.source_dim = hs.count(n) ? hs.at(n).dim : 0;
    d.target_dim = ht.count(n + f.shift) ? ht.at(n + f.shift).dim : 0;
    Echelon<Rational> e;
    for (const auto& b : image_basis(f.target.diff(n + f.shift - 1)).basis) e.insert(b);
    std::size_t base = e.dim();
    if (hs.count(n)) {
      QMat m = f.component(n);
      for (const auto& z : hs.at(n).representatives) e.insert(m.apply(z));
    }
    d.rank = e.dim() - base;
    d.bijective = d.rank == d.source_dim && d.rank == d.target_dim;
    rep.quasi_iso = rep.quasi_iso && d.bijective;
    rep.degrees.push_back(d);
  }
  return rep;
}

// Cocycles and coboundaries of a square-zero operator split by parity of
// the basis degrees.
struct ParityCycles {
  std::array<std::vector<QVec>, 2> cycles, boundaries;
};

inline void check_total(const TotalComplex& t) {
  if (t.delta.rows() != t.size() || t.delta.cols() != t.size())
    throw Error(ErrorKind::InvalidComplex, "operator shape does not match basis");
  for (std::size_t j = 0; j < t.size(); ++j)
    for (const auto& [i, x] : t.delta.column(j).entries)
      if (parity_of(t.degree[i]) == parity_of(t.degree[j]))
        throw Error(ErrorKind::InvalidComplex, "operator does not change parity");
  if (!(t.delta * t.delta).is_zero_matrix()) throw Error(ErrorKind::InvalidComplex, "delta^2 != 0");
}

inline ParityCycles parity_cycles(const TotalComplex& t) {
  ParityCycles pc;
  for (int s = 0; s < 2; ++s) {
    std::vector<std::size_t> idx;
    std::vector<QVec> images;
    for (std::size_t j = 0; j < t.size(); ++j)
      if (parity_of(t.degree[j]) == s) {
        idx.push_back(j);
        images.push_back(t.delta.column(j));
      }
    for (const auto& c : relations(images, t.size())) {
      QVec z;
      for (const auto& [k, x] : c.entries) z.entries.emplace_back(idx[k], x);
      std::sort(z.entries.begin(), z.entries.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      pc.cycles[s].push_back(std::move(z));
    }
    for (auto& v : images)
      if (!v.empty()) pc.boundaries[1 - s].push_back(std::move(v));
  }
  return pc;
}

// Coordinates relabelled so that lower degree comes first; an echelon basis
// in these coordinates is adapted to the decreasing degree filtration.
inline std::vector<std::size_t> degree_order(const std::vector<int>& degree) {
  std::vector<std::size_t> order(degree.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });
  std::vector<std::size_t> perm(degree.size());
  for (std::size_t k = 0; k < order.size(); ++k) perm[order[k]] = k;
  return perm;
}

inline std::vector<std::size_t> invert(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

struct WindowedRep {
  int parity = 0;
  int degree = 0;  // filtration degree of the class
  QVec vector;
};

struct WindowedCohomology {
  int window = 0;
  std::array<std::size_t, 2> dims{0, 0};  // classes of filtration degree <= window
  std::array<std::size_t, 2> raw{0, 0};   // full cohomology of the finite complex
  std::array<std::map<int, std::size_t>, 2> graded;  // filtration degree -> dim
  std::vector<WindowedRep> representatives;
};

// Classes of H(C) modulo those representable inside degrees > window, i.e.
// the image of H(C) in H(C / F^(window+1)), graded by filtration degree.
inline WindowedCohomology windowed_cohomology(const TotalComplex& t, int window) {
  check_total(t);
  ParityCycles pc = parity_cycles(t);
  std::vector<std::size_t> perm = degree_order(t.degree), inv = invert(perm);
  WindowedCohomology wc;
  wc.window = window;
  for (int s = 0; s < 2; ++s) {
    Echelon<Rational> ze;
    for (const auto& z : pc.cycles[s]) ze.insert(permute(z, perm));
    std::vector<QVec> rows = ze.rows();
    Echelon<Rational> e;
    for (const auto& b : pc.boundaries[s]) e.insert(permute(b, perm));
    std::size_t bdim = e.dim();
    // Insert cycles from the highest filtration degree down.
    std::sort(rows.begin(), rows.end(), [&](const QVec& a, const QVec& b) {
      int da = t.degree[inv[a.lead()]], db = t.degree[inv[b.lead()]];
      if (da != db) return da > db;
      return a.lead() < b.lead();
    });
    for (const auto& r : rows) {
      int deg = t.degree[inv[r.lead()]];
      if (!e.insert(r)) continue;
      wc.graded[s][deg] += 1;
      if (deg <= window) {
        wc.dims[s] += 1;
        wc.representatives.push_back(WindowedRep{s, deg, permute(r, inv)});
      }
    }
    wc.raw[s] = e.dim() - bdim;
  }
  std::sort(wc.representatives.begin(), wc.representatives.end(), [](const auto& a, const auto& b) {
    if (a.parity != b.parity) return a.parity < b.parity;
    return a.degree < b.degree;
  });
  return wc;
}

// Six-term exactness for 0 -> A -> cone -> N[1] -> 0 with twisting operators
// acting on the totals of N and A (module action of the twisting form).
struct SixTermNode {
  std::string name;
  std::size_t raw_dim = 0;
  std::size_t window_dim = 0;
  bool exact = false;
};

struct SixTermReport {
  bool exact = true;
  std::vector<SixTermNode> nodes;
};

namespace detail {

struct NodeData {
  TotalComplex t;
  ParityCycles pc;
  WindowedCohomology wc;
};

inline std::size_t span_dim(const std::vector<QVec>& a, const std::vector<QVec>& b) {
  Echelon<Rational> e;
  for (const auto& v : a) e.insert(v);
  for (const auto& v : b) e.insert(v);
  return e.dim();
}

// Exactness of X at parity s: incoming g_in from P (parity sp), outgoing
// g_out to Y (parity sy).
inline bool exact_at(const NodeData& P, int sp, const QMat& g_in, const NodeData& X, int s, const QMat& g_out,
                     const NodeData& Y, int sy) {
  const auto& zx = X.pc.cycles[s];
  const auto& bx = X.pc.boundaries[s];
  std::vector<QVec> img;
  for (const auto& z : P.pc.cycles[sp]) img.push_back(g_in.apply(z));
  // composite is zero in cohomology
  Echelon<Rational> by;
  for (const auto& b : Y.pc.boundaries[sy]) by.insert(b);
  for (const auto& v : img)
    if (!by.contains(g_out.apply(v))) return false;
  std::size_t dim_im = span_dim(img, bx) - rank_of(bx);
  std::vector<QVec> out;
  for (const auto& z : zx) out.push_back(g_out.apply(z));
  std::size_t rank_out = span_dim(out, Y.pc.boundaries[sy]) - rank_of(Y.pc.boundaries[sy]);
  std::size_t hx = span_dim(zx, bx) - rank_of(bx);
  return dim_im == hx - rank_out;
}

}  // namespace detail

// Twisted cone: delta(n, a) = (-(d + eta) n, (d + eta) a + i* n). nmap/amap
// locate the N and A total bases inside the cone basis.
struct TwistedCone {
  CochainComplex cone;
  TotalComplex t;
  std::vector<std::size_t> nmap, amap;
};

inline TwistedCone twisted_cone(const ConePair& p, const QMat& eta_big, const QMat& eta_small) {
  TwistedCone r;
  r.cone = mapping_cone(p);
  r.t = total(r.cone);
  std::size_t nb = p.big.total_dim(), na = p.small.total_dim();
  if (eta_big.rows() != nb || eta_big.cols() != nb || eta_small.rows() != na || eta_small.cols() != na)
    throw Error(ErrorKind::DimensionMismatch, "twisting operator shapes");
  r.nmap.resize(nb);
  r.amap.resize(na);
  std::size_t k = 0;
  for (const auto& [n, l] : r.cone.labels) {
    std::size_t bn = p.big.dim(n + 1), an = p.small.dim(n);
    for (std::size_t i = 0; i < bn; ++i) r.nmap[p.big.offset(n + 1) + i] = k + i;
    for (std::size_t i = 0; i < an; ++i) r.amap[p.small.offset(n) + i] = k + bn + i;
    k += bn + an;
  }
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> trip;
  for (const auto& [i, j, x] : eta_big.triplets()) trip.emplace_back(r.nmap[i], r.nmap[j], -x);
  for (const auto& [i, j, x] : eta_small.triplets()) trip.emplace_back(r.amap[i], r.amap[j], x);
  r.t.delta = r.t.delta + QMat::from_triplets(r.t.size(), r.t.size(), trip);
  check_total(r.t);
  return r;
}

inline SixTermReport six_term_check(const ConePair& p, const QMat& eta_big, const QMat& eta_small, int window) {
  if (window < 0) throw Error(ErrorKind::WindowTooSmall, "window must be non-negative");
  TwistedCone tcone = twisted_cone(p, eta_big, eta_small);
  TotalComplex tn = total(p.big), ta = total(p.small), tc = tcone.t;
  tn.delta = tn.delta + eta_big;
  ta.delta = ta.delta + eta_small;
  const auto& nmap = tcone.nmap;
  const auto& amap = tcone.amap;

  std::vector<std::tuple<std::size_t, std::size_t, Rational>> inc, proj, res;
  for (std::size_t i = 0; i < ta.size(); ++i) inc.emplace_back(amap[i], i, Rational(1));
  for (std::size_t i = 0; i < tn.size(); ++i) proj.emplace_back(i, nmap[i], Rational(1));
  for (const auto& [n, m] : p.restriction.f)
    for (const auto& [i, j, x] : m.triplets()) res.emplace_back(p.small.offset(n) + i, p.big.offset(n) + j, x);
  QMat g_inc = QMat::from_triplets(tc.size(), ta.size(), inc);
  QMat g_proj = QMat::from_triplets(tn.size(), tc.size(), proj);
  QMat g_res = QMat::from_triplets(ta.size(), tn.size(), res);

  detail::NodeData A{ta, parity_cycles(ta), windowed_cohomology(ta, window)};
  detail::NodeData N{tn, parity_cycles(tn), windowed_cohomology(tn, window + 1)};
  detail::NodeData C{tc, parity_cycles(tc), windowed_cohomology(tc, window)};

  // Sequence (parities): A^s -> C^s -> N^(s+1) -> A^(s+1) -> ...
  SixTermReport rep;
  auto add = [&](const std::string& name, const detail::NodeData& x, int s, bool ok) {
    rep.nodes.push_back(SixTermNode{name, x.wc.raw[s], x.wc.dims[s], ok});
    rep.exact = rep.exact && ok;
  };
  for (int s = 0; s < 2; ++s) {
    int t1 = 1 - s;
    add("H" + std::to_string(s) + "(A)", A, s, detail::exact_at(N, s, g_res, A, s, g_inc, C, s));
    add("H" + std::to_string(s) + "(N,A)", C, s, detail::exact_at(A, s, g_inc, C, s, g_proj, N, t1));
    add("H" + std::to_string(t1) + "(N)", N, t1, detail::exact_at(C, s, g_proj, N, t1, g_res, A, t1));
  }
  return rep;
}

}  // namespace twistcart
