#pragma once

// Spectral sequences of the total-degree filtration F and the polynomial
// filtration L on a twisted Cartan complex, computed per parity with
// E_r^p = Z_r^p / (Z_{r-1}^{p+1} + delta Z_{r-1}^{p-r+1}) and Z_{-1}^q = F^q.
// Windowed dims additionally divide out cycles supported in total degree > W.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twistcart/cartan.hpp"
#include "twistcart/dg_core.hpp"
#include "twistcart/error.hpp"
#include "twistcart/linalg.hpp"

namespace twistcart {

enum class FiltrationKind { F, L };

inline std::string kind_name(FiltrationKind k) { return k == FiltrationKind::F ? "F" : "L"; }

struct Filtration {
  FiltrationKind kind = FiltrationKind::F;
  TotalComplex t;
  std::vector<int> level;  // filtration level of each basis vector
  int window = 0;
  int lo = 0, hi = 0;  // range of levels present

  // p is reported only if its piece can hold a class of degree <= window
  bool in_window(int p) const { return kind == FiltrationKind::F ? p <= window : 2 * p <= window; }

  std::vector<bool> piece(int p) const {
    std::vector<bool> k(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) k[i] = level[i] >= p;
    return k;
  }
};

inline Filtration make_filtration(const CartanComplex& c, const Twisting& eta, FiltrationKind kind) {
  EqForm e = eta.total();
  if (!is_closed(c, e)) throw Error(ErrorKind::NotClosed, "twisting is not d_G-closed");
  Filtration f;
  f.kind = kind;
  f.t = twisted_total(c, e);
  f.window = c.window;
  f.level = kind == FiltrationKind::F ? c.degree : c.polydeg;
  if (!f.level.empty()) {
    f.lo = *std::min_element(f.level.begin(), f.level.end());
    f.hi = *std::max_element(f.level.begin(), f.level.end());
  }
  // delta must not lower the level
  for (std::size_t j = 0; j < f.t.size(); ++j)
    for (const auto& [i, x] : f.t.delta.column(j).entries)
      if (f.level[i] < f.level[j]) throw Error(ErrorKind::InvalidComplex, "differential lowers filtration level");
  return f;
}

using ParityDims = std::array<std::size_t, 2>;

struct SpectralPage {
  int r = 0;
  std::map<int, ParityDims> dims;       // windowed, p inside the window
  std::map<int, ParityDims> raw;        // every level of the truncated complex
  std::map<int, ParityDims> diff_rank;  // rank of d_r out of E_r^p (raw)
  bool verified = true;                 // raw E_r = H(E_{r-1}, d_{r-1})
};

struct SpectralResult {
  FiltrationKind kind = FiltrationKind::F;
  int window = 0;
  std::vector<SpectralPage> pages;
  std::map<int, ParityDims> e_inf;      // windowed
  std::map<int, ParityDims> e_inf_raw;
  std::optional<int> collapse_page;     // first r with raw E_r = raw E_inf
};

namespace detail {

class PageEngine {
 public:
  explicit PageEngine(const Filtration& f) : f_(f), n_(f.t.size()) {
    pc_ = parity_cycles(f.t);
    beyond_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) beyond_[i] = f.t.degree[i] > f.window;
  }

  // Z_r^p in parity s; r = -1 gives the piece F^p itself. Cached by the
  // effective piece and the effective target level p + r.
  const std::vector<QVec>& Z(int r, int p, int s) {
    int pe = std::clamp(p, f_.lo, f_.hi + 1);
    int te = r < 0 ? pe : std::clamp(p + r, pe, f_.hi + 1);
    auto key = std::make_tuple(pe, te, s);
    auto it = z_.find(key);
    if (it != z_.end()) return it->second;
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n_; ++j)
      if (f_.level[j] >= pe && parity_of(f_.t.degree[j]) == s) idx.push_back(j);
    std::vector<QVec> out;
    if (te == pe) {
      // delta never lowers the level, so the condition is vacuous
      for (auto j : idx) out.push_back(QVec::unit(j));
    } else {
      std::vector<bool> low(n_);
      for (std::size_t i = 0; i < n_; ++i) low[i] = f_.level[i] < te;
      std::vector<QVec> images;
      for (auto j : idx) images.push_back(restrict_to(f_.t.delta.column(j), low));
      for (const auto& c : relations(images, n_)) {
        QVec v;
        for (const auto& [k, x] : c.entries) v.entries.emplace_back(idx[k], x);
        std::sort(v.entries.begin(), v.entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(std::move(v));
      }
    }
    return z_[key] = std::move(out);
  }

  std::vector<QVec> denominator(int r, int p, int s) {
    std::vector<QVec> d = Z(r - 1, p + 1, s);
    for (const auto& v : Z(r - 1, p - r + 1, 1 - s)) {
      QVec w = f_.t.delta.apply(v);
      if (!w.empty()) d.push_back(std::move(w));
    }
    return d;
  }

  static std::size_t quotient(const std::vector<QVec>& num, const std::vector<QVec>& den) {
    Echelon<Rational> e;
    for (const auto& v : den) e.insert(v);
    std::size_t base = e.dim();
    for (const auto& v : num) e.insert(v);
    return e.dim() - base;
  }

  std::size_t raw_dim(int r, int p, int s) { return quotient(Z(r, p, s), denominator(r, p, s)); }

  std::size_t windowed_dim(int r, int p, int s) {
    const auto& z = Z(r, p, s);
    std::vector<QVec> den = denominator(r, p, s);
    for (auto& v : intersect_coordinates(z, beyond_)) den.push_back(std::move(v));
    return quotient(z, den);
  }

  std::size_t diff_rank(int r, int p, int s) {
    std::vector<QVec> img;
    for (const auto& v : Z(r, p, s)) img.push_back(f_.t.delta.apply(v));
    return quotient(img, denominator(r, p + r, 1 - s));
  }

  // E_inf^p = Z^p / (Z^{p+1} + B^p), Z^p = cycles in F^p, B^p = boundaries in F^p.
  std::pair<std::size_t, std::size_t> e_inf(int p, int s) {
    auto zp = intersect_coordinates(pc_.cycles[s], f_.piece(p));
    auto zp1 = intersect_coordinates(pc_.cycles[s], f_.piece(p + 1));
    auto bp = intersect_coordinates(pc_.boundaries[s], f_.piece(p));
    std::vector<QVec> den = zp1;
    den.insert(den.end(), bp.begin(), bp.end());
    std::size_t raw = quotient(zp, den);
    std::vector<QVec> neg = intersect_coordinates(pc_.cycles[s], beyond_);
    neg.insert(neg.end(), pc_.boundaries[s].begin(), pc_.boundaries[s].end());
    for (auto& v : intersect(zp, neg, n_)) den.push_back(std::move(v));
    return {raw, quotient(zp, den)};
  }

 private:
  const Filtration& f_;
  std::size_t n_;
  ParityCycles pc_;
  std::vector<bool> beyond_;
  std::map<std::tuple<int, int, int>, std::vector<QVec>> z_;
};

}  // namespace detail

// Pages E_0 .. E_maxPage plus E_inf. maxPage < 0 runs until the raw pages
// reach E_inf.
inline SpectralResult pages(const Filtration& f, int max_page = -1) {
  if (f.window < 0) throw Error(ErrorKind::WindowTooSmall, "empty window");
  detail::PageEngine eng(f);
  SpectralResult res;
  res.kind = f.kind;
  res.window = f.window;
  for (int p = f.lo; p <= f.hi; ++p) {
    auto [r0, w0] = eng.e_inf(p, 0);
    auto [r1, w1] = eng.e_inf(p, 1);
    res.e_inf_raw[p] = {r0, r1};
    if (f.in_window(p)) res.e_inf[p] = {w0, w1};
  }
  int span = f.hi - f.lo + 1;
  int last = max_page < 0 ? span + 1 : max_page;
  for (int r = 0; r <= last; ++r) {
    SpectralPage pg;
    pg.r = r;
    for (int p = f.lo; p <= f.hi; ++p) {
      ParityDims raw{}, win{}, rk{};
      for (int s = 0; s < 2; ++s) {
        raw[s] = eng.raw_dim(r, p, s);
        if (f.in_window(p)) win[s] = eng.windowed_dim(r, p, s);
        rk[s] = eng.diff_rank(r, p, s);
      }
      pg.raw[p] = raw;
      if (f.in_window(p)) pg.dims[p] = win;
      pg.diff_rank[p] = rk;
    }
    if (!res.pages.empty()) {
      const SpectralPage& prev = res.pages.back();
      for (int p = f.lo; p <= f.hi; ++p)
        for (int s = 0; s < 2; ++s) {
          std::size_t in = prev.diff_rank.count(p - prev.r) ? prev.diff_rank.at(p - prev.r)[1 - s] : 0;
          std::size_t expect = prev.raw.at(p)[s] - prev.diff_rank.at(p)[s] - in;
          if (pg.raw[p][s] != expect) pg.verified = false;
        }
    }
    if (!res.collapse_page && pg.raw == res.e_inf_raw) res.collapse_page = r;
    res.pages.push_back(std::move(pg));
    if (max_page < 0 && res.collapse_page && r > *res.collapse_page) break;
  }
  return res;
}

inline ParityDims total_dims(const std::map<int, ParityDims>& m) {
  ParityDims t{0, 0};
  for (const auto& [p, d] : m) {
    t[0] += d[0];
    t[1] += d[1];
  }
  return t;
}

struct ConvergenceReport {
  ParityDims e_inf{0, 0};
  ParityDims twisted{0, 0};
  bool converged = false;  // windowed E_inf totals equal twisted dims
  bool stabilized = false;  // raw pages reached E_inf
  bool pages_verified = true;
};

inline ConvergenceReport convergence_check(const Filtration& f, const SpectralResult& s) {
  ConvergenceReport r;
  r.e_inf = total_dims(s.e_inf);
  WindowedCohomology w = windowed_cohomology(f.t, f.window);
  r.twisted = w.dims;
  r.converged = r.e_inf == r.twisted;
  r.stabilized = s.collapse_page.has_value();
  for (const auto& pg : s.pages) r.pages_verified = r.pages_verified && pg.verified;
  return r;
}

// Page bookkeeping for the F-filtration: which pages agree with untwisted
// H_G degree by degree, and the first nonzero differential after that.
struct PageLabels {
  std::vector<int> hg_pages;
  std::optional<int> eta_page;
  bool collapses_at_hg = false;
};

inline PageLabels page_labels(const CartanComplex& c, const SpectralResult& s) {
  if (s.kind != FiltrationKind::F) throw Error(ErrorKind::InvalidComplex, "page labels are defined for F");
  auto hg = untwisted_dims(c);
  PageLabels l;
  for (const auto& pg : s.pages) {
    bool same = true;
    for (const auto& [p, d] : pg.dims) {
      std::size_t want = hg.count(p) ? hg.at(p) : 0;
      if (d[parity_of(p)] != want || d[1 - parity_of(p)] != 0) same = false;
    }
    if (same) l.hg_pages.push_back(pg.r);
  }
  if (l.hg_pages.empty()) return l;
  int first = l.hg_pages.front();
  for (const auto& pg : s.pages) {
    if (pg.r < first) continue;
    bool nonzero = false;
    for (const auto& [p, rk] : pg.diff_rank)
      if (s.window >= p + pg.r && (rk[0] || rk[1])) nonzero = true;
    if (nonzero) {
      l.eta_page = pg.r;
      break;
    }
  }
  l.collapses_at_hg = !l.eta_page.has_value();
  return l;
}

// Expected L-filtration E_1: fiber twisted cohomology tensor the degree-p
// monomials in rank variables, cut at total degree <= window.
inline std::map<int, ParityDims> expected_l_e1(const CartanComplex& c, const Twisting& eta) {
  CartanComplex fib = build_cartan(c.model, 0, 1);
  EqForm h = fiber_form(eta.total());
  WindowedCohomology w = windowed_cohomology(twisted_total(fib, h), fib.window);
  std::map<int, std::size_t> monomials;
  for (const auto& m : poly_monomials(c.rank, c.cap)) monomials[poly_degree(m)] += 1;
  std::map<int, ParityDims> out;
  for (int p = 0; 2 * p <= c.window && p <= c.cap; ++p) {
    ParityDims d{0, 0};
    for (int s = 0; s < 2; ++s)
      for (const auto& [k, n] : w.graded[s])
        if (k + 2 * p <= c.window) d[s] += n * monomials[p];
    out[p] = d;
  }
  return out;
}

struct FormalityReport {
  bool formal = false;
  ParityDims restriction_rank{0, 0};
  ParityDims fiber_dims{0, 0};
};

// Surjectivity of H_G(M; eta) -> H(M; eta(0)) induced by x = 0.
inline FormalityReport formality_test(const CartanComplex& c, const Twisting& eta) {
  if (c.window < c.model.top_degree())
    throw Error(ErrorKind::WindowTooSmall, "window smaller than the top form degree");
  TwistedResult tw = twisted_cohomology(c, eta, false);
  CartanComplex fib = build_cartan(c.model, 0, 1);
  TotalComplex ft = twisted_total(fib, fiber_form(eta.total()));
  WindowedCohomology fw = windowed_cohomology(ft, fib.window);
  ParityCycles fpc = parity_cycles(ft);
  FormalityReport r;
  r.fiber_dims = fw.dims;
  for (int s = 0; s < 2; ++s) {
    Echelon<Rational> e;
    for (const auto& b : fpc.boundaries[s]) e.insert(b);
    std::size_t base = e.dim();
    for (const auto& rep : tw.cohomology.representatives) {
      if (rep.parity != s) continue;
      e.insert(to_vector(fib, fiber_form(from_vector(c, rep.vector))));
    }
    r.restriction_rank[s] = e.dim() - base;
  }
  r.formal = r.restriction_rank == r.fiber_dims;
  return r;
}

struct InclusionCheck {
  int p = 0;
  bool holds = true;
  std::string witness;  // basis label violating the inclusion
};

struct CofinalityReport {
  int n = 0;
  // F^{2p-n} in L^p and L^p in F^{2p+n}
  std::vector<InclusionCheck> lower_as_written, upper_as_written;
  // F^{2p+n} in L^p and L^p in F^{2p-n}
  std::vector<InclusionCheck> lower, upper;
  bool as_written_holds = true;
  bool holds = true;
};

namespace detail {

inline Subspace<Rational> coordinate_span(std::size_t n, const std::vector<bool>& keep) {
  std::vector<QVec> v;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) v.push_back(QVec::unit(i));
  return span(n, v);
}

inline InclusionCheck inclusion(const CartanComplex& c, int p, const std::vector<bool>& a, const std::vector<bool>& b) {
  InclusionCheck r;
  r.p = p;
  r.holds = is_subspace_of(coordinate_span(c.size(), a), coordinate_span(c.size(), b));
  if (!r.holds)
    for (std::size_t i = 0; i < c.size(); ++i)
      if (a[i] && !b[i]) {
        r.witness = c.label(i);
        break;
      }
  return r;
}

}  // namespace detail

// Cofinality of F and L on the truncated complex, n = top form degree.
inline CofinalityReport cofinality(const CartanComplex& c) {
  CofinalityReport rep;
  rep.n = c.model.top_degree();
  int n = rep.n;
  auto F = [&](int k) {
    std::vector<bool> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = c.degree[i] >= k;
    return v;
  };
  auto L = [&](int p) {
    std::vector<bool> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = c.polydeg[i] >= p;
    return v;
  };
  for (int p = 0; p <= c.cap + 1; ++p) {
    rep.lower_as_written.push_back(detail::inclusion(c, p, F(2 * p - n), L(p)));
    rep.upper_as_written.push_back(detail::inclusion(c, p, L(p), F(2 * p + n)));
    rep.lower.push_back(detail::inclusion(c, p, F(2 * p + n), L(p)));
    rep.upper.push_back(detail::inclusion(c, p, L(p), F(2 * p - n)));
  }
  for (const auto& v : {rep.lower_as_written, rep.upper_as_written})
    for (const auto& x : v) rep.as_written_holds = rep.as_written_holds && x.holds;
  for (const auto& v : {rep.lower, rep.upper})
    for (const auto& x : v) rep.holds = rep.holds && x.holds;
  return rep;
}

}  // namespace twistcart
