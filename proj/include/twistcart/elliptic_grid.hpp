#pragma once

// Finite-difference checks on a uniform grid in R^{2n}: Riemann-Cauchy
// residuals of (f, g) against an almost complex field J, the second-order
// coefficients a^{pq}, b^q, and a discrete maximum principle.
//
// J is stored as J[k][p] = J_k^p, i.e. J d/dx_k = J_k^p d/dx_p.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "twistcart/error.hpp"

namespace twistcart {

using DMat = std::vector<std::vector<double>>;

inline DMat dzeros(std::size_t n) { return DMat(n, std::vector<double>(n, 0.0)); }

struct ChartGrid {
  int dim = 2;
  double h = 1.0 / 64;
  std::vector<int> lo, hi;  // inclusive index range per axis, x = i * h

  static ChartGrid cube(int dim, double h, double extent) {
    ChartGrid g;
    g.dim = dim;
    g.h = h;
    int n = static_cast<int>(std::lround(extent / h));
    g.lo.assign(dim, -n);
    g.hi.assign(dim, n);
    g.validate();
    return g;
  }

  void validate() const {
    if (!(h > 0)) throw Error(ErrorKind::GridTooSmall, "spacing must be positive");
    if (dim < 2 || dim % 2 != 0) throw Error(ErrorKind::GridTooSmall, "dimension must be even");
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
      throw Error(ErrorKind::GridTooSmall, "extents do not match the dimension");
    for (int a = 0; a < dim; ++a)
      if (hi[a] - lo[a] + 1 < 5) throw Error(ErrorKind::GridTooSmall, "need at least 5 points per axis");
  }

  std::size_t extent(int a) const { return static_cast<std::size_t>(hi[a] - lo[a] + 1); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= extent(a);
    return s;
  }

  std::vector<int> index(std::size_t flat) const {
    std::vector<int> idx(dim);
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = lo[a] + static_cast<int>(flat % extent(a));
      flat /= extent(a);
    }
    return idx;
  }

  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * extent(a) + static_cast<std::size_t>(idx[a] - lo[a]);
    return f;
  }

  std::vector<double> coords(const std::vector<int>& idx) const {
    std::vector<double> x(dim);
    for (int a = 0; a < dim; ++a) x[a] = idx[a] * h;
    return x;
  }

  bool contains(const std::vector<int>& idx) const {
    for (int a = 0; a < dim; ++a)
      if (idx[a] < lo[a] || idx[a] > hi[a]) return false;
    return true;
  }

  // at least `margin` points away from every face
  bool interior(const std::vector<int>& idx, int margin = 1) const {
    for (int a = 0; a < dim; ++a)
      if (idx[a] < lo[a] + margin || idx[a] > hi[a] - margin) return false;
    return true;
  }
};

struct ScalarField {
  ChartGrid grid;
  std::vector<double> v;

  double at(const std::vector<int>& idx) const { return v[grid.flat(idx)]; }
};

struct AlmostComplexField {
  ChartGrid grid;
  std::vector<DMat> j;

  const DMat& at(const std::vector<int>& idx) const { return j[grid.flat(idx)]; }
};

inline ScalarField sample_scalar(const ChartGrid& g, const std::function<double(const std::vector<double>&)>& f) {
  g.validate();
  ScalarField s{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = f(g.coords(g.index(i)));
  return s;
}

inline AlmostComplexField sample_j(const ChartGrid& g, const std::function<DMat(const std::vector<double>&)>& f,
                                   double tol = 1e-9) {
  g.validate();
  AlmostComplexField a{g, std::vector<DMat>(g.size())};
  std::size_t m = static_cast<std::size_t>(g.dim);
  for (std::size_t i = 0; i < g.size(); ++i) {
    a.j[i] = f(g.coords(g.index(i)));
    const DMat& j = a.j[i];
    if (j.size() != m) throw Error(ErrorKind::DimensionMismatch, "J sample has the wrong size");
    // (J^2)_k^q = J_k^p J_p^q
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t q = 0; q < m; ++q) {
        double s = k == q ? 1.0 : 0.0;
        for (std::size_t p = 0; p < m; ++p) s += j[k][p] * j[p][q];
        if (std::fabs(s) > tol) throw Error(ErrorKind::DimensionMismatch, "J^2 != -1 at a grid point");
      }
  }
  return a;
}

// J d/dx_k = d/dx_{k+n}, J d/dx_{k+n} = -d/dx_k
inline DMat standard_j(int dim) {
  std::size_t m = static_cast<std::size_t>(dim), n = m / 2;
  DMat j = dzeros(m);
  for (std::size_t k = 0; k < n; ++k) {
    j[k][k + n] = 1.0;
    j[k + n][k] = -1.0;
  }
  return j;
}

namespace detail {

inline std::vector<int> shifted(std::vector<int> idx, int a, int s) {
  idx[a] += s;
  return idx;
}

inline double d1(const ScalarField& f, const std::vector<int>& idx, int a) {
  return (f.at(shifted(idx, a, 1)) - f.at(shifted(idx, a, -1))) / (2 * f.grid.h);
}

inline double d2(const ScalarField& f, const std::vector<int>& idx, int a, int b) {
  double h = f.grid.h;
  if (a == b) return (f.at(shifted(idx, a, 1)) - 2 * f.at(idx) + f.at(shifted(idx, a, -1))) / (h * h);
  auto pp = shifted(shifted(idx, a, 1), b, 1), pm = shifted(shifted(idx, a, 1), b, -1);
  auto mp = shifted(shifted(idx, a, -1), b, 1), mm = shifted(shifted(idx, a, -1), b, -1);
  return (f.at(pp) - f.at(pm) - f.at(mp) + f.at(mm)) / (4 * h * h);
}

inline double dj(const AlmostComplexField& j, const std::vector<int>& idx, int a, std::size_t k, std::size_t p) {
  return (j.at(shifted(idx, a, 1))[k][p] - j.at(shifted(idx, a, -1))[k][p]) / (2 * j.grid.h);
}

inline void same_grid(const ChartGrid& a, const ChartGrid& b) {
  if (a.dim != b.dim || a.h != b.h || a.lo != b.lo || a.hi != b.hi)
    throw Error(ErrorKind::DimensionMismatch, "fields live on different grids");
}

}  // namespace detail

// max over interior points of |f_k - J_k^p g_p| and |g_k + J_k^p f_p|
inline double rc_residual(const AlmostComplexField& j, const ScalarField& f, const ScalarField& g) {
  detail::same_grid(j.grid, f.grid);
  detail::same_grid(j.grid, g.grid);
  const ChartGrid& gr = j.grid;
  gr.validate();
  std::size_t m = static_cast<std::size_t>(gr.dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    auto idx = gr.index(i);
    if (!gr.interior(idx)) continue;
    std::vector<double> df(m), dg(m);
    for (std::size_t a = 0; a < m; ++a) {
      df[a] = detail::d1(f, idx, static_cast<int>(a));
      dg[a] = detail::d1(g, idx, static_cast<int>(a));
    }
    const DMat& jj = j.at(idx);
    for (std::size_t k = 0; k < m; ++k) {
      double r1 = df[k], r2 = dg[k];
      for (std::size_t p = 0; p < m; ++p) {
        r1 -= jj[k][p] * dg[p];
        r2 += jj[k][p] * df[p];
      }
      worst = std::max({worst, std::fabs(r1), std::fabs(r2)});
    }
  }
  return worst;
}

struct Coefficients {
  DMat a;
  std::vector<double> b;
};

// a^{pq} = delta + sum_k J_k^p J_k^q,
// b^q = sum_k (J_k^p dJ_k^q/dx_p + dJ_k^p/dx_k J_p^q)
inline Coefficients coefficients_at(const AlmostComplexField& j, const std::vector<int>& idx) {
  const ChartGrid& gr = j.grid;
  if (!gr.interior(idx)) throw Error(ErrorKind::GridTooSmall, "coefficients need an interior point");
  std::size_t m = static_cast<std::size_t>(gr.dim);
  const DMat& jj = j.at(idx);
  Coefficients c{dzeros(m), std::vector<double>(m, 0.0)};
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q) {
      double s = p == q ? 1.0 : 0.0;
      for (std::size_t k = 0; k < m; ++k) s += jj[k][p] * jj[k][q];
      c.a[p][q] = s;
    }
  for (std::size_t q = 0; q < m; ++q) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t p = 0; p < m; ++p)
        s += jj[k][p] * detail::dj(j, idx, static_cast<int>(p), k, q) +
             detail::dj(j, idx, static_cast<int>(k), k, p) * jj[p][q];
    c.b[q] = s;
  }
  return c;
}

struct CoefficientField {
  ChartGrid grid;
  std::vector<bool> defined;
  std::vector<Coefficients> c;
};

inline CoefficientField elliptic_coefficients(const AlmostComplexField& j) {
  j.grid.validate();
  CoefficientField out{j.grid, std::vector<bool>(j.grid.size(), false), std::vector<Coefficients>(j.grid.size())};
  for (std::size_t i = 0; i < j.grid.size(); ++i) {
    auto idx = j.grid.index(i);
    if (!j.grid.interior(idx)) continue;
    out.defined[i] = true;
    out.c[i] = coefficients_at(j, idx);
  }
  return out;
}

// Cholesky pivots; the leading minors are the running products.
inline bool positive_definite(const DMat& a) {
  std::size_t n = a.size();
  DMat l = dzeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      double s = a[i][k];
      for (std::size_t t = 0; t < k; ++t) s -= l[i][t] * l[k][t];
      if (i == k) {
        if (!(s > 0)) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][k] = s / l[k][k];
      }
    }
  return true;
}

struct Ball {
  std::vector<int> center;
  double radius = 0;  // grid units

  bool contains(const std::vector<int>& idx) const {
    double s = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      double d = idx[a] - center[a];
      s += d * d;
    }
    return s <= radius * radius + 1e-12;
  }
};

// Largest radius r (grid units) such that a is positive definite on every
// defined point of the ball of radius r; capped by the defined region.
inline double positive_definite_region(const CoefficientField& f, const std::vector<int>& center) {
  const ChartGrid& g = f.grid;
  if (!g.contains(center) || !f.defined[g.flat(center)] || !positive_definite(f.c[g.flat(center)].a))
    throw Error(ErrorKind::NotPositiveAtCenter, "a is not positive definite at the center");
  double best = 1e300;
  double reach = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.index(i);
    double s = 0;
    for (int a = 0; a < g.dim; ++a) s += double(idx[a] - center[a]) * (idx[a] - center[a]);
    double d = std::sqrt(s);
    if (!f.defined[i]) {
      best = std::min(best, d);
      continue;
    }
    reach = std::max(reach, d);
    if (!positive_definite(f.c[i].a)) best = std::min(best, d);
  }
  // points strictly closer than `best` are all good
  if (best > reach) return reach;
  double r = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.index(i);
    double s = 0;
    for (int a = 0; a < g.dim; ++a) s += double(idx[a] - center[a]) * (idx[a] - center[a]);
    double d = std::sqrt(s);
    if (d < best) r = std::max(r, d);
  }
  return r;
}

struct MaxPrincipleReport {
  double sup_interior = 0, sup_boundary = 0, inf_interior = 0, inf_boundary = 0;
  bool pass = false;
};

// Boundary of a discrete ball: its points with an axis neighbour outside it.
inline MaxPrincipleReport max_principle_check(const ScalarField& f, const Ball& ball, double tol = 1e-9) {
  const ChartGrid& g = f.grid;
  if (static_cast<int>(ball.center.size()) != g.dim) throw Error(ErrorKind::BallOutOfRange, "ball center dimension");
  double si = -1e300, sb = -1e300, ii = 1e300, ib = 1e300;
  bool any_interior = false, any_boundary = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.index(i);
    if (!ball.contains(idx)) continue;
    bool boundary = false;
    for (int a = 0; a < g.dim && !boundary; ++a)
      for (int s : {-1, 1})
        if (!ball.contains(detail::shifted(idx, a, s))) boundary = true;
    double v = f.v[i];
    if (boundary) {
      any_boundary = true;
      sb = std::max(sb, v);
      ib = std::min(ib, v);
    } else {
      any_interior = true;
      si = std::max(si, v);
      ii = std::min(ii, v);
    }
  }
  // the whole closed ball must be sampled
  for (int a = 0; a < g.dim; ++a)
    if (ball.center[a] - ball.radius < g.lo[a] || ball.center[a] + ball.radius > g.hi[a])
      throw Error(ErrorKind::BallOutOfRange, "ball leaves the grid");
  if (!any_interior || !any_boundary) throw Error(ErrorKind::BallOutOfRange, "ball too small");
  MaxPrincipleReport r{si, sb, ii, ib, false};
  r.pass = si <= sb + tol && ii >= ib - tol;
  return r;
}

// max over the ball of |a^{pq} f_pq + b^q f_q|
inline double operator_residual(const AlmostComplexField& j, const ScalarField& f, const Ball& ball) {
  detail::same_grid(j.grid, f.grid);
  const ChartGrid& g = j.grid;
  std::size_t m = static_cast<std::size_t>(g.dim);
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.index(i);
    if (!ball.contains(idx)) continue;
    if (!g.interior(idx)) throw Error(ErrorKind::BallOutOfRange, "ball reaches the grid boundary");
    any = true;
    Coefficients c = coefficients_at(j, idx);
    double s = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = 0; q < m; ++q) s += c.a[p][q] * detail::d2(f, idx, static_cast<int>(p), static_cast<int>(q));
      s += c.b[p] * detail::d1(f, idx, static_cast<int>(p));
    }
    worst = std::max(worst, std::fabs(s));
  }
  if (!any) throw Error(ErrorKind::BallOutOfRange, "ball contains no grid point");
  return worst;
}

// Samples on R^2 with z = x + i y.
struct HolomorphicSample {
  std::string name;
  std::function<std::complex<double>(std::complex<double>)> h;
};

inline std::vector<HolomorphicSample> holomorphic_samples() {
  return {
      {"z^2", [](std::complex<double> z) { return z * z; }},
      {"z^3", [](std::complex<double> z) { return z * z * z; }},
      {"exp(z)", [](std::complex<double> z) { return std::exp(z); }},
  };
}

using PlaneFunction = std::function<double(const std::vector<double>&)>;

// Named functions of (x, y): re_<h>, im_<h> for every holomorphic sample
// (z2, z3, exp), and the non-example bump = 1 - x^2 - y^2.
inline PlaneFunction plane_function(const std::string& name) {
  std::map<std::string, std::function<std::complex<double>(std::complex<double>)>> hs{
      {"z2", [](std::complex<double> z) { return z * z; }},
      {"z3", [](std::complex<double> z) { return z * z * z; }},
      {"exp", [](std::complex<double> z) { return std::exp(z); }}};
  if (name == "bump") return [](const std::vector<double>& p) { return 1 - p[0] * p[0] - p[1] * p[1]; };
  if (name == "x") return [](const std::vector<double>& p) { return p[0]; };
  for (const auto& [key, h] : hs) {
    if (name == "re_" + key) return [h](const std::vector<double>& p) { return h({p[0], p[1]}).real(); };
    if (name == "im_" + key) return [h](const std::vector<double>& p) { return h({p[0], p[1]}).imag(); };
  }
  throw Error(ErrorKind::Parse, "unknown sample '" + name + "'");
}

// (f, g) pairs for rc_residual: z2, z3, exp give (Re h, Im h); the
// non-holomorphic pair is (x, x).
inline std::pair<PlaneFunction, PlaneFunction> plane_pair(const std::string& name) {
  if (name == "nonholomorphic") return {plane_function("x"), plane_function("x")};
  return {plane_function("re_" + name), plane_function("im_" + name)};
}

// A nonlinear chart phi(x, y) = (x + s y^2, y + t x^2) and the pulled back
// structure J = Dphi^{-1} J0 Dphi; (Re, Im) of h o phi is J-holomorphic.
struct WarpedChart {
  double s = 0.2, t = 0.1;

  std::array<double, 2> phi(double x, double y) const { return {x + s * y * y, y + t * x * x}; }

  DMat j(const std::vector<double>& p) const {
    double x = p[0], y = p[1];
    double a = 1, b = 2 * s * y, c = 2 * t * x, d = 1;  // Dphi = [[a, b], [c, d]]
    double det = a * d - b * c;
    // M = Dphi^{-1} J0 Dphi with J0 = [[0, -1], [1, 0]] acting on columns
    double i00 = d / det, i01 = -b / det, i10 = -c / det, i11 = a / det;
    double j00 = -c, j01 = -d, j10 = a, j11 = b;  // J0 * Dphi
    double m00 = i00 * j00 + i01 * j10, m01 = i00 * j01 + i01 * j11;
    double m10 = i10 * j00 + i11 * j10, m11 = i10 * j01 + i11 * j11;
    // J[k][p] = M[p][k]
    return {{m00, m10}, {m01, m11}};
  }
};

}  // namespace twistcart
