#pragma once

// Exact sparse linear algebra over Rational and Gaussian scalars.
// Echelon forms use the leftmost pivot; canonical output is the reduced
// row echelon form, so results do not depend on insertion order.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <tuple>
#include <utility>
#include <vector>

#include "twistcart/error.hpp"
#include "twistcart/rational.hpp"

namespace twistcart {

template <class F>
struct SparseVector {
  std::vector<std::pair<std::size_t, F>> entries;  // sorted, nonzero

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  std::size_t lead() const { return entries.front().first; }
  const F& lead_coef() const { return entries.front().second; }

  F get(std::size_t i) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), i,
                               [](const auto& e, std::size_t k) { return e.first < k; });
    if (it != entries.end() && it->first == i) return it->second;
    return F(0);
  }

  static SparseVector unit(std::size_t i) {
    SparseVector v;
    v.entries.emplace_back(i, F(1));
    return v;
  }

  static SparseVector from_map(const std::map<std::size_t, F>& m) {
    SparseVector v;
    for (const auto& [i, x] : m)
      if (!is_zero(x)) v.entries.emplace_back(i, x);
    return v;
  }

  static SparseVector from_dense(const std::vector<F>& d) {
    SparseVector v;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!is_zero(d[i])) v.entries.emplace_back(i, d[i]);
    return v;
  }

  std::vector<F> to_dense(std::size_t n) const {
    std::vector<F> d(n, F(0));
    for (const auto& [i, x] : entries) d.at(i) = x;
    return d;
  }

  friend bool operator==(const SparseVector& a, const SparseVector& b) { return a.entries == b.entries; }
  friend bool operator!=(const SparseVector& a, const SparseVector& b) { return !(a == b); }
};

// a + s*b
template <class F>
SparseVector<F> axpy(const SparseVector<F>& a, const F& s, const SparseVector<F>& b) {
  SparseVector<F> r;
  r.entries.reserve(a.size() + b.size());
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() || j != b.entries.end()) {
    if (j == b.entries.end() || (i != a.entries.end() && i->first < j->first)) {
      r.entries.push_back(*i++);
    } else if (i == a.entries.end() || j->first < i->first) {
      F x = s * j->second;
      if (!is_zero(x)) r.entries.emplace_back(j->first, x);
      ++j;
    } else {
      F x = i->second + s * j->second;
      if (!is_zero(x)) r.entries.emplace_back(i->first, x);
      ++i;
      ++j;
    }
  }
  return r;
}

template <class F>
SparseVector<F> operator+(const SparseVector<F>& a, const SparseVector<F>& b) { return axpy(a, F(1), b); }
template <class F>
SparseVector<F> operator-(const SparseVector<F>& a, const SparseVector<F>& b) { return axpy(a, F(-1), b); }

template <class F>
SparseVector<F> scale(const SparseVector<F>& a, const F& s) {
  SparseVector<F> r;
  if (is_zero(s)) return r;
  r.entries.reserve(a.size());
  for (const auto& [i, x] : a.entries) r.entries.emplace_back(i, x * s);
  return r;
}

// Relabel coordinates: new index of i is perm[i].
template <class F>
SparseVector<F> permute(const SparseVector<F>& a, const std::vector<std::size_t>& perm) {
  SparseVector<F> r;
  r.entries.reserve(a.size());
  for (const auto& [i, x] : a.entries) r.entries.emplace_back(perm.at(i), x);
  std::sort(r.entries.begin(), r.entries.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });
  return r;
}

// Keep only coordinates with keep[i] true.
template <class F>
SparseVector<F> restrict_to(const SparseVector<F>& a, const std::vector<bool>& keep) {
  SparseVector<F> r;
  for (const auto& e : a.entries)
    if (keep.at(e.first)) r.entries.push_back(e);
  return r;
}

template <class F>
bool supported_in(const SparseVector<F>& a, const std::vector<bool>& keep) {
  for (const auto& e : a.entries)
    if (!keep.at(e.first)) return false;
  return true;
}

// Column-stored sparse matrix.
template <class F>
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), col_(cols) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.col_[i] = SparseVector<F>::unit(i);
    return m;
  }

  static SparseMatrix from_dense(const std::vector<std::vector<F>>& rows) {
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    SparseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw Error(ErrorKind::DimensionMismatch, "ragged matrix");
      for (std::size_t j = 0; j < c; ++j)
        if (!is_zero(rows[i][j])) m.col_[j].entries.emplace_back(i, rows[i][j]);
    }
    return m;
  }

  // Duplicate (row, col) pairs are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    const std::vector<std::tuple<std::size_t, std::size_t, F>>& t) {
    std::vector<std::map<std::size_t, F>> acc(cols);
    for (const auto& [r, c, x] : t) {
      if (r >= rows || c >= cols) throw Error(ErrorKind::DimensionMismatch, "triplet out of range");
      acc[c][r] += x;
    }
    SparseMatrix m(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) m.col_[j] = SparseVector<F>::from_map(acc[j]);
    return m;
  }

  static SparseMatrix from_columns(std::size_t rows, std::vector<SparseVector<F>> cols) {
    SparseMatrix m(rows, cols.size());
    m.col_ = std::move(cols);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const SparseVector<F>& column(std::size_t j) const { return col_.at(j); }
  void set_column(std::size_t j, SparseVector<F> v) { col_.at(j) = std::move(v); }
  const std::vector<SparseVector<F>>& columns() const { return col_; }

  F at(std::size_t i, std::size_t j) const { return col_.at(j).get(i); }

  bool is_zero_matrix() const {
    for (const auto& c : col_)
      if (!c.empty()) return false;
    return true;
  }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : col_) n += c.size();
    return n;
  }

  SparseVector<F> apply(const SparseVector<F>& v) const {
    std::map<std::size_t, F> acc;
    for (const auto& [j, x] : v.entries)
      for (const auto& [i, y] : col_.at(j).entries) acc[i] += x * y;
    return SparseVector<F>::from_map(acc);
  }

  // Row-major (row, col, value) list, sorted.
  std::vector<std::tuple<std::size_t, std::size_t, F>> triplets() const {
    std::vector<std::tuple<std::size_t, std::size_t, F>> t;
    for (std::size_t j = 0; j < cols_; ++j)
      for (const auto& [i, x] : col_[j].entries) t.emplace_back(i, j, x);
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    return t;
  }

  SparseMatrix transpose() const {
    std::vector<std::tuple<std::size_t, std::size_t, F>> t;
    for (std::size_t j = 0; j < cols_; ++j)
      for (const auto& [i, x] : col_[j].entries) t.emplace_back(j, i, x);
    return from_triplets(cols_, rows_, t);
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product shapes");
    SparseMatrix m(a.rows_, b.cols_);
    for (std::size_t j = 0; j < b.cols_; ++j) m.col_[j] = a.apply(b.col_[j]);
    return m;
  }

  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix sum shapes");
    SparseMatrix m(a.rows_, a.cols_);
    for (std::size_t j = 0; j < a.cols_; ++j) m.col_[j] = a.col_[j] + b.col_[j];
    return m;
  }

  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix difference shapes");
    SparseMatrix m(a.rows_, a.cols_);
    for (std::size_t j = 0; j < a.cols_; ++j) m.col_[j] = a.col_[j] - b.col_[j];
    return m;
  }

  SparseMatrix scaled(const F& s) const {
    SparseMatrix m(rows_, cols_);
    for (std::size_t j = 0; j < cols_; ++j) m.col_[j] = scale(col_[j], s);
    return m;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.col_ == b.col_;
  }
  friend bool operator!=(const SparseMatrix& a, const SparseMatrix& b) { return !(a == b); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<SparseVector<F>> col_;
};

// Incremental echelon basis over a field. Rows are keyed by their leading
// column; reduce() only clears leading entries, which decides membership.
template <class F>
class Echelon {
 public:
  // Returns true when v was independent of the rows already present.
  bool insert(SparseVector<F> v) {
    v = reduce(std::move(v));
    if (v.empty()) return false;
    F inv = F(1) / v.lead_coef();
    v = scale(v, inv);
    rows_.emplace(v.lead(), std::move(v));
    return true;
  }

  SparseVector<F> reduce(SparseVector<F> v) const {
    while (!v.empty()) {
      auto it = rows_.find(v.lead());
      if (it == rows_.end()) break;
      v = axpy(v, F(-v.lead_coef()), it->second);
    }
    return v;
  }

  bool contains(const SparseVector<F>& v) const { return reduce(v).empty(); }
  std::size_t dim() const { return rows_.size(); }

  std::vector<SparseVector<F>> rows() const {
    std::vector<SparseVector<F>> r;
    for (const auto& [k, v] : rows_) r.push_back(v);
    return r;
  }

 private:
  std::map<std::size_t, SparseVector<F>> rows_;
};

// Fraction-free variant: rows are kept as primitive integer vectors and
// combined by cross multiplication, so no rational arithmetic happens
// during elimination.
template <>
class Echelon<Rational> {
  using IntRow = std::vector<std::pair<std::size_t, Integer>>;

 public:
  bool insert(const SparseVector<Rational>& v) {
    IntRow r = reduce_int(to_int(v));
    if (r.empty()) return false;
    std::size_t lead = r.front().first;
    rows_.emplace(lead, std::move(r));
    return true;
  }

  SparseVector<Rational> reduce(const SparseVector<Rational>& v) const {
    IntRow r = reduce_int(to_int(v));
    SparseVector<Rational> out;
    for (auto& [i, x] : r) out.entries.emplace_back(i, Rational(x));
    return out;
  }

  bool contains(const SparseVector<Rational>& v) const { return reduce_int(to_int(v)).empty(); }
  std::size_t dim() const { return rows_.size(); }

  std::vector<SparseVector<Rational>> rows() const {
    std::vector<SparseVector<Rational>> out;
    for (const auto& [k, r] : rows_) {
      SparseVector<Rational> v;
      Rational lead(r.front().second);
      for (const auto& [i, x] : r) v.entries.emplace_back(i, Rational(x) / lead);
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  static void make_primitive(IntRow& r) {
    if (r.empty()) return;
    Integer g = 0;
    for (const auto& e : r) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
      if (g == 1) break;
    }
    if (r.front().second < 0) g = -g;
    if (g != 1)
      for (auto& e : r) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  }

  static IntRow to_int(const SparseVector<Rational>& v) {
    Integer l = 1;
    for (const auto& e : v.entries) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.second.get_den_mpz_t());
    IntRow r;
    r.reserve(v.size());
    for (const auto& [i, x] : v.entries) r.emplace_back(i, Integer(x.get_num() * (l / x.get_den())));
    make_primitive(r);
    return r;
  }

  // a*v - c*p with a = lead(p), c = lead(v), after removing gcd(a, c).
  static IntRow combine(const IntRow& v, const IntRow& p) {
    Integer a = p.front().second, c = v.front().second, g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), c.get_mpz_t());
    a /= g;
    c /= g;
    IntRow r;
    r.reserve(v.size() + p.size());
    auto i = v.begin() + 1;
    auto j = p.begin() + 1;
    while (i != v.end() || j != p.end()) {
      if (j == p.end() || (i != v.end() && i->first < j->first)) {
        r.emplace_back(i->first, Integer(a * i->second));
        ++i;
      } else if (i == v.end() || j->first < i->first) {
        r.emplace_back(j->first, Integer(-c * j->second));
        ++j;
      } else {
        Integer x = a * i->second - c * j->second;
        if (x != 0) r.emplace_back(i->first, std::move(x));
        ++i;
        ++j;
      }
    }
    make_primitive(r);
    return r;
  }

  IntRow reduce_int(IntRow r) const {
    while (!r.empty()) {
      auto it = rows_.find(r.front().first);
      if (it == rows_.end()) break;
      r = combine(r, it->second);
    }
    return r;
  }

  std::map<std::size_t, IntRow> rows_;
};

// Reduced row echelon form of the span of the given rows.
template <class F>
std::vector<SparseVector<F>> rref(const std::vector<SparseVector<F>>& vectors) {
  Echelon<F> e;
  for (const auto& v : vectors) e.insert(v);
  std::vector<SparseVector<F>> rows = e.rows();  // ascending leads, lead 1
  for (std::size_t k = rows.size(); k-- > 0;) {
    std::size_t c = rows[k].lead();
    for (std::size_t i = 0; i < k; ++i) {
      F x = rows[i].get(c);
      if (!is_zero(x)) rows[i] = axpy(rows[i], F(-x), rows[k]);
    }
  }
  return rows;
}

template <class F>
struct Subspace {
  std::size_t ambient = 0;
  std::vector<SparseVector<F>> basis;  // reduced row echelon form

  std::size_t dim() const { return basis.size(); }
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient == b.ambient && a.basis == b.basis;
  }
};

template <class F>
Subspace<F> span(std::size_t ambient, const std::vector<SparseVector<F>>& vectors) {
  return Subspace<F>{ambient, rref(vectors)};
}

template <class F>
bool contains(const Subspace<F>& s, const SparseVector<F>& v) {
  Echelon<F> e;
  for (const auto& b : s.basis) e.insert(b);
  return e.contains(v);
}

template <class F>
bool is_subspace_of(const Subspace<F>& a, const Subspace<F>& b) {
  Echelon<F> e;
  for (const auto& v : b.basis) e.insert(v);
  for (const auto& v : a.basis)
    if (!e.contains(v)) return false;
  return true;
}

template <class F>
std::size_t rank_of(const std::vector<SparseVector<F>>& vectors) {
  Echelon<F> e;
  for (const auto& v : vectors) e.insert(v);
  return e.dim();
}

template <class F>
std::size_t rank(const SparseMatrix<F>& m) {
  return rank_of(m.columns());
}

// Basis of {c : sum_j c_j images[j] = 0}. images live in coordinates
// [0, dim); the identity block is appended after them so that echelon rows
// with a lead past dim carry a relation and nothing else.
template <class F>
std::vector<SparseVector<F>> relations(const std::vector<SparseVector<F>>& images, std::size_t dim) {
  Echelon<F> e;
  for (std::size_t j = 0; j < images.size(); ++j) {
    SparseVector<F> v = images[j];
    v.entries.emplace_back(dim + j, F(1));
    e.insert(std::move(v));
  }
  std::vector<SparseVector<F>> out;
  for (const auto& r : e.rows()) {
    if (r.lead() < dim) continue;
    SparseVector<F> c;
    for (const auto& [i, x] : r.entries) c.entries.emplace_back(i - dim, x);
    out.push_back(std::move(c));
  }
  return out;
}

// sum_j c_j vectors[j]
template <class F>
SparseVector<F> combination(const SparseVector<F>& c, const std::vector<SparseVector<F>>& vectors) {
  std::map<std::size_t, F> acc;
  for (const auto& [j, x] : c.entries)
    for (const auto& [i, y] : vectors.at(j).entries) acc[i] += x * y;
  return SparseVector<F>::from_map(acc);
}

template <class F>
Subspace<F> kernel_basis(const SparseMatrix<F>& m) {
  std::vector<SparseVector<F>> rel = relations(m.columns(), m.rows());
  return span(m.cols(), rel);
}

template <class F>
Subspace<F> image_basis(const SparseMatrix<F>& m) {
  return span(m.rows(), m.columns());
}

template <class F>
struct QuotientResult {
  std::size_t dim = 0;
  std::vector<SparseVector<F>> representatives;  // extend sub's basis to sup's
};

template <class F>
QuotientResult<F> quotient_dim(const Subspace<F>& sub, const Subspace<F>& sup) {
  if (sub.ambient != sup.ambient) throw Error(ErrorKind::DimensionMismatch, "ambient dimensions differ");
  Echelon<F> big;
  for (const auto& v : sup.basis) big.insert(v);
  for (const auto& v : sub.basis)
    if (!big.contains(v)) throw Error(ErrorKind::NotContained, "sub is not contained in sup");
  Echelon<F> e;
  for (const auto& v : sub.basis) e.insert(v);
  QuotientResult<F> q;
  for (const auto& v : sup.basis)
    if (e.insert(v)) q.representatives.push_back(v);
  q.dim = q.representatives.size();
  return q;
}

// {x in span(vectors) : x supported in keep}
template <class F>
std::vector<SparseVector<F>> intersect_coordinates(const std::vector<SparseVector<F>>& vectors,
                                                   const std::vector<bool>& keep) {
  std::vector<bool> drop(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) drop[i] = !keep[i];
  std::vector<SparseVector<F>> images;
  images.reserve(vectors.size());
  for (const auto& v : vectors) images.push_back(restrict_to(v, drop));
  std::vector<SparseVector<F>> out;
  for (const auto& c : relations(images, keep.size())) out.push_back(combination(c, vectors));
  return out;
}

// span(a) intersect span(b)
template <class F>
std::vector<SparseVector<F>> intersect(const std::vector<SparseVector<F>>& a, const std::vector<SparseVector<F>>& b,
                                       std::size_t ambient) {
  std::vector<SparseVector<F>> images = a;
  for (const auto& v : b) images.push_back(scale(v, F(-1)));
  Echelon<F> e;
  std::vector<SparseVector<F>> out;
  for (const auto& c : relations(images, ambient)) {
    SparseVector<F> ca;
    for (const auto& [i, x] : c.entries)
      if (i < a.size()) ca.entries.emplace_back(i, x);
    SparseVector<F> v = combination(ca, a);
    if (e.insert(v)) out.push_back(v);
  }
  return out;
}

}  // namespace twistcart
