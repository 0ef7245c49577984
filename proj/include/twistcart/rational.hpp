#pragma once

#include <gmpxx.h>

#include <string>

#include "twistcart/error.hpp"

namespace twistcart {

// GMP keeps mpq_class canonical: lowest terms, positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0)
    throw Error(ErrorKind::Parse, "not a rational: '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::Parse, "zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

struct Gaussian {
  Rational re, im;

  Gaussian() = default;
  Gaussian(const Rational& r) : re(r) {}
  Gaussian(int r) : re(r) {}
  Gaussian(const Rational& r, const Rational& i) : re(r), im(i) {}

  static Gaussian i() { return Gaussian(0, 1); }

  Gaussian conj() const { return Gaussian(re, -im); }
  Rational norm() const { return re * re + im * im; }

  Gaussian& operator+=(const Gaussian& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Gaussian& operator-=(const Gaussian& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Gaussian& operator*=(const Gaussian& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Gaussian& operator/=(const Gaussian& o) {
    Rational n = o.norm();
    if (sgn(n) == 0) throw std::domain_error("division by zero");
    *this *= o.conj();
    re /= n;
    im /= n;
    return *this;
  }
  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  Gaussian operator-() const { return Gaussian(-re, -im); }
  friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Gaussian& a, const Gaussian& b) { return !(a == b); }
};

inline bool is_zero(const Gaussian& z) { return sgn(z.re) == 0 && sgn(z.im) == 0; }

inline Rational conj(const Rational& q) { return q; }
inline Gaussian conj(const Gaussian& z) { return z.conj(); }

}  // namespace twistcart
