#pragma once

#include <boost/rational.hpp>

#include <complex>
#include <string>

namespace ddc {

using Rational = boost::rational<long long>;

// Exact complex rational a + i b.
struct CRational {
  Rational re{0};
  Rational im{0};

  CRational() = default;
  CRational(Rational r) : re(r) {}
  CRational(long long r) : re(r) {}
  CRational(Rational r, Rational i) : re(r), im(i) {}

  static CRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re.numerator() == 0 && im.numerator() == 0; }
  CRational conj() const { return {re, -im}; }
  std::complex<double> value() const {
    return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)};
  }

  CRational& operator+=(const CRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRational& operator-=(const CRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  CRational& operator*=(const CRational& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  CRational& operator/=(const CRational& o) {
    Rational n = o.re * o.re + o.im * o.im;
    *this *= o.conj();
    re /= n;
    im /= n;
    return *this;
  }
  friend CRational operator+(CRational a, const CRational& b) { return a += b; }
  friend CRational operator-(CRational a, const CRational& b) { return a -= b; }
  friend CRational operator*(CRational a, const CRational& b) { return a *= b; }
  friend CRational operator/(CRational a, const CRational& b) { return a /= b; }
  friend CRational operator-(const CRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const CRational& a, const CRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

std::string to_string(const Rational& r);
std::string to_string(const CRational& c);

}  // namespace ddc
