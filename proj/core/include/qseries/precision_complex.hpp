#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <utility>

namespace qseries {

/// Arbitrary-precision real scalar. Precision travels with the value:
/// binary operations produce a result at the larger operand precision.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline constexpr unsigned kMinDigits = 15;

Real make_real(const std::string& decimal, unsigned digits);
Real make_real(long value, unsigned digits);

/// Complex value carried at a configurable decimal working precision.
/// Immutable in spirit: all operations return new values.
class PrecisionComplex {
 public:
  PrecisionComplex() : PrecisionComplex(0, 0, kMinDigits) {}
  PrecisionComplex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {
    align_();
  }
  PrecisionComplex(long re, long im, unsigned digits);
  PrecisionComplex(const std::string& re, const std::string& im, unsigned digits);

  const Real& real() const { return re_; }
  const Real& imag() const { return im_; }
  unsigned digits() const { return static_cast<unsigned>(re_.precision()); }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

  /// Copy rounded to (or extended to) the given decimal precision.
  PrecisionComplex at_digits(unsigned digits) const;

  PrecisionComplex operator-() const { return {-re_, -im_}; }

  friend PrecisionComplex operator+(const PrecisionComplex& a, const PrecisionComplex& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
  }
  friend PrecisionComplex operator-(const PrecisionComplex& a, const PrecisionComplex& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
  }
  friend PrecisionComplex operator*(const PrecisionComplex& a, const PrecisionComplex& b) {
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend PrecisionComplex operator/(const PrecisionComplex& a, const PrecisionComplex& b);

  PrecisionComplex& operator+=(const PrecisionComplex& o) { return *this = *this + o; }
  PrecisionComplex& operator-=(const PrecisionComplex& o) { return *this = *this - o; }
  PrecisionComplex& operator*=(const PrecisionComplex& o) { return *this = *this * o; }
  PrecisionComplex& operator/=(const PrecisionComplex& o) { return *this = *this / o; }

  friend bool operator==(const PrecisionComplex& a, const PrecisionComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::string str() const;

 private:
  void align_();
  Real re_, im_;
};

Real abs(const PrecisionComplex& z);
Real norm(const PrecisionComplex& z);
PrecisionComplex conj(const PrecisionComplex& z);
PrecisionComplex exp(const PrecisionComplex& z);
/// Principal branch.
PrecisionComplex log(const PrecisionComplex& z);
/// Principal square root.
PrecisionComplex sqrt(const PrecisionComplex& z);
PrecisionComplex pow(const PrecisionComplex& base, long n);
/// exp(e * log b) with the principal logarithm.
PrecisionComplex pow(const PrecisionComplex& base, const PrecisionComplex& e);
/// Principal n-th root, exp(log(z)/n).
PrecisionComplex root(const PrecisionComplex& z, unsigned degree);
PrecisionComplex polar(const Real& modulus, const Real& phase);

PrecisionComplex make_complex(long re, long im, unsigned digits);
PrecisionComplex imaginary_unit(unsigned digits);
/// exp(2*pi*i/3), the primitive third root of unity.
PrecisionComplex omega(unsigned digits);
PrecisionComplex pi_value(unsigned digits);

}  // namespace qseries
