#include "qseries/precision_complex.hpp"

#include "qseries/errors.hpp"

#include <algorithm>

namespace qseries {

Real make_real(const std::string& decimal, unsigned digits) {
  Real r(0, std::max(digits, kMinDigits));
  Real tmp(decimal, std::max(digits, kMinDigits));
  r = tmp;
  r.precision(std::max(digits, kMinDigits));
  return r;
}

Real make_real(long value, unsigned digits) {
  Real r(0, std::max(digits, kMinDigits));
  r = value;
  r.precision(std::max(digits, kMinDigits));
  return r;
}

void PrecisionComplex::align_() {
  auto p = std::max({re_.precision(), im_.precision(), static_cast<unsigned>(kMinDigits)});
  re_.precision(p);
  im_.precision(p);
}

PrecisionComplex::PrecisionComplex(long re, long im, unsigned digits)
    : re_(make_real(re, digits)), im_(make_real(im, digits)) {}

PrecisionComplex::PrecisionComplex(const std::string& re, const std::string& im, unsigned digits)
    : re_(make_real(re, digits)), im_(make_real(im, digits)) {}

PrecisionComplex PrecisionComplex::at_digits(unsigned digits) const {
  Real r = re_, i = im_;
  r.precision(std::max(digits, kMinDigits));
  i.precision(std::max(digits, kMinDigits));
  return {std::move(r), std::move(i)};
}

PrecisionComplex operator/(const PrecisionComplex& a, const PrecisionComplex& b) {
  Real d = b.re_ * b.re_ + b.im_ * b.im_;
  if (d.is_zero()) throw PoleError("complex division by zero");
  return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
}

std::string PrecisionComplex::str() const {
  return re_.str() + (im_.sign() < 0 ? "" : "+") + im_.str() + "i";
}

Real abs(const PrecisionComplex& z) {
  using boost::multiprecision::hypot;
  return hypot(z.real(), z.imag());
}

Real norm(const PrecisionComplex& z) { return z.real() * z.real() + z.imag() * z.imag(); }

PrecisionComplex conj(const PrecisionComplex& z) { return {z.real(), -z.imag()}; }

PrecisionComplex exp(const PrecisionComplex& z) {
  using boost::multiprecision::cos;
  using boost::multiprecision::exp;
  using boost::multiprecision::sin;
  Real m = exp(z.real());
  return {m * cos(z.imag()), m * sin(z.imag())};
}

PrecisionComplex log(const PrecisionComplex& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::log;
  if (z.is_zero()) throw PoleError("log of zero");
  return {log(abs(z)), atan2(z.imag(), z.real())};
}

PrecisionComplex sqrt(const PrecisionComplex& z) {
  if (z.is_zero()) return z;
  return exp(log(z) * PrecisionComplex(make_real("0.5", z.digits()), make_real(0, z.digits())));
}

PrecisionComplex pow(const PrecisionComplex& base, long n) {
  unsigned digs = base.digits();
  PrecisionComplex result(1, 0, digs);
  if (n == 0) return result;
  PrecisionComplex b = base;
  unsigned long m = n < 0 ? static_cast<unsigned long>(-(n + 1)) + 1ul : static_cast<unsigned long>(n);
  while (m) {
    if (m & 1ul) result *= b;
    b *= b;
    m >>= 1;
  }
  if (n < 0) return PrecisionComplex(1, 0, digs) / result;
  return result;
}

PrecisionComplex pow(const PrecisionComplex& base, const PrecisionComplex& e) {
  if (base.is_zero()) {
    if (e.is_zero()) return PrecisionComplex(1, 0, base.digits());
    return PrecisionComplex(0, 0, base.digits());
  }
  return exp(log(base) * e);
}

PrecisionComplex root(const PrecisionComplex& z, unsigned degree) {
  if (degree == 0) throw DomainError("zeroth root");
  if (z.is_zero()) return z;
  PrecisionComplex lg = log(z);
  Real d = make_real(static_cast<long>(degree), z.digits());
  return exp(PrecisionComplex(lg.real() / d, lg.imag() / d));
}

PrecisionComplex polar(const Real& modulus, const Real& phase) {
  using boost::multiprecision::cos;
  using boost::multiprecision::sin;
  return {modulus * cos(phase), modulus * sin(phase)};
}

PrecisionComplex make_complex(long re, long im, unsigned digits) {
  return PrecisionComplex(re, im, digits);
}

PrecisionComplex imaginary_unit(unsigned digits) { return PrecisionComplex(0, 1, digits); }

PrecisionComplex pi_value(unsigned digits) {
  Real p(0, std::max(digits, kMinDigits));
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return {p, make_real(0, digits)};
}

PrecisionComplex omega(unsigned digits) {
  unsigned work = std::max(digits, kMinDigits) + 10;
  Real pi(0, work);
  mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
  Real phase = 2 * pi / 3;
  PrecisionComplex w = polar(make_real(1, work), phase);
  return w.at_digits(std::max(digits, kMinDigits));
}

}  // namespace qseries
