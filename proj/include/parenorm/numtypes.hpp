#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace parenorm {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using Cplx = std::complex<double>;

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const BigRat& v) { return v.convert_to<double>(); }

inline BigInt rat_num(const BigRat& v) { return boost::multiprecision::numerator(v); }
inline BigInt rat_den(const BigRat& v) { return boost::multiprecision::denominator(v); }

// cpp_rational's (num, den) constructor rejects negative denominators.
inline BigRat make_rat(BigInt num, BigInt den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    return BigRat(num, den);
}

// Rationals travel as "p/q" (or a bare integer) in CLI flags and JSON.
BigRat parse_rational(const std::string& text);
std::string format_rational(const BigRat& v);

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

// e^{2 pi i t} with the argument reduced mod 1 before trig, so exact
// rationals like p/q hit roots of unity to full precision.
Cplx unit_exp(double t);
Cplx unit_exp(const BigRat& t);

}  // namespace parenorm
