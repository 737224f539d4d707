#pragma once

// Exact scalar arithmetic for reduced-walk amplitudes. Every amplitude that
// appears in the reduced walk lives in the ring (a + b*sqrt(2)) / 3^e with
// integer a, b; the exponent e always equals the number of walk steps applied,
// so addition never has to renormalise. No gcd reduction is ever performed.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace weldedwalk {

using BigInt = boost::multiprecision::cpp_int;

struct ExactAmplitude {
  BigInt a;             // rational numerator
  BigInt b;             // sqrt(2) numerator
  std::uint32_t e = 0;  // power-of-3 denominator exponent

  ExactAmplitude() = default;
  ExactAmplitude(BigInt a_, BigInt b_, std::uint32_t e_)
      : a(std::move(a_)), b(std::move(b_)), e(e_) {}

  bool operator==(const ExactAmplitude& o) const {
    return a == o.a && b == o.b && e == o.e;
  }
  bool is_zero() const { return a == 0 && b == 0; }
};

// The only scalars that ever multiply an amplitude: entries of the reduced
// coin matrix (the shift matrix is a permutation).
enum class EntryToken {
  Zero,
  PlusOne,
  PlusOneThird,
  MinusOneThird,
  TwoSqrt2Third,
};

inline ExactAmplitude exact_add(const ExactAmplitude& x, const ExactAmplitude& y) {
  if (x.e != y.e) {
    throw std::invalid_argument("exact_add: exponent mismatch (" +
                                std::to_string(x.e) + " vs " + std::to_string(y.e) + ")");
  }
  return ExactAmplitude(x.a + y.a, x.b + y.b, x.e);
}

// Multiplication by 2*sqrt(2)/3 maps (a, b) to (4b, 2a): sqrt(2)*sqrt(2) = 2.
// Tokens with denominator 3 raise e by one; multiplication by +-1 keeps e and
// is only legal where the caller raises e uniformly across a state vector.
inline ExactAmplitude exact_mul_entry(const ExactAmplitude& x, EntryToken m) {
  switch (m) {
    case EntryToken::Zero:
      return ExactAmplitude(0, 0, x.e);
    case EntryToken::PlusOne:
      return x;
    case EntryToken::PlusOneThird:
      return ExactAmplitude(x.a, x.b, x.e + 1);
    case EntryToken::MinusOneThird:
      return ExactAmplitude(-x.a, -x.b, x.e + 1);
    case EntryToken::TwoSqrt2Third:
      return ExactAmplitude(4 * x.b, 2 * x.a, x.e + 1);
  }
  throw std::invalid_argument("exact_mul_entry: unsupported token");
}

namespace detail {

inline BigInt pow3(std::uint32_t e) {
  BigInt r = 1;
  BigInt base = 3;
  std::uint32_t k = e;
  while (k) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

inline unsigned bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(v))) + 1;
}

}  // namespace detail

// Best-effort conversion of (a + b*sqrt(2))/3^e to binary64. sqrt(2) is
// evaluated with F fractional bits; the floor error on the b-term is < |b|,
// so F grows until that error sits at least 80 bits below the numerator.
// The final rounding keeps >= 64 significant bits before conversion.
inline double to_float(const ExactAmplitude& x) {
  using boost::multiprecision::abs;
  if (x.is_zero()) return 0.0;

  unsigned F = 128;
  BigInt num;
  const unsigned b_bits = detail::bit_length(x.b);
  for (;;) {
    BigInt s2 = sqrt(BigInt(2) << (2 * F));  // floor(sqrt(2) * 2^F)
    num = (x.a << F) + x.b * s2;
    if (x.b == 0) break;
    if (num != 0 && detail::bit_length(num) >= b_bits + 80) break;
    F *= 2;  // terminates: |num| grows ~2^F while the error bound stays |b|
  }

  const BigInt den = detail::pow3(x.e) << F;
  const bool neg = num < 0;
  const BigInt un = abs(num);
  const long num_bits = static_cast<long>(detail::bit_length(un));
  const long den_bits = static_cast<long>(detail::bit_length(den));
  if (num_bits - den_bits > 1100) return neg ? -HUGE_VAL : HUGE_VAL;

  const long shift = 64 + std::max(0L, den_bits - num_bits);
  const BigInt q = (un << shift) / den;
  const double d = q.convert_to<double>();
  const double r = std::ldexp(d, -static_cast<int>(shift));
  return neg ? -r : r;
}

// Integer-factor fingerprint of an amplitude whose numerator is supported on
// exactly one of the two components: |numerator| = 2^two_exponent * odd_part.
struct FactorFingerprint {
  std::uint64_t two_exponent = 0;
  BigInt odd_part;
  std::uint32_t three_exponent_denominator = 0;
  bool has_sqrt2_factor = false;

  bool operator==(const FactorFingerprint& o) const {
    return two_exponent == o.two_exponent && odd_part == o.odd_part &&
           three_exponent_denominator == o.three_exponent_denominator &&
           has_sqrt2_factor == o.has_sqrt2_factor;
  }
};

inline FactorFingerprint fingerprint(const ExactAmplitude& x) {
  using boost::multiprecision::abs;
  if (x.a != 0 && x.b != 0) {
    throw std::domain_error("fingerprint: mixed amplitude (both components nonzero)");
  }
  if (x.is_zero()) {
    throw std::domain_error("fingerprint: zero amplitude has no factorisation");
  }
  FactorFingerprint f;
  f.has_sqrt2_factor = (x.b != 0);
  f.three_exponent_denominator = x.e;
  BigInt v = abs(f.has_sqrt2_factor ? x.b : x.a);
  f.two_exponent = boost::multiprecision::lsb(v);
  f.odd_part = v >> f.two_exponent;
  return f;
}

inline std::string to_string(const ExactAmplitude& x) {
  std::ostringstream os;
  os << "a=" << x.a << " b=" << x.b << " e=" << x.e;
  return os.str();
}

inline std::string to_string(const FactorFingerprint& f) {
  std::ostringstream os;
  os << "2^" << f.two_exponent << " * " << f.odd_part;
  if (f.has_sqrt2_factor) os << " * sqrt2";
  os << " / 3^" << f.three_exponent_denominator;
  return os.str();
}

}  // namespace weldedwalk
