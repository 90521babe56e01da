#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace billiards {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using Real = boost::multiprecision::mpfr_float;

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
inline constexpr bool is_scalar_v =
    std::is_same_v<T, Rational> || std::is_same_v<T, Real> || std::is_same_v<T, double>;

// Mantissa bits for Real values created afterwards. Process-wide; set it before fanning out work.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

// RAII guard that restores the previous precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits) : saved_(precision_bits()) { set_precision_bits(bits); }
  ~PrecisionScope() { set_precision_bits(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline double to_double(double x) { return x; }
inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

template <class T>
T from_double(double x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return T(x);
  }
}

template <class T>
T scalar_abs(const T& x) {
  return x < 0 ? T(-x) : x;
}

// Machine epsilon of the scalar at the current precision; zero for rationals.
template <class T>
T scalar_epsilon() {
  if constexpr (std::is_same_v<T, double>) {
    return std::numeric_limits<double>::epsilon();
  } else if constexpr (std::is_same_v<T, Real>) {
    return boost::multiprecision::ldexp(Real(1), -static_cast<int>(precision_bits()));
  } else {
    return T(0);
  }
}

std::optional<Rational> exact_sqrt(const Rational& x);

// Square root that stays exact for rationals (throws when irrational).
template <class T>
T scalar_sqrt(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) {
    auto r = exact_sqrt(x);
    if (!r) throw DomainError("square root of " + x.str() + " is not rational");
    return *r;
  } else {
    using std::sqrt;
    return T(sqrt(x));
  }
}

std::string to_string(const Rational& x);
std::string to_string(const Real& x);
std::string to_string(double x);

}  // namespace billiards
