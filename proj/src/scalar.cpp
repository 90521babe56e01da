#include "billiards/scalar.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace billiards {

namespace {
// The MPFR backend keeps one process-wide default, so this is global too.
std::atomic<unsigned> g_bits{128};

unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits < 24) throw DomainError("precision below 24 bits");
  g_bits = bits;
  Real::default_precision(bits_to_digits10(bits));
}

unsigned precision_bits() { return g_bits; }

namespace {
// Applies the default precision once at load time.
struct PrecisionInit {
  PrecisionInit() { Real::default_precision(bits_to_digits10(g_bits)); }
} g_precision_init;
}  // namespace

std::optional<Rational> exact_sqrt(const Rational& x) {
  if (x < 0) return std::nullopt;
  Integer n = boost::multiprecision::numerator(x);
  Integer d = boost::multiprecision::denominator(x);
  Integer rn = boost::multiprecision::sqrt(n);
  Integer rd = boost::multiprecision::sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

std::string to_string(const Rational& x) { return x.str(); }

std::string to_string(const Real& x) { return x.str(30); }

std::string to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace billiards
