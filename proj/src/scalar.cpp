#include "latboot/scalar.hpp"

#include <charconv>
#include <cstdlib>
#include <string>

#include "latboot/combinatorics.hpp"
#include "latboot/errors.hpp"

namespace latboot {

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(double v) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      return false;
    }
  }
  return true;
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw ParseError("not a number: '" + std::string(whole) + "'");
  }
  BigInt v(std::string(s), 10);
  return negative ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(s.substr(0, slash), s);
    BigInt den = parse_integer(s.substr(slash + 1), s);
    if (den == 0) {
      throw ParseError("zero denominator in '" + std::string(s) + "'");
    }
    return make_ratio<Rational>(num, den);
  }
  // Decimal literal: [sign] digits [. digits] [e|E [sign] digits], converted exactly.
  std::string_view rest = s;
  bool negative = false;
  if (!rest.empty() && (rest.front() == '+' || rest.front() == '-')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    BigInt ev = parse_integer(rest.substr(e + 1), s);
    if (!ev.fits_slong_p() || abs(ev) > 100000) {
      throw ParseError("exponent out of range in '" + std::string(s) + "'");
    }
    exponent = ev.get_si();
    rest = rest.substr(0, e);
  }
  std::string digits;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    std::string_view ip = rest.substr(0, dot);
    std::string_view fp = rest.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp))) {
      throw ParseError("not a number: '" + std::string(s) + "'");
    }
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(rest)) {
      throw ParseError("not a number: '" + std::string(s) + "'");
    }
    digits = std::string(rest);
  }
  Rational value(BigInt(digits, 10));
  if (exponent > 0) {
    value *= Rational(power(10, static_cast<std::uint64_t>(exponent)));
  } else if (exponent < 0) {
    value /= Rational(power(10, static_cast<std::uint64_t>(-exponent)));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

double parse_double(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.find('/') != std::string_view::npos) {
    return parse_rational(s).get_d();
  }
  std::string buffer(s);
  char* end = nullptr;
  double v = std::strtod(buffer.c_str(), &end);
  if (buffer.empty() || end != buffer.c_str() + buffer.size()) {
    throw ParseError("not a number: '" + buffer + "'");
  }
  return v;
}

}  // namespace latboot
