#include "resub/common.hpp"

#include <cctype>
#include <cstdio>

namespace resub {

std::string to_hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Rational::Rational(int64_t n, int64_t d) : num(n), den(d) {
  if (den <= 0) throw Error("Rational: denominator must be positive");
  if (num < 0) throw Error("Rational: negative weights are not supported");
  int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw Error("Rational::parse: empty string");
  size_t dot = text.find('.');
  std::string ip = dot == std::string::npos ? text : text.substr(0, dot);
  std::string fp = dot == std::string::npos ? "" : text.substr(dot + 1);
  if (ip.empty()) ip = "0";
  auto digits = [](const std::string& s) {
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  if (!digits(ip) || !digits(fp) || fp.size() > 15)
    throw Error("Rational::parse: not a plain decimal in [0,1]: '" + text + "'");
  int64_t den = 1;
  for (size_t i = 0; i < fp.size(); ++i) den *= 10;
  int64_t num = std::stoll(ip) * den + (fp.empty() ? 0 : std::stoll(fp));
  Rational r(num, den);
  if (r.num > r.den) throw Error("Rational::parse: weight above 1: '" + text + "'");
  return r;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == back) return probe;
  }
  return buf;
}

}  // namespace resub
