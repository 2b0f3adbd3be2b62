#include "qlgs/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace qlgs {

std::string to_string(const Rational& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

double to_double(const Rational& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

namespace {

bool parse_ll(std::string_view s, long long& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  if (i == s.size()) return false;
  long long v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    if (v > (1LL << 60) / 10) return false;  // keep far from overflow
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    long long num = 0, den = 0;
    if (!parse_ll(text.substr(0, slash), num)) return std::nullopt;
    if (!parse_ll(text.substr(slash + 1), den)) return std::nullopt;
    if (den == 0) return std::nullopt;
    return Rational(num, den);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view head = text.substr(0, dot), tail = text.substr(dot + 1);
    if (tail.size() > 15) return std::nullopt;
    bool neg = !head.empty() && head.front() == '-';
    long long ip = 0;
    if (!head.empty() && head != "-" && head != "+" && !parse_ll(head, ip)) return std::nullopt;
    long long fp = 0, scale = 1;
    for (char c : tail) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      fp = fp * 10 + (c - '0');
      scale *= 10;
    }
    Rational mag(std::llabs(ip), 1);
    mag += Rational(fp, scale);
    return neg ? -mag : mag;
  }

  long long v = 0;
  if (!parse_ll(text, v)) return std::nullopt;
  return Rational(v, 1);
}

}  // namespace qlgs
