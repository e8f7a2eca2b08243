#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "dalg/error.hpp"

namespace dalg {

using Integer = mpz_class;
using Rational = mpq_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

// Accepts "p" or "p/q" with an optional leading sign; the result is canonical.
inline Rational parse_rational(std::string_view text) {
  auto valid_integer = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!valid_integer(num) || !valid_integer(den) || den.front() == '-' || den.front() == '+')
    throw DomainError("malformed rational '" + std::string(text) + "'");
  std::string n(num);
  if (!n.empty() && n.front() == '+') n.erase(0, 1);
  Integer d(std::string(den), 10);
  if (d == 0) throw DomainError("zero denominator in rational '" + std::string(text) + "'");
  Rational q{Integer(n, 10), d};
  q.canonicalize();
  return q;
}

inline Integer factorial(unsigned k) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

}  // namespace dalg
