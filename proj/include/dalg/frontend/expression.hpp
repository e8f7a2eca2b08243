#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dalg/diffpoly.hpp"
#include "dalg/error.hpp"
#include "dalg/rational.hpp"
#include "dalg/rational_function.hpp"

namespace dalg {

// Names and derivation count against which expressions are read.
struct ExpressionContext {
  std::size_t derivations = 0;
  std::vector<std::string> unknowns;

  std::size_t unknown_index(std::string_view name) const {
    for (std::size_t i = 0; i < unknowns.size(); ++i)
      if (unknowns[i] == name) return i;
    return unknowns.size();
  }
};

// True for names the grammar reserves: d<k> and z<k>.
inline bool is_reserved_name(std::string_view s) {
  if (s.size() < 2 || (s[0] != 'd' && s[0] != 'z')) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline bool is_valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !is_reserved_name(s);
}

namespace detail {

//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := postfix ('^' INT)?
//   postfix := dop* primary
//   dop     := 'd' INT ('^' INT)?
//   primary := INT | 'z' INT | NAME | '(' expr ')'
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const ExpressionContext& ctx, int line, int column_offset)
      : text_(text), ctx_(ctx), line_(line), offset_(column_offset) {}

  DiffRationalFunction parse() {
    DiffRationalFunction e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }
  [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
    throw ParseError(message, line_, offset_ + static_cast<int>(at) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string_view peek_word() {
    skip_space();
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    return text_.substr(pos_, end - pos_);
  }

  Integer integer() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  unsigned small_integer(const char* what) {
    skip_space();
    std::size_t at = pos_;
    Integer v = integer();
    if (!v.fits_uint_p() || v > 100000) fail_at(std::string(what) + " is too large", at);
    return static_cast<unsigned>(v.get_ui());
  }

  DiffPoly constant(const RationalFunction& c) const {
    return DiffPoly::constant(ctx_.derivations, ctx_.unknowns.size(), c);
  }

  DiffRationalFunction expr() {
    DiffRationalFunction e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  DiffRationalFunction term() {
    DiffRationalFunction e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        DiffRationalFunction d = unary();
        if (d.numerator().is_zero()) fail_at("division by zero", at);
        e = e / d;
      } else {
        return e;
      }
    }
  }

  DiffRationalFunction unary() {
    if (accept('-')) return -unary();
    return power();
  }

  DiffRationalFunction power() {
    DiffRationalFunction base = postfix();
    if (accept('^')) return base.pow(small_integer("exponent"));
    return base;
  }

  DiffRationalFunction postfix() {
    std::vector<unsigned> ops(ctx_.derivations, 0);
    bool any = false;
    for (;;) {
      std::string_view w = peek_word();
      if (w.size() < 2 || w[0] != 'd' || !is_reserved_name(w)) break;
      std::size_t at = pos_;
      ++pos_;
      unsigned k = small_integer("derivation index");
      if (k == 0 || k > ctx_.derivations)
        fail_at("derivation index " + std::to_string(k) + " out of range 1.." + std::to_string(ctx_.derivations), at);
      unsigned times = 1;
      if (accept('^')) times = small_integer("derivative power");
      ops[k - 1] += times;
      any = true;
    }
    DiffRationalFunction p = primary();
    if (!any) return p;
    MultiIndex alpha(std::move(ops));
    // Fast path for a bare unknown, the common case.
    if (p.is_polynomial() && p.numerator().terms().size() == 1) {
      const auto& [mono, c] = *p.numerator().terms().begin();
      if (mono.factors().size() == 1 && mono.factors()[0].second == 1 && c.is_constant() && c.constant_value() == 1) {
        const auto& v = mono.factors()[0].first;
        return DiffRationalFunction(
            DiffPoly::variable(ctx_.derivations, ctx_.unknowns.size(), v.unknown, v.index + alpha));
      }
    }
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (unsigned k = 0; k < alpha[i]; ++k) p = dp_derive(p, i);
    return p;
  }

  DiffRationalFunction primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      DiffRationalFunction e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)))
      return DiffRationalFunction(constant(RationalFunction::constant(ctx_.derivations, Rational(integer()))));
    std::size_t at = pos_;
    std::string_view w = peek_word();
    if (w.empty()) fail("unexpected '" + std::string(1, c) + "'");
    if (w[0] == 'z' && is_reserved_name(w)) {
      ++pos_;
      unsigned k = small_integer("coordinate index");
      if (k == 0 || k > ctx_.derivations)
        fail_at("coordinate z" + std::to_string(k) + " out of range 1.." + std::to_string(ctx_.derivations), at);
      return DiffRationalFunction(constant(RationalFunction::variable(ctx_.derivations, k - 1)));
    }
    if (w[0] == 'd' && is_reserved_name(w)) fail("derivative operator without an operand");
    std::size_t j = ctx_.unknown_index(w);
    if (j == ctx_.unknowns.size()) fail("unknown identifier '" + std::string(w) + "'");
    pos_ += w.size();
    return DiffRationalFunction(DiffPoly::variable(ctx_.derivations, ctx_.unknowns.size(), j, MultiIndex(ctx_.derivations)));
  }

  std::string_view text_;
  const ExpressionContext& ctx_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline DiffRationalFunction parse_expression(std::string_view text, const ExpressionContext& ctx, int line = 1,
                                             int column_offset = 0) {
  return detail::ExpressionParser(text, ctx, line, column_offset).parse();
}

inline DiffPoly parse_diffpoly(std::string_view text, const ExpressionContext& ctx, int line = 1,
                               int column_offset = 0) {
  DiffRationalFunction f = parse_expression(text, ctx, line, column_offset);
  if (!f.is_polynomial()) throw ParseError("expected a differential polynomial, got a quotient", line, column_offset + 1);
  return f.numerator();
}

// An element of Q(z_1..z_m): no unknowns may occur.
inline RationalFunction parse_ratfunc(std::string_view text, const ExpressionContext& ctx, int line = 1,
                                      int column_offset = 0) {
  DiffRationalFunction f = parse_expression(text, ctx, line, column_offset);
  if (!f.numerator().is_constant() || !f.denominator().is_constant())
    throw ParseError("expected a function of z1..z" + std::to_string(ctx.derivations) + " only", line,
                     column_offset + 1);
  return f.numerator().constant_coefficient() / f.denominator().constant_coefficient();
}

inline Rational parse_rational_expression(std::string_view text, const ExpressionContext& ctx, int line = 1,
                                          int column_offset = 0) {
  RationalFunction f = parse_ratfunc(text, ctx, line, column_offset);
  if (!f.is_constant()) throw ParseError("expected a rational number", line, column_offset + 1);
  return f.constant_value();
}

// "d1^2 d2 u"; the bare name for the zeroth derivative.
inline std::string format_variable(const DerivativeVar& v, const ExpressionContext& ctx) {
  std::string out;
  for (std::size_t i = 0; i < v.index.size(); ++i) {
    if (v.index[i] == 0) continue;
    out += "d" + std::to_string(i + 1);
    if (v.index[i] > 1) out += "^" + std::to_string(v.index[i]);
    out += " ";
  }
  return out + ctx.unknowns.at(v.unknown);
}

inline std::string format_coefficient_factor(const RationalFunction& c) {
  if (c.is_polynomial()) return "(" + to_string(c.numerator()) + ")";
  return "(" + to_string(c.numerator()) + ")/(" + to_string(c.denominator()) + ")";
}

// Largest monomial first; output parses back to the same polynomial.
inline std::string format_diffpoly(const DiffPoly& p, const ExpressionContext& ctx) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [mono, c] = *it;
    std::string factors;
    for (const auto& [v, e] : mono.factors()) {
      if (!factors.empty()) factors += "*";
      std::string name = format_variable(v, ctx);
      if (e == 1)
        factors += name;
      else if (v.index.is_zero())
        factors += name + "^" + std::to_string(e);
      else
        factors += "(" + name + ")^" + std::to_string(e);
    }
    bool negative = c.is_constant() && c.constant_value() < 0;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    std::string coeff;
    if (c.is_constant()) {
      Rational mag = abs(c.constant_value());
      if (mag != 1 || factors.empty()) coeff = mag.get_str();
    } else {
      coeff = format_coefficient_factor(c);
    }
    if (coeff.empty())
      out += factors;
    else if (factors.empty())
      out += coeff;
    else
      out += coeff + "*" + factors;
  }
  return out;
}

inline std::string format_diffratfunc(const DiffRationalFunction& f, const ExpressionContext& ctx) {
  if (f.is_polynomial()) return format_diffpoly(f.numerator(), ctx);
  return "(" + format_diffpoly(f.numerator(), ctx) + ")/(" + format_diffpoly(f.denominator(), ctx) + ")";
}

}  // namespace dalg
