#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dalg {

// Every failure the library can report. The CLI maps each kind to a stable
// error-kind string and exit code.
enum class ErrorKind {
  dimension,
  context,
  domain,
  pole,
  restriction,
  no_leader,
  not_integral,
  matrix,
  search_exhausted,
  normal_form,
  underdetermined,
  singular_prolongation,
  denominator_vanishes,
  consistency,
  parse,
  system_file,
  document,
  residual,
  io,
};

constexpr std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::context: return "context";
    case ErrorKind::domain: return "domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::restriction: return "restriction";
    case ErrorKind::no_leader: return "no-leader";
    case ErrorKind::not_integral: return "not-integral";
    case ErrorKind::matrix: return "matrix";
    case ErrorKind::search_exhausted: return "search-exhausted";
    case ErrorKind::normal_form: return "normal-form";
    case ErrorKind::underdetermined: return "underdetermined";
    case ErrorKind::singular_prolongation: return "singular-prolongation";
    case ErrorKind::denominator_vanishes: return "denominator-vanishes";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::parse: return "parse";
    case ErrorKind::system_file: return "system-file";
    case ErrorKind::document: return "document";
    case ErrorKind::residual: return "residual";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Exit codes 0 (success), 1 (internal failure) and 2 (usage) are reserved.
constexpr int exit_code(ErrorKind kind) noexcept { return 3 + static_cast<int>(kind); }

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& message) : Error(K, message) {}
};

using DimensionError = KindError<ErrorKind::dimension>;
using ContextError = KindError<ErrorKind::context>;
using DomainError = KindError<ErrorKind::domain>;
using PoleError = KindError<ErrorKind::pole>;
using RestrictionError = KindError<ErrorKind::restriction>;
using NoLeaderError = KindError<ErrorKind::no_leader>;
using NotIntegralError = KindError<ErrorKind::not_integral>;
using MatrixError = KindError<ErrorKind::matrix>;
using SingularProlongationError = KindError<ErrorKind::singular_prolongation>;
using DenominatorVanishesError = KindError<ErrorKind::denominator_vanishes>;
using ConsistencyError = KindError<ErrorKind::consistency>;
using SystemFileError = KindError<ErrorKind::system_file>;
using DocumentError = KindError<ErrorKind::document>;
using ResidualError = KindError<ErrorKind::residual>;
using IoError = KindError<ErrorKind::io>;

class SearchExhaustedError : public Error {
 public:
  explicit SearchExhaustedError(unsigned bound)
      : Error(ErrorKind::search_exhausted,
              "no integral change of derivations with max-norm <= " + std::to_string(bound)),
        bound_(bound) {}

  unsigned bound() const noexcept { return bound_; }

 private:
  unsigned bound_;
};

// Names the offending equation and derivative so callers can report them.
class NormalFormError : public Error {
 public:
  NormalFormError(std::size_t equation, std::size_t unknown, std::vector<unsigned> alpha,
                  const std::string& message)
      : Error(ErrorKind::normal_form, message),
        equation_(equation),
        unknown_(unknown),
        alpha_(std::move(alpha)) {}

  std::size_t equation() const noexcept { return equation_; }
  std::size_t unknown() const noexcept { return unknown_; }
  const std::vector<unsigned>& alpha() const noexcept { return alpha_; }

 private:
  std::size_t equation_;
  std::size_t unknown_;
  std::vector<unsigned> alpha_;
};

class UnderdeterminedError : public Error {
 public:
  UnderdeterminedError(const std::string& message, std::vector<std::string> missing = {})
      : Error(ErrorKind::underdetermined, message), missing_(std::move(missing)) {}

  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + message),
        reason_(message),
        line_(line),
        column_(column) {}

  const std::string& reason() const noexcept { return reason_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string reason_;
  int line_;
  int column_;
};

}  // namespace dalg
