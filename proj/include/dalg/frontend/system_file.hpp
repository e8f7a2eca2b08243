#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "dalg/ck_solver.hpp"
#include "dalg/derivation_change.hpp"
#include "dalg/diffpoly.hpp"
#include "dalg/error.hpp"
#include "dalg/frontend/expression.hpp"
#include "dalg/rational.hpp"

namespace dalg {

// Text of one parsed directive together with where it came from.
struct SourceText {
  std::string text;
  int line = 0;
  int column = 0;  // 0-based offset of text within its line
};

struct SystemEquation {
  std::size_t unknown = 0;
  unsigned order = 0;
  DiffRationalFunction rhs;
  SourceText source;
};

// A relation in one unknown, relabelled to a single-unknown context.
struct SystemRelation {
  std::size_t unknown = 0;
  DiffPoly relation;
  SourceText source;
};

struct SeedValue {
  DerivativeVar var;  // single-unknown context
  Rational value;
};

// Parsed system file. Directives (one per line, '#' starts a comment):
//   derivations M | unknown NAME... | eq d1^r u = F | relation P [= P2]
//   init u: [phi_0, ..., phi_{r-1}] | point c1, ..., cm | order N
//   lambda-search-bound B | lambda l2, ..., lm | witness u: f
//   seed u: d1 u = 2, u = 1 | target Q | delta0-bound B | function f: expr
struct SystemFile {
  ExpressionContext context;
  std::vector<SystemEquation> equations;
  std::vector<SystemRelation> relations;
  std::map<std::size_t, std::vector<std::pair<RationalFunction, SourceText>>> init;
  std::optional<std::vector<Rational>> point;
  std::optional<int> order;
  std::optional<unsigned> lambda_search_bound;
  std::optional<LambdaVector> lambda;
  std::map<std::size_t, std::pair<RationalFunction, SourceText>> witnesses;
  std::map<std::size_t, std::vector<SeedValue>> seeds;
  std::vector<std::pair<DiffPoly, SourceText>> targets;
  std::optional<int> delta0_bound;
  std::vector<std::pair<std::string, RationalFunction>> functions;

  std::size_t derivations() const { return context.derivations; }
  std::size_t unknowns() const { return context.unknowns.size(); }

  ExpressionContext single_context(std::size_t unknown) const {
    return ExpressionContext{context.derivations, {context.unknowns.at(unknown)}};
  }

  std::vector<Rational> base_point() const {
    return point ? *point : std::vector<Rational>(context.derivations, Rational(0));
  }

  const SystemRelation* relation_for(std::size_t unknown) const {
    for (const auto& r : relations)
      if (r.unknown == unknown) return &r;
    return nullptr;
  }

  const SystemEquation* equation_for(std::size_t unknown) const {
    for (const auto& e : equations)
      if (e.unknown == unknown) return &e;
    return nullptr;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Line {
  int number = 0;
  std::string_view keyword;
  std::string_view rest;
  int rest_column = 0;
  std::string_view full;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out.push_back(l);
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

[[noreturn]] inline void file_error(int line, const std::string& message) {
  throw SystemFileError("line " + std::to_string(line) + ": " + message);
}

// Splits on top-level commas (parentheses respected).
inline std::vector<std::pair<std::string_view, int>> split_commas(std::string_view s, int column) {
  std::vector<std::pair<std::string_view, int>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      std::string_view part = s.substr(start, i - start);
      std::size_t lead = 0;
      while (lead < part.size() && std::isspace(static_cast<unsigned char>(part[lead]))) ++lead;
      out.emplace_back(trim(part), column + static_cast<int>(start + lead));
      start = i + 1;
    } else if (s[i] == '(') {
      ++depth;
    } else if (s[i] == ')') {
      --depth;
    }
  }
  return out;
}

inline long long parse_count(const Line& l, long long min) {
  std::string s(trim(l.rest));
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    file_error(l.number, "expected an integer after '" + std::string(l.keyword) + "'");
  }
  if (used != s.size()) file_error(l.number, "expected an integer after '" + std::string(l.keyword) + "'");
  if (v < min) file_error(l.number, "'" + std::string(l.keyword) + "' must be at least " + std::to_string(min));
  return v;
}

// Single-unknown view of P; the set of occurring unknowns must be {j}.
inline std::pair<std::size_t, DiffPoly> isolate_unknown(const DiffPoly& p, int line) {
  std::optional<std::size_t> j;
  for (const auto& v : p.variables()) {
    if (j && *j != v.unknown) file_error(line, "relation involves more than one unknown");
    j = v.unknown;
  }
  if (!j) file_error(line, "relation involves no unknown");
  return {*j, p.substitute(
                  [&](const DerivativeVar& v) { return DiffPoly::variable(p.derivations(), 1, 0, v.index); }, 1)};
}

// "u: rest" -> (unknown index, rest, column of rest).
inline std::tuple<std::size_t, std::string_view, int> labelled(const Line& l, const ExpressionContext& ctx) {
  std::size_t colon = l.rest.find(':');
  if (colon == std::string_view::npos) file_error(l.number, "expected 'name: ...'");
  std::string_view name = trim(l.rest.substr(0, colon));
  std::size_t j = ctx.unknown_index(name);
  if (j == ctx.unknowns.size()) file_error(l.number, "undeclared unknown '" + std::string(name) + "'");
  std::string_view rest = l.rest.substr(colon + 1);
  return {j, rest, l.rest_column + static_cast<int>(colon + 1)};
}

}  // namespace detail

inline SystemFile parse_system_file(std::string_view text) {
  using namespace detail;
  std::vector<Line> lines;
  int number = 0;
  for (std::string_view raw : split_lines(text)) {
    ++number;
    std::string_view l = raw;
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    std::size_t start = 0;
    while (start < l.size() && std::isspace(static_cast<unsigned char>(l[start]))) ++start;
    if (start == l.size()) continue;
    std::size_t kend = start;
    while (kend < l.size() && !std::isspace(static_cast<unsigned char>(l[kend]))) ++kend;
    lines.push_back(Line{number, l.substr(start, kend - start), l.substr(kend), static_cast<int>(kend), raw});
  }

  SystemFile sys;
  std::optional<int> derivations_line;
  for (const auto& l : lines) {
    if (l.keyword == "derivations") {
      if (derivations_line) file_error(l.number, "derivation count given twice");
      sys.context.derivations = static_cast<std::size_t>(parse_count(l, 1));
      derivations_line = l.number;
    } else if (l.keyword == "unknown" || l.keyword == "unknowns") {
      std::istringstream names{std::string(l.rest)};
      std::string name;
      bool any = false;
      while (names >> name) {
        if (!is_valid_name(name)) file_error(l.number, "invalid unknown name '" + name + "'");
        if (sys.context.unknown_index(name) != sys.context.unknowns.size())
          file_error(l.number, "unknown '" + name + "' declared twice");
        sys.context.unknowns.push_back(name);
        any = true;
      }
      if (!any) file_error(l.number, "'unknown' needs at least one name");
    }
  }
  if (!derivations_line) throw SystemFileError("missing 'derivations' directive");
  const auto& ctx = sys.context;
  std::size_t m = ctx.derivations;

  for (const auto& l : lines) {
    std::string_view kw = l.keyword;
    if (kw == "derivations" || kw == "unknown" || kw == "unknowns") continue;
    if (kw == "order") {
      if (sys.order) file_error(l.number, "order given twice");
      sys.order = static_cast<int>(parse_count(l, 0));
    } else if (kw == "lambda-search-bound") {
      sys.lambda_search_bound = static_cast<unsigned>(parse_count(l, 0));
    } else if (kw == "delta0-bound") {
      sys.delta0_bound = static_cast<int>(parse_count(l, 0));
    } else if (kw == "point") {
      std::vector<Rational> w;
      for (auto [part, col] : split_commas(l.rest, l.rest_column))
        w.push_back(parse_rational_expression(part, ctx, l.number, col));
      if (w.size() != m)
        file_error(l.number, "point needs " + std::to_string(m) + " coordinates, got " + std::to_string(w.size()));
      sys.point = std::move(w);
    } else if (kw == "lambda") {
      LambdaVector lambda;
      for (auto [part, col] : split_commas(l.rest, l.rest_column)) {
        Rational v = parse_rational_expression(part, ctx, l.number, col);
        if (v.get_den() != 1 || !v.get_num().fits_slong_p()) file_error(l.number, "lambda entries must be integers");
        lambda.values.push_back(v.get_num().get_si());
      }
      if (lambda.values.size() + 1 != m)
        file_error(l.number, "lambda needs " + std::to_string(m - 1) + " entries");
      sys.lambda = std::move(lambda);
    } else if (kw == "eq") {
      std::size_t eqpos = l.rest.find('=');
      if (eqpos == std::string_view::npos) file_error(l.number, "equation needs '='");
      std::string_view lhs_text = l.rest.substr(0, eqpos);
      std::string_view rhs_text = l.rest.substr(eqpos + 1);
      DiffPoly lhs = parse_diffpoly(lhs_text, ctx, l.number, l.rest_column);
      auto vars = lhs.variables();
      bool ok = vars.size() == 1 && lhs.terms().size() == 1 && lhs.terms().begin()->second.is_constant() &&
                lhs.terms().begin()->second.constant_value() == 1 && lhs.terms().begin()->first.factors()[0].second == 1;
      const DerivativeVar* lead = ok ? &*vars.begin() : nullptr;
      if (!ok || !is_pure_first(lead->index) || lead->index[0] == 0)
        file_error(l.number, "left-hand side must be d1^r u with r >= 1");
      SourceText src{std::string(trim(l.rest)), l.number, l.rest_column};
      DiffRationalFunction rhs =
          parse_expression(rhs_text, ctx, l.number, l.rest_column + static_cast<int>(eqpos + 1));
      if (sys.equation_for(lead->unknown))
        file_error(l.number, "second equation for unknown '" + ctx.unknowns[lead->unknown] + "'");
      sys.equations.push_back(SystemEquation{lead->unknown, lead->index[0], std::move(rhs), std::move(src)});
    } else if (kw == "relation") {
      std::size_t eqpos = l.rest.find('=');
      DiffPoly p = eqpos == std::string_view::npos
                       ? parse_diffpoly(l.rest, ctx, l.number, l.rest_column)
                       : parse_diffpoly(l.rest.substr(0, eqpos), ctx, l.number, l.rest_column) -
                             parse_diffpoly(l.rest.substr(eqpos + 1), ctx, l.number,
                                            l.rest_column + static_cast<int>(eqpos + 1));
      auto [j, single] = isolate_unknown(p, l.number);
      sys.relations.push_back(SystemRelation{j, std::move(single), {std::string(trim(l.rest)), l.number, l.rest_column}});
    } else if (kw == "init") {
      auto [j, rest, col] = labelled(l, ctx);
      std::string_view body = trim(rest);
      std::size_t lead = rest.find('[');
      if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        file_error(l.number, "initial data must be a bracketed list");
      if (sys.init.count(j)) file_error(l.number, "initial data for '" + ctx.unknowns[j] + "' given twice");
      std::string_view inner = body.substr(1, body.size() - 2);
      auto& list = sys.init[j];
      for (auto [part, pcol] : split_commas(inner, col + static_cast<int>(lead + 1))) {
        if (part.empty()) file_error(l.number, "empty initial function");
        RationalFunction f = parse_ratfunc(part, ctx, l.number, pcol);
        if (f.numerator().involves(0) || f.denominator().involves(0))
          file_error(l.number, "initial functions depend on z2..z" + std::to_string(m) + " only");
        list.emplace_back(std::move(f), SourceText{std::string(part), l.number, pcol});
      }
    } else if (kw == "witness") {
      auto [j, rest, col] = labelled(l, ctx);
      sys.witnesses[j] = {parse_ratfunc(rest, ctx, l.number, col), SourceText{std::string(trim(rest)), l.number, col}};
    } else if (kw == "seed") {
      auto [j, rest, col] = labelled(l, ctx);
      auto& seed = sys.seeds[j];
      for (auto [part, pcol] : split_commas(rest, col)) {
        std::size_t eqpos = part.find('=');
        if (eqpos == std::string_view::npos) file_error(l.number, "seed entries have the form 'd1 u = value'");
        DiffPoly v = parse_diffpoly(part.substr(0, eqpos), ctx, l.number, pcol);
        auto vars = v.variables();
        if (vars.size() != 1 || v.terms().size() != 1 || !(v.terms().begin()->second == RationalFunction::constant(m, 1)) ||
            v.terms().begin()->first.factors()[0].second != 1 || vars.begin()->unknown != j)
          file_error(l.number, "seed entries must name a derivative of '" + ctx.unknowns[j] + "'");
        Rational value = parse_rational_expression(part.substr(eqpos + 1), ctx, l.number, pcol + static_cast<int>(eqpos + 1));
        seed.push_back(SeedValue{DerivativeVar{0, vars.begin()->index}, std::move(value)});
      }
    } else if (kw == "target") {
      sys.targets.emplace_back(parse_diffpoly(l.rest, ctx, l.number, l.rest_column),
                               SourceText{std::string(trim(l.rest)), l.number, l.rest_column});
    } else if (kw == "function") {
      std::size_t colon = l.rest.find(':');
      if (colon == std::string_view::npos) file_error(l.number, "expected 'function name: expr'");
      std::string name(trim(l.rest.substr(0, colon)));
      if (!is_valid_name(name)) file_error(l.number, "invalid function name '" + name + "'");
      sys.functions.emplace_back(name, parse_ratfunc(l.rest.substr(colon + 1), ctx, l.number,
                                                      l.rest_column + static_cast<int>(colon + 1)));
    } else {
      file_error(l.number, "unknown directive '" + std::string(kw) + "'");
    }
  }
  return sys;
}

// Normal-form system in the file's unknown order; every unknown needs an equation.
inline PDESystem build_pde_system(const SystemFile& sys) {
  PDESystem pde;
  pde.derivations = sys.derivations();
  pde.unknowns = sys.unknowns();
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    const SystemEquation* eq = sys.equation_for(j);
    if (!eq) throw SystemFileError("no equation for unknown '" + sys.context.unknowns[j] + "'");
    pde.equations.push_back(NormalFormEquation{eq->order, eq->rhs});
  }
  return pde;
}

// Expands the init functions at (w_2..w_m) to the orders ck_solve needs.
inline InitialData build_initial_data(const SystemFile& sys, const PDESystem& pde, int order) {
  std::vector<Rational> w = sys.base_point();
  std::vector<Rational> lower(w.begin() + 1, w.end());
  int needed = required_initial_order(pde, order);
  InitialData init;
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    auto it = sys.init.find(j);
    if (it == sys.init.end()) throw UnderdeterminedError("no initial data for '" + sys.context.unknowns[j] + "'");
    std::vector<TruncatedSeries> phis;
    for (const auto& [f, src] : it->second) phis.push_back(expand_ratfunc(restrict_hyperplane(f, w[0]), lower, needed));
    init.slices.push_back(std::move(phis));
  }
  return init;
}

}  // namespace dalg
