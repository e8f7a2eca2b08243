#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dalg/ck_solver.hpp"
#include "dalg/delta0_reduction.hpp"
#include "dalg/derivation_change.hpp"
#include "dalg/error.hpp"
#include "dalg/frontend/expression.hpp"
#include "dalg/frontend/series_document.hpp"
#include "dalg/frontend/system_file.hpp"

namespace dalg {

struct CliOptions {
  std::string input;
  std::optional<int> order;
  std::optional<std::string> output;
  std::optional<unsigned> lambda_bound;
  std::optional<std::string> point;
};

namespace cli {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline SystemFile load(const CliOptions& opt) {
  SystemFile sys = parse_system_file(read_file(opt.input));
  if (opt.point) {
    std::vector<Rational> w;
    for (auto [part, col] : detail::split_commas(*opt.point, 0)) {
      try {
        w.push_back(parse_rational(part));
      } catch (const DomainError&) {
        throw SystemFileError("--point: '" + std::string(part) + "' is not a rational number");
      }
    }
    if (w.size() != sys.derivations())
      throw SystemFileError("--point needs " + std::to_string(sys.derivations()) + " coordinates");
    sys.point = std::move(w);
  }
  if (opt.order) sys.order = *opt.order;
  if (opt.lambda_bound) sys.lambda_search_bound = *opt.lambda_bound;
  return sys;
}

inline int order_of(const SystemFile& sys) {
  if (!sys.order) throw SystemFileError("no truncation order (use 'order N' or --order N)");
  if (*sys.order < 0) throw SystemFileError("truncation order must be nonnegative");
  return *sys.order;
}

inline std::string equation_text(const SystemFile& sys, std::size_t unknown, unsigned order,
                                 const DiffRationalFunction& rhs) {
  std::string lhs = format_variable(DerivativeVar{unknown, MultiIndex::unit(sys.derivations(), 0, order)}, sys.context);
  return lhs + " = " + format_diffratfunc(rhs, sys.context);
}

inline std::string relation_text(const SystemFile& sys, const SystemRelation& rel) {
  return format_diffpoly(rel.relation, sys.single_context(rel.unknown));
}

inline Json alpha_json(const MultiIndex& a) {
  Json j = Json::array();
  for (unsigned e : a.entries()) j.push_back(e);
  return j;
}

// Rewrites a NormalFormError so that it names the derivative in the file's notation.
[[noreturn]] inline void rethrow_named(const NormalFormError& e, const SystemFile& sys) {
  if (e.alpha().empty()) throw e;
  std::vector<unsigned> alpha = e.alpha();
  DerivativeVar v{e.unknown(), MultiIndex(alpha)};
  const SystemEquation* eq = sys.equation_for(e.equation());
  std::string where = eq ? " ('" + eq->source.text + "', line " + std::to_string(eq->source.line) + ")" : "";
  throw NormalFormError(e.equation(), e.unknown(), alpha,
                        "equation " + std::to_string(e.equation() + 1) + where + ": derivative " +
                            format_variable(v, sys.context) + " with alpha = " + v.index.to_string() +
                            " is not allowed in normal form");
}

inline std::vector<ResidualEntry> residual_entries(const std::vector<ResidualRecord>& report,
                                                   const std::vector<std::string>& labels) {
  std::vector<ResidualEntry> out;
  for (const auto& r : report) out.push_back(ResidualEntry{labels.at(r.equation), r.certified_order, r.pass});
  return out;
}

inline std::string cmd_solve(const CliOptions& opt) {
  SystemFile sys = load(opt);
  PDESystem pde = build_pde_system(sys);
  try {
    validate_normal_form(pde);
  } catch (const NormalFormError& e) {
    rethrow_named(e, sys);
  }
  int order = order_of(sys);
  InitialData init = build_initial_data(sys, pde, order);
  std::vector<Rational> w = sys.base_point();
  Solution sol = ck_solve(pde, init, w[0], order);

  SeriesDocument doc{sys.derivations(), order, w, {}, {}, EmbeddedSystem{sys.context.unknowns, {}, {}}};
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    doc.series.push_back(NamedSeries{sys.context.unknowns[j], sol.components[j]});
    labels.push_back(equation_text(sys, j, pde.equations[j].order, pde.equations[j].rhs));
  }
  doc.system->equations = labels;
  doc.residual = residual_entries(sol.report, labels);
  return encode_text(doc);
}

inline std::string cmd_extend(const CliOptions& opt) {
  SystemFile sys = load(opt);
  int order = order_of(sys);
  std::vector<Rational> w = sys.base_point();
  std::vector<Rational> lower(w.begin() + 1, w.end());
  unsigned rmax = 0;
  for (const auto& r : sys.relations) rmax = std::max(rmax, static_cast<unsigned>(leader(r.relation).index[0]) + 1);
  for (const auto& e : sys.equations) rmax = std::max(rmax, e.order);
  int slice_order = order + static_cast<int>(rmax);

  std::vector<ExtensionGenerator> gens;
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    const SystemRelation* rel = sys.relation_for(j);
    if (!rel) throw SystemFileError("no relation for unknown '" + sys.context.unknowns[j] + "'");
    ExtensionGenerator g{rel->relation, std::nullopt, std::nullopt, {}};
    if (const SystemEquation* eq = sys.equation_for(j)) {
      for (const auto& v : eq->rhs.variables())
        if (v.unknown != j) throw SystemFileError("line " + std::to_string(eq->source.line) +
                                                  ": a generator's equation may only involve its own unknown");
      std::vector<std::size_t> to(sys.unknowns(), 0);
      g.order = eq->order;
      g.rhs = DiffRationalFunction(eq->rhs.numerator().relabel_unknowns(1, to), eq->rhs.denominator().relabel_unknowns(1, to));
    }
    auto it = sys.init.find(j);
    if (it == sys.init.end()) throw UnderdeterminedError("no slice data for '" + sys.context.unknowns[j] + "'");
    for (const auto& [f, src] : it->second) g.slices.push_back(expand_ratfunc(restrict_hyperplane(f, w[0]), lower, slice_order));
    gens.push_back(std::move(g));
  }
  Extension ext = extend_dimension_full(gens, w[0], order);

  SeriesDocument doc{sys.derivations(), ext.solution.order, w, {}, {}, EmbeddedSystem{sys.context.unknowns, {}, {}}};
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    doc.series.push_back(NamedSeries{sys.context.unknowns[j], ext.solution.components[j]});
    labels.push_back(equation_text(sys, j, ext.system.equations[j].order, ext.system.equations[j].rhs));
    doc.system->relations.push_back(relation_text(sys, *sys.relation_for(j)));
  }
  doc.system->equations = labels;
  doc.residual = residual_entries(ext.solution.report, labels);
  for (std::size_t j = 0; j < sys.unknowns(); ++j) {
    TruncatedSeries r = evaluate_jet(sys.relation_for(j)->relation, {ext.solution.components[j]});
    doc.residual.push_back(ResidualEntry{doc.system->relations[j], r.order(), r.is_zero()});
  }
  return encode_text(doc);
}

inline std::string cmd_separant(const CliOptions& opt) {
  SystemFile sys = load(opt);
  Json rels = Json::array();
  for (const auto& rel : sys.relations) {
    ExpressionContext ctx = sys.single_context(rel.unknown);
    DerivativeVar lead = leader(rel.relation);
    Json j;
    j["relation"] = format_diffpoly(rel.relation, ctx);
    j["leader"] = format_variable(lead, ctx);
    j["separant"] = format_diffpoly(separant(rel.relation), ctx);
    bool pure = is_pure_first(lead.index);
    j["integral_form"] = pure;
    if (pure) {
      RemarkStep step = eqremark_step(rel.relation);
      j["order"] = step.order;
      j["q"] = format_diffpoly(step.q, ctx);
    }
    LambdaSeparant ls = symbolic_lambda_separant(rel.relation);
    Json terms = Json::array();
    for (auto it = ls.terms.rbegin(); it != ls.terms.rend(); ++it)
      terms.push_back(Json{{"lambda_power", alpha_json(it->first)}, {"coefficient", format_diffpoly(it->second, ctx)}});
    j["lambda_separant"] = terms;
    if (auto wit = sys.witnesses.find(rel.unknown); wit != sys.witnesses.end()) {
      TruncatedSeries s = expand_ratfunc(wit->second.first, sys.base_point(), order_of(sys));
      j["integral_at_witness"] = is_integral(rel.relation, s);
    }
    rels.push_back(j);
  }
  return Json{{"relations", rels}}.dump(2) + "\n";
}

inline std::string cmd_change(const CliOptions& opt) {
  SystemFile sys = load(opt);
  std::size_t m = sys.derivations();
  std::vector<IntegralWitness> witnesses;
  bool have_witnesses = true;
  for (const auto& rel : sys.relations) {
    auto it = sys.witnesses.find(rel.unknown);
    if (it == sys.witnesses.end()) {
      have_witnesses = false;
      continue;
    }
    witnesses.push_back(IntegralWitness{rel.relation, expand_ratfunc(it->second.first, sys.base_point(), order_of(sys))});
  }
  std::optional<IntegralChange> change;
  DerivationMatrix matrix = DerivationMatrix::identity(m);
  LambdaVector lambda{std::vector<std::int64_t>(m - 1, 0)};
  if (sys.lambda) {
    lambda = *sys.lambda;
    matrix = DerivationMatrix::from_lambda(lambda);
  } else {
    if (!have_witnesses) throw UnderdeterminedError("the search needs a witness for every relation (or give 'lambda')");
    change = find_integral_change(m, witnesses, sys.lambda_search_bound.value_or(default_lambda_bound));
    lambda = change->lambda;
    matrix = change->matrix;
  }
  Json j;
  j["lambda"] = lambda.values;
  j["matrix"] = matrix.rows();
  j["searched"] = !sys.lambda.has_value();
  Json rels = Json::array();
  for (std::size_t i = 0; i < sys.relations.size(); ++i) {
    const auto& rel = sys.relations[i];
    ExpressionContext ctx = sys.single_context(rel.unknown);
    DiffPoly t = transform(rel.relation, matrix);
    Json r{{"relation", format_diffpoly(rel.relation, ctx)}, {"transformed", format_diffpoly(t, ctx)}};
    if (auto it = sys.witnesses.find(rel.unknown); it != sys.witnesses.end()) {
      TruncatedSeries s = expand_ratfunc(it->second.first, sys.base_point(), order_of(sys));
      r["integral"] = is_integral(t, coordinate_change_series(s, matrix));
    }
    rels.push_back(r);
  }
  j["relations"] = rels;
  return j.dump(2) + "\n";
}

inline std::string cmd_reduce(const CliOptions& opt) {
  SystemFile sys = load(opt);
  if (sys.relations.size() != 1) throw SystemFileError("reduce needs exactly one relation");
  const auto& rel = sys.relations.front();
  ExpressionContext ctx = sys.single_context(rel.unknown);
  IntegralRelation ir(rel.relation);
  Json j;
  j["relation"] = format_diffpoly(ir.relation(), ctx);
  j["order"] = ir.order();
  j["separant"] = format_diffpoly(ir.separant(), ctx);
  Json reds = Json::array();
  for (const auto& [q, src] : sys.targets) {
    auto [idx, single] = detail::isolate_unknown(q, src.line);
    if (idx != rel.unknown) throw SystemFileError("line " + std::to_string(src.line) + ": target must use the relation's unknown");
    Reduction r = reduce_delta1(single, ir);
    reds.push_back(Json{{"target", format_diffpoly(single, ctx)},
                        {"reduced", format_diffpoly(r.reduced, ctx)},
                        {"separant_power", r.separant_power}});
  }
  j["reductions"] = reds;
  int bound = sys.delta0_bound.value_or(1);
  GeneratorSet gs = fingen_generators(ir, bound);
  Json gens = Json::array();
  for (const auto& g : gs.derivatives) gens.push_back(format_variable(g.var, ctx));
  Json invs = Json::array();
  for (const auto& g : gs.inverse_separant) invs.push_back(format_diffratfunc(g.value, ctx));
  j["generators"] = Json{{"delta0_bound", bound},
                         {"b1", gs.b1},
                         {"b2", format_diffpoly(gs.b2, ctx)},
                         {"derivatives", gens},
                         {"inverse_separant", invs}};
  return j.dump(2) + "\n";
}

inline std::string cmd_expand(const CliOptions& opt) {
  SystemFile sys = load(opt);
  int order = order_of(sys);
  std::vector<Rational> w = sys.base_point();
  SeriesDocument doc{sys.derivations(), order, w, {}, {}, EmbeddedSystem{}};
  for (const auto& rel : sys.relations) {
    auto seed = sys.seeds.find(rel.unknown);
    if (seed == sys.seeds.end()) throw UnderdeterminedError("no seed for '" + sys.context.unknowns[rel.unknown] + "'");
    PointEvaluation psi(w);
    for (const auto& s : seed->second) psi.set(s.var, s.value);
    PointEvaluation full = jet_prolongation(rel.relation, psi, order);
    DiffPoly x = DiffPoly::variable(sys.derivations(), 1, 0, MultiIndex(sys.derivations()));
    TruncatedSeries s = taylor_homomorphism(full, x, order);
    std::string text = relation_text(sys, rel);
    doc.series.push_back(NamedSeries{sys.context.unknowns[rel.unknown], s});
    doc.system->unknowns.push_back(sys.context.unknowns[rel.unknown]);
    doc.system->relations.push_back(text);
    TruncatedSeries r = evaluate_jet(rel.relation, {s});
    doc.residual.push_back(ResidualEntry{text, r.order(), r.is_zero()});
  }
  for (const auto& [name, f] : sys.functions) doc.series.push_back(NamedSeries{name, expand_ratfunc(f, w, order)});
  return encode_text(doc);
}

// Recomputes every residual from the embedded system; the recorded report
// must agree and pass.
inline std::string cmd_verify(const CliOptions& opt, std::string& report) {
  SeriesDocument doc = decode_text(read_file(opt.input));
  if (!doc.system) throw DocumentError("document carries no system to verify against");
  std::string text = "derivations " + std::to_string(doc.derivations) + "\n";
  if (!doc.system->unknowns.empty()) {
    text += "unknown";
    for (const auto& u : doc.system->unknowns) text += " " + u;
    text += "\n";
  }
  for (const auto& e : doc.system->equations) text += "eq " + e + "\n";
  for (const auto& r : doc.system->relations) text += "relation " + r + "\n";
  SystemFile sys;
  try {
    sys = parse_system_file(text);
  } catch (const Error& e) {
    throw DocumentError(std::string("embedded system is malformed: ") + e.what());
  }
  std::vector<TruncatedSeries> comps;
  for (const auto& u : sys.context.unknowns) {
    auto it = std::find_if(doc.series.begin(), doc.series.end(), [&](const NamedSeries& s) { return s.name == u; });
    if (it == doc.series.end()) throw DocumentError("no series for unknown '" + u + "'");
    comps.push_back(it->series);
  }
  std::vector<ResidualEntry> recomputed;
  if (!sys.equations.empty()) {
    PDESystem pde = build_pde_system(sys);
    validate_normal_form(pde);
    Solution sol{comps, doc.order, {}};
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < sys.unknowns(); ++j)
      labels.push_back(equation_text(sys, j, pde.equations[j].order, pde.equations[j].rhs));
    recomputed = residual_entries(residual_report(pde, sol), labels);
  }
  for (const auto& rel : sys.relations) {
    TruncatedSeries r = evaluate_jet(rel.relation, {comps[rel.unknown]});
    recomputed.push_back(ResidualEntry{relation_text(sys, rel), r.order(), r.is_zero()});
  }
  bool pass = std::all_of(recomputed.begin(), recomputed.end(), [](const ResidualEntry& e) { return e.pass; });
  bool matches = doc.residual.empty() || doc.residual == recomputed;
  Json j;
  j["verified"] = pass && matches;
  j["recorded_report_matches"] = matches;
  Json res = Json::array();
  for (const auto& r : recomputed)
    res.push_back(Json{{"equation", r.equation}, {"certified_order", r.certified_order}, {"pass", r.pass}});
  j["residual"] = res;
  report = j.dump(2) + "\n";
  if (!pass) throw ResidualError("residual does not vanish to its certified order");
  if (!matches) throw ResidualError("recorded residual report differs from the recomputed one");
  return report;
}

inline Json error_json(const Error& e) {
  Json body;
  body["kind"] = kind_name(e.kind());
  body["exit_code"] = exit_code(e.kind());
  body["message"] = e.what();
  if (auto* p = dynamic_cast<const ParseError*>(&e)) {
    body["line"] = p->line();
    body["column"] = p->column();
  } else if (auto* n = dynamic_cast<const NormalFormError*>(&e)) {
    body["equation"] = n->equation() + 1;
    body["alpha"] = n->alpha();
  } else if (auto* s = dynamic_cast<const SearchExhaustedError*>(&e)) {
    body["bound"] = s->bound();
  } else if (auto* u = dynamic_cast<const UnderdeterminedError*>(&e)) {
    if (!u->missing().empty()) body["missing"] = u->missing();
  }
  return Json{{"error", body}};
}

}  // namespace cli

// Runs one subcommand; args excludes the program name. Documents and reports
// go to --output or `out`, errors to `err` as a JSON object.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact differential-polynomial algebra and formal Cauchy-Kovalevskaya solver", "dalg"};
  app.require_subcommand(1);
  CliOptions opt;
  struct Command {
    const char* name;
    const char* help;
    bool series_options;
  };
  const Command commands[] = {
      {"solve", "solve a normal-form system to a truncated series", true},
      {"extend", "extend slice data across z1 = w1 using integral relations", true},
      {"separant", "report leaders, separants and prolongation data of relations", true},
      {"change-derivations", "apply or search an integral change of derivations", true},
      {"reduce", "reduce targets modulo an integral relation", true},
      {"verify", "recompute the residuals of a series document", false},
      {"expand", "prolong a seed jet along a relation and expand functions", true},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("file", opt.input, c.series_options ? "system file" : "series document")->required();
    sub->add_option("--output", opt.output, "write the result here instead of stdout");
    if (c.series_options) {
      sub->add_option("--order", opt.order, "truncation order N")->check(CLI::NonNegativeNumber);
      sub->add_option("--lambda-bound", opt.lambda_bound, "max-norm bound of the lambda search");
      sub->add_option("--point", opt.point, "base point \"c1,...,cm\"");
    }
    subs.push_back(sub);
  }

  std::vector<std::string> argv_storage{"dalg"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::string name = app.get_subcommands().front()->get_name();
  std::string result;
  std::string report;
  int status = 0;
  try {
    if (name == "solve")
      result = cli::cmd_solve(opt);
    else if (name == "extend")
      result = cli::cmd_extend(opt);
    else if (name == "separant")
      result = cli::cmd_separant(opt);
    else if (name == "change-derivations")
      result = cli::cmd_change(opt);
    else if (name == "reduce")
      result = cli::cmd_reduce(opt);
    else if (name == "verify")
      result = cli::cmd_verify(opt, report);
    else
      result = cli::cmd_expand(opt);
  } catch (const Error& e) {
    err << cli::error_json(e).dump(2) << "\n";
    status = exit_code(e.kind());
    result = report;
  } catch (const std::exception& e) {
    err << Json{{"error", {{"kind", "internal"}, {"exit_code", 1}, {"message", e.what()}}}}.dump(2) << "\n";
    return 1;
  }
  if (result.empty()) return status;
  try {
    if (opt.output)
      cli::write_file(*opt.output, result);
    else
      out << result;
  } catch (const Error& e) {
    err << cli::error_json(e).dump(2) << "\n";
    return exit_code(e.kind());
  }
  return status;
}

}  // namespace dalg
