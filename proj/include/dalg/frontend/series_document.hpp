#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/rational.hpp"
#include "dalg/series.hpp"

namespace dalg {

inline constexpr const char* series_format = "dalg-series-v1";

struct NamedSeries {
  std::string name;
  TruncatedSeries series;

  friend bool operator==(const NamedSeries&, const NamedSeries&) = default;
};

struct ResidualEntry {
  std::string equation;
  int certified_order = 0;
  bool pass = false;

  friend bool operator==(const ResidualEntry&, const ResidualEntry&) = default;
};

// Enough of the originating system to recompute residuals.
struct EmbeddedSystem {
  std::vector<std::string> unknowns;
  std::vector<std::string> equations;
  std::vector<std::string> relations;

  friend bool operator==(const EmbeddedSystem&, const EmbeddedSystem&) = default;
};

struct SeriesDocument {
  std::size_t derivations = 0;
  int order = 0;
  std::vector<Rational> base_point;
  std::vector<NamedSeries> series;
  std::vector<ResidualEntry> residual;
  std::optional<EmbeddedSystem> system;

  friend bool operator==(const SeriesDocument&, const SeriesDocument&) = default;
};

using Json = nlohmann::ordered_json;

inline Json encode(const SeriesDocument& doc) {
  Json j;
  j["format"] = series_format;
  j["derivations"] = doc.derivations;
  j["order"] = doc.order;
  Json base = Json::array();
  for (const auto& w : doc.base_point) base.push_back(w.get_str());
  j["base_point"] = base;
  Json series = Json::array();
  for (const auto& s : doc.series) {
    Json coeffs = Json::array();
    for (const auto& [alpha, v] : s.series.coefficients()) {
      Json a = Json::array();
      for (unsigned e : alpha.entries()) a.push_back(e);
      coeffs.push_back(Json{{"alpha", a}, {"value", Json{{"num", v.get_num().get_str()}, {"den", v.get_den().get_str()}}}});
    }
    series.push_back(Json{{"name", s.name}, {"coefficients", coeffs}});
  }
  j["series"] = series;
  Json residual = Json::array();
  for (const auto& r : doc.residual)
    residual.push_back(Json{{"equation", r.equation}, {"certified_order", r.certified_order}, {"pass", r.pass}});
  j["residual"] = residual;
  if (doc.system)
    j["system"] = Json{{"unknowns", doc.system->unknowns},
                       {"equations", doc.system->equations},
                       {"relations", doc.system->relations}};
  return j;
}

inline std::string encode_text(const SeriesDocument& doc) { return encode(doc).dump(2) + "\n"; }

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw DocumentError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline Integer integer_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw DocumentError(where + ": expected an integer string");
  const std::string& s = j.get_ref<const std::string&>();
  bool ok = !s.empty();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-' && s.size() > 1))) ok = false;
  if (!ok) throw DocumentError(where + ": '" + s + "' is not an integer");
  return Integer(s);
}

inline Rational rational_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw DocumentError(where + ": expected a rational string");
  try {
    return parse_rational(j.get_ref<const std::string&>());
  } catch (const DomainError& e) {
    throw DocumentError(where + ": " + e.what());
  }
}

inline std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw DocumentError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) throw DocumentError(where + ": expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline SeriesDocument decode(const Json& j) {
  using detail::field;
  const auto& fmt = field(j, "format", "document");
  if (!fmt.is_string() || fmt.get<std::string>() != series_format)
    throw DocumentError("document: unsupported format (expected " + std::string(series_format) + ")");
  SeriesDocument doc;
  const auto& m = field(j, "derivations", "document");
  const auto& n = field(j, "order", "document");
  if (!m.is_number_unsigned()) throw DocumentError("document: 'derivations' must be a nonnegative integer");
  if (!n.is_number_integer() || n.get<long long>() < 0) throw DocumentError("document: 'order' must be a nonnegative integer");
  doc.derivations = m.get<std::size_t>();
  doc.order = n.get<int>();
  const auto& base = field(j, "base_point", "document");
  if (!base.is_array() || base.size() != doc.derivations)
    throw DocumentError("document: 'base_point' must list one rational per derivation");
  for (const auto& w : base) doc.base_point.push_back(detail::rational_string(w, "base_point"));

  const auto& series = field(j, "series", "document");
  if (!series.is_array()) throw DocumentError("document: 'series' must be an array");
  for (const auto& s : series) {
    const auto& name = field(s, "name", "series");
    if (!name.is_string()) throw DocumentError("series: 'name' must be a string");
    std::string where = "series '" + name.get<std::string>() + "'";
    const auto& coeffs = field(s, "coefficients", where);
    if (!coeffs.is_array()) throw DocumentError(where + ": 'coefficients' must be an array");
    TruncatedSeries::Coefficients c;
    for (const auto& rec : coeffs) {
      const auto& alpha = field(rec, "alpha", where);
      if (!alpha.is_array() || alpha.size() != doc.derivations)
        throw DocumentError(where + ": alpha must have " + std::to_string(doc.derivations) + " entries");
      std::vector<unsigned> e;
      for (const auto& a : alpha) {
        if (!a.is_number_unsigned()) throw DocumentError(where + ": alpha entries must be nonnegative integers");
        e.push_back(a.get<unsigned>());
      }
      MultiIndex idx(std::move(e));
      if (static_cast<int>(idx.degree()) > doc.order)
        throw DocumentError(where + ": coefficient " + idx.to_string() + " exceeds the truncation order");
      const auto& value = field(rec, "value", where);
      Integer num = detail::integer_string(field(value, "num", where), where);
      Integer den = detail::integer_string(field(value, "den", where), where);
      if (den == 0) throw DocumentError(where + ": zero denominator");
      Rational v(num, den);
      v.canonicalize();
      if (c.count(idx)) throw DocumentError(where + ": coefficient " + idx.to_string() + " listed twice");
      c.emplace(std::move(idx), std::move(v));
    }
    doc.series.push_back(NamedSeries{name.get<std::string>(), TruncatedSeries(doc.base_point, doc.order, std::move(c))});
  }

  if (j.contains("residual")) {
    const auto& res = j.at("residual");
    if (!res.is_array()) throw DocumentError("document: 'residual' must be an array");
    for (const auto& r : res) {
      const auto& eq = field(r, "equation", "residual");
      const auto& ord = field(r, "certified_order", "residual");
      const auto& pass = field(r, "pass", "residual");
      if (!eq.is_string() || !ord.is_number_integer() || !pass.is_boolean())
        throw DocumentError("residual: malformed record");
      doc.residual.push_back(ResidualEntry{eq.get<std::string>(), ord.get<int>(), pass.get<bool>()});
    }
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    EmbeddedSystem sys;
    sys.unknowns = detail::string_list(field(s, "unknowns", "system"), "system.unknowns");
    if (s.contains("equations")) sys.equations = detail::string_list(s.at("equations"), "system.equations");
    if (s.contains("relations")) sys.relations = detail::string_list(s.at("relations"), "system.relations");
    doc.system = std::move(sys);
  }
  return doc;
}

inline SeriesDocument decode_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(std::string("document is not valid JSON: ") + e.what());
  }
  return decode(j);
}

}  // namespace dalg
