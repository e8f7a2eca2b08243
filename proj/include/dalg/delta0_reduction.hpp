#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dalg/diffpoly.hpp"
#include "dalg/error.hpp"
#include "dalg/multi_index.hpp"

namespace dalg {

// Delta-integral relation P(x) = 0 with leader delta_1^r x.
class IntegralRelation {
 public:
  explicit IntegralRelation(DiffPoly relation) : relation_(std::move(relation)) {
    if (relation_.unknowns() != 1) throw DimensionError("an integral relation has a single unknown");
    RemarkStep step = eqremark_step(relation_, 0);
    order_ = step.order;
    separant_ = std::move(step.separant);
    q_ = std::move(step.q);
    linear_ = relation_.degree_in(leader(relation_, 0)) == 1;
  }

  const DiffPoly& relation() const noexcept { return relation_; }
  unsigned order() const noexcept { return order_; }
  const DiffPoly& separant() const noexcept { return separant_; }
  const DiffPoly& q() const noexcept { return q_; }
  // Linear in the leader: delta^gamma P can then also rewrite delta^gamma delta_1^r x.
  bool linear_in_leader() const noexcept { return linear_; }
  std::size_t derivations() const noexcept { return relation_.derivations(); }

  bool offending(const DerivativeVar& v) const {
    return linear_ ? v.index[0] >= order_ : v.index[0] > order_;
  }

 private:
  DiffPoly relation_;
  unsigned order_ = 0;
  DiffPoly separant_;
  DiffPoly q_;
  bool linear_ = false;
};

struct Reduction {
  DiffPoly reduced;
  unsigned separant_power = 0;
};

// Rewrites Q modulo [P] until no offending derivative is left, always taking
// the grlex-largest one first: delta^(beta - r e_1) P = s * delta^beta x + c_0,
// so s^d Q (d = degree of Q in delta^beta x) is congruent to Q with
// delta^beta x replaced by -c_0/s. A separant in the coefficient field is
// divided out directly and does not count towards k.
inline Reduction reduce_delta1(const DiffPoly& q, const IntegralRelation& rel) {
  if (q.unknowns() != 1 || q.derivations() != rel.derivations())
    throw ContextError("Q must share the relation's single unknown and derivations");
  Reduction out{q, 0};
  std::size_t m = rel.derivations();
  unsigned r = rel.order();
  for (;;) {
    std::optional<DerivativeVar> target;
    for (const auto& v : out.reduced.variables())
      if (rel.offending(v)) target = v;  // variables() is sorted, keep the largest
    if (!target) return out;

    DiffPoly d = dp_derive(rel.relation(), target->index - MultiIndex::unit(m, 0, r));
    auto rule = d.coefficients_in(*target);
    if (rule.size() != 2) throw DomainError("derived relation is not linear in " + target->index.to_string());
    const DiffPoly& s = rule[1];
    const DiffPoly& c0 = rule[0];
    auto parts = out.reduced.coefficients_in(*target);
    DiffPoly next(m, 1);
    if (s.is_constant()) {
      DiffPoly image = c0 * (-s.constant_coefficient().inverse());
      for (std::size_t e = parts.size(); e-- > 0;) next = next * image + parts[e];
    } else {
      // sum_e parts[e] (-c0)^e s^(d-e), Horner in (-c0, s).
      DiffPoly minus_c0 = -c0;
      unsigned deg = static_cast<unsigned>(parts.size() - 1);
      std::vector<DiffPoly> spow{DiffPoly::constant(m, 1, 1)};
      for (unsigned e = 1; e <= deg; ++e) spow.push_back(spow.back() * s);
      DiffPoly cpow = DiffPoly::constant(m, 1, 1);
      for (unsigned e = 0; e <= deg; ++e) {
        if (!parts[e].is_zero()) next += parts[e] * cpow * spow[deg - e];
        if (e < deg) cpow = cpow * minus_c0;
      }
      out.separant_power += deg;
    }
    out.reduced = std::move(next);
  }
}

// delta^(j, gamma) x: delta_1^j followed by the Delta_0 multi-index gamma.
struct GeneratorVar {
  unsigned j = 0;
  MultiIndex gamma;
  DerivativeVar var;
};

struct InverseSeparantGenerator {
  MultiIndex gamma;
  DiffRationalFunction value;  // delta^gamma (1/b2)
};

// Finite Delta_0-generators of A[1/(b1 b2)] over A_0[1/b1], truncated at a
// Delta_0-order bound. b1 comes from the lower-dimensional step and is only
// named; b2 is the separant.
struct GeneratorSet {
  std::string b1 = "b1";
  DiffPoly b2;
  std::vector<GeneratorVar> derivatives;
  std::vector<InverseSeparantGenerator> inverse_separant;
};

inline GeneratorSet fingen_generators(const IntegralRelation& rel, int bound) {
  if (bound < 0) throw DomainError("Delta_0 order bound must be nonnegative");
  std::size_t m = rel.derivations();
  GeneratorSet out;
  out.b2 = rel.separant();
  auto gammas = indices_up_to(m - 1, static_cast<unsigned>(bound));
  for (const auto& gamma : gammas)
    for (unsigned j = 0; j <= rel.order(); ++j)
      out.derivatives.push_back({j, gamma, DerivativeVar{0, gamma.with_inserted(0, j)}});
  DiffRationalFunction inv(DiffPoly::constant(m, 1, 1), rel.separant());
  for (const auto& gamma : gammas) {
    DiffRationalFunction d = inv;
    for (std::size_t i = 0; i < gamma.size(); ++i)
      for (unsigned k = 0; k < gamma[i]; ++k) d = dp_derive(d, i + 1);
    out.inverse_separant.push_back({gamma, std::move(d)});
  }
  return out;
}

}  // namespace dalg
