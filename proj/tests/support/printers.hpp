#pragma once

#include <ostream>

#include "dalg/polynomial.hpp"
#include "dalg/rational_function.hpp"
#include "dalg/series.hpp"

// Readable gtest failure output.
namespace dalg {

inline void PrintTo(const TruncatedSeries& s, std::ostream* os) { *os << s.to_string() << " [order " << s.order() << "]"; }
inline void PrintTo(const Polynomial& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const RationalFunction& f, std::ostream* os) { *os << to_string(f); }

}  // namespace dalg
