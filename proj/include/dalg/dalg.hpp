#pragma once

#include "dalg/error.hpp"
#include "dalg/rational.hpp"
#include "dalg/multi_index.hpp"
#include "dalg/polynomial.hpp"
#include "dalg/rational_function.hpp"
#include "dalg/series.hpp"
#include "dalg/diffpoly.hpp"
#include "dalg/derivation_change.hpp"
#include "dalg/ck_solver.hpp"
#include "dalg/delta0_reduction.hpp"
#include "dalg/frontend/expression.hpp"
#include "dalg/frontend/system_file.hpp"
#include "dalg/frontend/series_document.hpp"
