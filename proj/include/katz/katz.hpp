#pragma once

#include "katz/arithmetic.hpp"
#include "katz/checkpoint.hpp"
#include "katz/classical_forms.hpp"
#include "katz/eis_family.hpp"
#include "katz/errors.hpp"
#include "katz/formats.hpp"
#include "katz/katz_basis.hpp"
#include "katz/katz_expand.hpp"
#include "katz/sweep.hpp"
#include "katz/sweep_state.hpp"
#include "katz/valuation_solver.hpp"
