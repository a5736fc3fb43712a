#pragma once

// Hand-transcribed reference expressions. Time labels: 0 = tau, k = t_k.

#include "ddc/expr.h"

namespace golden {

// Expansion pieces for atom A operators and the field at a generic point.
// Third order: only the pieces quadratic in R2^B.
ddc::OperatorExpr r2(int order);
ddc::OperatorExpr r3(int order);
ddc::OperatorExpr field(int order);
// Field third order in the four-term layout (three of them sum to zero).
ddc::OperatorExpr field3_four_terms();

// Effective Hamiltonians, atom-A origin only; mirror with swap_atoms.
ddc::OperatorExpr effective_rr2();
ddc::OperatorExpr effective_vf4();
ddc::OperatorExpr effective_rr4_term(int k);  // k = 1..6
ddc::OperatorExpr effective_rr4();

// Potentials (atom-A origin only).
ddc::OperatorExpr potential_vf4();
ddc::OperatorExpr potential_rr4_term(int k);
ddc::OperatorExpr potential_rr4();

ddc::OperatorExpr rate_rr4_term(int k);
ddc::OperatorExpr with_mirror(const ddc::OperatorExpr& e);

}  // namespace golden
