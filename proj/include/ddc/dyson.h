#pragma once

#include <stdexcept>

#include "ddc/expr.h"

namespace ddc {

enum class SourceSymbol { R2, R3, Field };
enum class Part { vf, rr };

struct UnsupportedOrder : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Full n-th order piece of a Heisenberg operator at tau,
//   O^(n) = i^n int_{tau>t1>...>tn} [H_I(tn), [..., [H_I(t1), O_f(tau)]]],
// with H_I = mu sum_xi R2^xi phi(x_xi). Field commutators are replaced by
// 2 chi^F. Atom letters keep the order in which they were produced.
OperatorExpr dyson_expansion(SourceSymbol sym, Site site, int order);

// Same as dyson_expansion for order <= 2. For order 3 only the part that is
// quadratic in the partner atom's R2 is kept; everything else is counted in
// the result's remainder by partner power. Orders above 3 throw.
OperatorExpr source_expansion(SourceSymbol sym, Site site, int order);

// n-th order (mu^n) variation rate of H_atom = omega R3^atom,
//   i mu omega (lambda phi [R2, R3] + (1 - lambda) [R2, R3] phi),
// with phi at the atom, vf taking the free field and rr the source parts.
OperatorExpr variation_rate(Site atom, Part part, int order, Rational lambda = Rational(1, 2));

// Replaces field words by sums of C^F / chi^F pairings (odd words vanish).
OperatorExpr vacuum_reduce(const OperatorExpr& e);

}  // namespace ddc
