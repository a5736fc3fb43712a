#pragma once

#include <map>
#include <string>
#include <vector>

#include "ddc/dyson.h"

namespace ddc {

// prefactor * mu^mu * int_domain prod(kernels) * atoms
struct IntegralTerm {
  CRational prefactor{1};
  int mu = 0;
  std::vector<int> domain;
  std::vector<Kernel> kernels;
  OperatorExpr atoms;  // letters only; first coefficient normalised to 1
  Site origin = Site::A;
};

// Groups monomials by (domain, kernels) up to relabelling of integration
// variables. Within a group the atom polynomial is averaged over the
// relabellings that fix (domain, kernels), so the grouping is canonical.
std::vector<IntegralTerm> group_terms(const OperatorExpr& e, Site origin);
OperatorExpr flatten(const std::vector<IntegralTerm>& terms);

struct EffectiveHamiltonian {
  std::vector<IntegralTerm> terms;
  // Set when the requested part has no piece depending on both atoms.
  bool atom_independent = false;
  // Vacuum-reduced rate monomials left out, keyed by partner R2 power.
  std::map<int, std::size_t> remainder;
  // Rate monomials with H inside the word (not of the [X, H] + {W, H} form).
  std::size_t non_generator = 0;

  OperatorExpr expr() const { return flatten(terms); }
  std::size_t count(Site origin) const;
};

// Per-atom route: X = (Y_A + Y_B) / 2 with i[Y_xi, H_xi] read off each atom's
// interatomic rate. Orders 2 and 4.
EffectiveHamiltonian effective_hamiltonian(Part part, int order);

// Two-atom route: read X off the summed rate written against H_S. Supports
// order 2 and (vf, 4); the latter moves half of each term onto the partner
// atom by integration by parts before reading off.
EffectiveHamiltonian effective_hamiltonian_two_atom(Part part, int order);

struct UnsupportedPattern : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// <g_A g_B| . |g_A g_B>: pairs of same-atom R2 letters become C^xi + chi^xi.
std::vector<IntegralTerm> ground_state_average(const std::vector<IntegralTerm>& terms);

// One line per term.
std::string dump(const std::vector<IntegralTerm>& terms);
std::string format_term(const IntegralTerm& t);

}  // namespace ddc
