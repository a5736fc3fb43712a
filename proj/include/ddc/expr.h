#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddc/rational.h"

namespace ddc {

// Worldline a symbol lives on. X is a generic field point.
enum class Site : std::uint8_t { A, B, X };

inline Site partner(Site s) { return s == Site::A ? Site::B : Site::A; }
inline int atom_index(Site s) { return s == Site::A ? 0 : 1; }

// Time labels: 0 is the observation time tau, k > 0 are integration
// variables, -1 is the reference time tau0.
inline constexpr int kTau = 0;
inline constexpr int kTau0 = -1;

// System is the total free Hamiltonian H_S (no atom label).
enum class Op : std::uint8_t { R2, R3, Raise, Lower, System };

struct AtomSymbol {
  Op op = Op::R2;
  Site atom = Site::A;
  int time = kTau;
  auto operator<=>(const AtomSymbol&) const = default;
};

struct FieldSymbol {
  Site site = Site::A;
  int time = kTau;
  auto operator<=>(const FieldSymbol&) const = default;
};

enum class KernelKind : std::uint8_t { FieldC, FieldChi, AtomC, AtomChi };

// K(a@ta, b@tb). Stored with (a, ta) <= (b, tb); chi kernels flip sign when
// swapped, C kernels are symmetric.
struct Kernel {
  KernelKind kind = KernelKind::FieldC;
  Site a = Site::A;
  int ta = kTau;
  Site b = Site::A;
  int tb = kTau;
  auto operator<=>(const Kernel&) const = default;
};

// Returns the oriented kernel and the sign picked up (0 for chi(x, x)).
std::pair<Kernel, int> make_kernel(KernelKind kind, Site a, int ta, Site b, int tb);

bool is_symmetric(KernelKind k);

// exp(i * power * omega_atom * (t - tau0))
struct PhaseFactor {
  int time = 0;
  Site atom = Site::A;
  int power = 0;
  auto operator<=>(const PhaseFactor&) const = default;
};

// Everything but the coefficient. Variables 1..n carry upper bounds in
// `domain` (domain[v - 1] is the bound of v, 0 meaning tau); every lower
// bound is tau0.
struct Monomial {
  int mu = 0;
  std::array<int, 2> omega{};
  std::vector<AtomSymbol> atoms;
  std::vector<FieldSymbol> fields;
  std::vector<Kernel> kernels;
  std::vector<int> domain;
  std::vector<PhaseFactor> phase;

  int num_vars() const { return static_cast<int>(domain.size()); }
  auto operator<=>(const Monomial&) const = default;
};

// Relabels variables through map (map[old] = new, map[0] = 0). Kernels are
// re-oriented; the returned sign collects the chi flips.
int relabel(Monomial& m, const std::vector<int>& map);

// Keeps kernels and phase sorted and drops zero phase powers.
void tidy(Monomial& m);

// Product of monomials; the right factor's variables are renumbered after
// the left's.
Monomial concat(const Monomial& l, const Monomial& r);

class OperatorExpr {
 public:
  using Terms = std::map<Monomial, CRational>;

  OperatorExpr() = default;
  static OperatorExpr scalar(CRational c);
  static OperatorExpr atom(Op op, Site atom, int time = kTau);
  static OperatorExpr field(Site site, int time = kTau);

  void add(const Monomial& m, const CRational& c);
  void add(Monomial&& m, const CRational& c);

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  OperatorExpr& operator+=(const OperatorExpr& o);
  OperatorExpr& operator-=(const OperatorExpr& o);
  OperatorExpr& operator*=(const CRational& c);
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
  friend OperatorExpr operator*(OperatorExpr a, const CRational& c) { return a *= c; }
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
  friend bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
    return a.terms_ == b.terms_;
  }

  // Dropped-term counts keyed by partner-atom monopole power.
  std::map<int, std::size_t> remainder;

 private:
  Terms terms_;
};

inline bool operator==(const CRational& a, long long b) { return a == CRational(b); }

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr anticommutator(const OperatorExpr& a, const OperatorExpr& b);

// Applies f to every monomial, summing the resulting expressions.
template <class F>
OperatorExpr transform(const OperatorExpr& e, F&& f) {
  OperatorExpr out;
  for (const auto& [m, c] : e.terms()) out += f(m, c);
  return out;
}

// Number of Op::R2 letters of the given atom.
int monopole_power(const Monomial& m, Site atom);

// Stable A-before-B sort between H_S letters (A and B letters commute).
void sort_atom_letters(std::vector<AtomSymbol>& atoms);

// Splits tree domains into sums of chains labelled 1 > 2 > ... in time.
OperatorExpr expand_chains(const OperatorExpr& e);

// Formal normal form: chain domains, atom letters A-before-B between H_S
// letters, field words sorted with [phi, phi] = 2 chi^F, kernels sorted.
// Two expressions are equal as integrals iff their normal forms match.
OperatorExpr normal_form(const OperatorExpr& e);

// su(2) reduction on top of the normal form: every atom factor becomes one of
// I, R+, R-, R3 at tau0 with explicit phases; H_S -> omega_A R3^A + omega_B R3^B.
OperatorExpr canonicalize(const OperatorExpr& e);

OperatorExpr adjoint(const OperatorExpr& e);
bool is_hermitian(const OperatorExpr& e);

// Exchanges the labels A and B everywhere.
OperatorExpr swap_atoms(const OperatorExpr& e);

// Builder helpers for hand-written expressions.
OperatorExpr r2(Site atom, int time);
OperatorExpr r3(Site atom);
OperatorExpr phi(Site site, int time);
OperatorExpr kernel(KernelKind kind, Site a, int ta, Site b, int tb);
// Attaches a tree domain (bounds[v - 1] = upper bound of v) and mu power.
OperatorExpr integrate(const OperatorExpr& e, const std::vector<int>& bounds, int mu);

std::string time_name(int t);
std::string to_string(const AtomSymbol& s);
std::string to_string(const Kernel& k);
std::string to_string(const Monomial& m);
std::string to_string(const OperatorExpr& e);

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ddc
