#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddc/effective.h"
#include "ddc/kernels.h"

namespace ddc {

struct RequiresRegulator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fully averaged term: coefficient * mu^p * omega_A^a * omega_B^b times a
// nested integral of kernel products. No operator letters are left.
struct ScalarTerm {
  cplx coefficient;
  int mu = 0;
  std::array<int, 2> omega{};
  std::vector<int> domain;  // domain[v - 1] = upper bound of v (0 = tau)
  std::vector<Kernel> kernels;
};

std::vector<ScalarTerm> scalar_terms(const OperatorExpr& e);
std::vector<ScalarTerm> scalar_terms(const std::vector<IntegralTerm>& terms);

// Static two-atom geometry with atoms on worldlines xa and xb.
struct Geometry {
  double omega_a = 1;
  double omega_b = 1;
  Vec3 xa{};
  Vec3 xb{};
};

// Resolves symbolic kernels to spectral ones for a discrete mode set.
class KernelSet {
 public:
  KernelSet(const ModeSet& modes, const Geometry& g);
  const SpectralKernel& resolve(const Kernel& k) const;
  const Geometry& geometry() const { return geom_; }

 private:
  Geometry geom_;
  AtomKernels atom_[2];
  FieldKernels field_[2][2];
};

// prefactor * prod(amplitudes) * prod_v 1 / (sum_{u <= v} (i Omega_u) + n_v eps),
// summed over every combination of kernel components, with damping
// exp(eps (t_v - tau)) on each variable. Times are measured from tau.
cplx nested_integral_spectral(const ScalarTerm& t, const KernelSet& k, double eps);
// One pass over the component combinations for a whole ladder.
std::vector<cplx> nested_integral_spectral(const ScalarTerm& t, const KernelSet& k,
                                           const std::vector<double>& eps);
// Exact eps -> 0 limit: each component combination is a rational function
// of eps, so its eps^0 Laurent coefficient is taken in closed form. The
// largest |coefficient| of a negative power is reported; it must vanish for
// the limit to exist.
struct LaurentLimit {
  cplx value;
  double singular = 0;
};
LaurentLimit nested_integral_limit(const ScalarTerm& t, const KernelSet& k);
// Smallest nonzero |Omega| of any partial sum, and the number of exactly
// resonant partial sums.
struct ResonanceScan {
  double min_nonzero = 0;
  std::size_t resonant = 0;
};
ResonanceScan scan_resonances(const ScalarTerm& t, const KernelSet& k);

// Value without the coefficient, mu, omega factors.
cplx term_scale(const ScalarTerm& t, const Geometry& g, double mu);

struct Extrapolation {
  cplx value;
  double error = 0;
  std::size_t levels = 0;
};
// Richardson extrapolation of f(eps) to eps = 0 with the ansatz
// f = sum_{p >= -singular} c_p eps^p. Resonant partial sums make single
// terms carry 1/eps^k pieces (k up to the nesting depth) that cancel only to
// roundoff, so the ansatz keeps them out of c_0. The error estimate is the
// change of c_0 when the smallest rung is dropped (infinite without a spare
// rung).
Extrapolation richardson(const std::vector<double>& eps, const std::vector<cplx>& f, int singular = 0);

struct QuadratureConfig {
  std::vector<double> ladder;  // strictly decreasing; empty = automatic
  int ladder_levels = 8;
  // eps_0 = scale * smallest nonzero |Omega|. The damped denominators
  // i Omega + n eps put poles at |eps| = |Omega| / n (n <= 3), so the
  // ladder has to start well inside that radius for the fit to converge.
  double ladder_scale = 0.01;
  double window = 40;              // direct quadrature: T = window / eps
  int nodes_per_panel = 10;  // 7, 10, 15 or 20
  double panel = 2.0;
  double tolerance = 1e-9;         // imaginary residual, relative
};

struct QuadratureResult {
  cplx value;
  double error = 0;
  long long evaluations = 0;
};
// Brute-force nested composite Gauss-Legendre over [tau - T, parent] with
// the same damping. The error estimate is the change under half the node
// density (panels twice as wide) plus the exp(-eps T) cut-off tail.
QuadratureResult direct_time_quadrature(const ScalarTerm& t, const KernelSet& k, double T, double eps,
                                        const QuadratureConfig& q = {});

struct EvalConfig {
  Geometry geometry;
  double mu = 0.01;
  ModeSet modes;
  QuadratureConfig quad;
};

struct PotentialResult {
  double separation = 0;
  cplx vf;
  cplx rr;
  double total = 0;
  double imag_residual = 0;
  double error = 0;
  double epsilon_final = 0;
  std::vector<double> ladder;
  double mu = 0;
  double omega_a = 0;
  double omega_b = 0;
};

// Fourth-order averaged term sets derived by the symbolic core.
const std::vector<ScalarTerm>& potential_terms(Part part);

// Automatic ladder from the smallest nonzero frequency sum of the terms.
std::vector<double> choose_ladder(const std::vector<ScalarTerm>& terms, const KernelSet& k,
                                  const QuadratureConfig& q);

// Sum of terms extrapolated to eps = 0 over the given ladder.
Extrapolation evaluate_terms(const std::vector<ScalarTerm>& terms, const KernelSet& k, double mu,
                             const std::vector<double>& ladder);

cplx delta_e_vf(const EvalConfig& c);
cplx delta_e_rr(const EvalConfig& c);
// Throws InconsistencyError when |Im| > tolerance * |total|.
PotentialResult delta_e_total(const EvalConfig& c);

// Atom B at x = (L, 0, 0), atom A at the origin. Rows that fail keep NaN
// values and the message in `errors`.
struct SweepRow {
  PotentialResult result;
  std::string error;
};
std::vector<SweepRow> sweep_separation(const EvalConfig& base, const std::vector<double>& separations);

std::string csv_header();
std::string csv_row(const PotentialResult& r);

}  // namespace ddc
