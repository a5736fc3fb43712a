#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddc/evaluator.h"
#include "ddc/kernels.h"

namespace ddc {

struct InsufficientTruncation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DegenerateSpectrum : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FitFailure : std::runtime_error {
  FitFailure(const std::string& what, double cond) : std::runtime_error(what), condition(cond) {}
  double condition;
};

enum class Coupling { both, a_only, b_only };

// Atom levels 0 = g, 1 = e; photon occupations per mode.
struct FockState {
  int a = 0;
  int b = 0;
  std::vector<int> occupation;
};

struct OracleConfig {
  Geometry geometry;
  double mu = 0.01;
  ModeSet modes;
  int truncation = 2;
};

// H = H0 + mu V on the basis with at most `truncation` photons in total.
struct DiscreteHamiltonian {
  std::vector<FockState> basis;
  Eigen::VectorXd h0;
  Eigen::MatrixXcd v;  // mu = 1
  double mu = 0;
  Eigen::Index ground = 0;

  Eigen::MatrixXcd matrix() const;
};

DiscreteHamiltonian build_hamiltonian(const ModeSet& modes, const Geometry& g, double mu, int truncation,
                                      Coupling coupling = Coupling::both);
DiscreteHamiltonian build_hamiltonian(const OracleConfig& c, Coupling coupling = Coupling::both);

// Rayleigh-Schroedinger shifts of the unperturbed ground state.
double rs2_shift(const DiscreteHamiltonian& h);
double rs4_shift(const DiscreteHamiltonian& h);

using ShiftFn = std::function<double(const DiscreteHamiltonian&)>;
// shift(both atoms) - shift(A alone) - shift(B alone) on one mode set.
double interatomic_part(const ShiftFn& shift, const OracleConfig& c);

// Even polynomial fit E(mu) - E(0) = e2 mu^2 + e4 mu^4 + e6 mu^6 + e8 mu^8 to
// exact ground eigenvalues.
struct QuarticFit {
  double e0 = 0;
  double e2 = 0;
  double e4 = 0;
  double residual = 0;
  double condition = 0;
};
QuarticFit ed_quartic_fit(const OracleConfig& c, const std::vector<double>& mu, Coupling coupling = Coupling::both);
std::vector<double> default_fit_samples(const Geometry& g);

// Fourth-order interatomic shift from the two-photon path sum, with modes of
// equal frequency folded into shells. Needs no Fock basis, so it scales to
// dense three-dimensional mode sets.
double rs4_interatomic_shells(const ModeSet& modes, const Geometry& g, double mu);

struct OracleReport {
  double rs2 = 0;  // interatomic
  double rs4 = 0;  // interatomic
  double ed4 = 0;  // interatomic quartic coefficient times mu^4
  double rs4_total = 0;
  double ed4_total = 0;
  double ddc_vf = 0;
  double ddc_rr = 0;
  double ddc_total = 0;
  bool has_ddc = false;
};
OracleReport run_oracle(const OracleConfig& c);
std::string format_report(const OracleReport& r);

}  // namespace ddc
