#include <cmath>

#include <gtest/gtest.h>

#include "ddc/oracle.h"

using namespace ddc;

namespace {

OracleConfig toy(double mu = 0.01) {
  OracleConfig c;
  c.geometry = {1.0, 1.7, {0, 0, 0}, {0.9, 0, 0}};
  c.mu = mu;
  c.modes = ModeSet::box_modes(6, 2.1, 1);
  c.truncation = 2;
  return c;
}

}  // namespace

TEST(Hamiltonian, BasisSize) {
  auto c = toy();
  c.modes = ModeSet::line_modes(6, {1, -1});
  EXPECT_EQ(build_hamiltonian(c).basis.size(), 24u);
  // 4 atom states times C(4 + 3, 3) photon patterns
  auto d = toy();
  d.truncation = 3;
  EXPECT_EQ(build_hamiltonian(d).basis.size(), 140u);
}

TEST(Hamiltonian, UncoupledIsDiagonal) {
  auto c = toy(0.0);
  auto h = build_hamiltonian(c);
  Eigen::MatrixXcd m = h.matrix();
  EXPECT_EQ((m - Eigen::MatrixXcd(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_DOUBLE_EQ(h.h0[h.ground], -(1.0 + 1.7) / 2);
  EXPECT_DOUBLE_EQ(h.h0.minCoeff(), h.h0[h.ground]);
  EXPECT_EQ(h.ground, 0);
}

TEST(Hamiltonian, Hermitian) {
  auto h = build_hamiltonian(toy(0.3));
  Eigen::MatrixXcd m = h.matrix();
  EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

// Every coupling stays inside the truncated basis and changes the photon
// number and one atomic level by exactly one.
TEST(Hamiltonian, CouplingSelectionRules) {
  auto c = toy();
  c.truncation = 3;
  auto h = build_hamiltonian(c);
  for (Eigen::Index i = 0; i < h.v.rows(); ++i)
    for (Eigen::Index j = 0; j < h.v.cols(); ++j) {
      if (h.v(i, j) == cplx(0, 0)) continue;
      const auto &s = h.basis[i], &t = h.basis[j];
      int dn = 0, flips = std::abs(s.a - t.a) + std::abs(s.b - t.b);
      for (std::size_t k = 0; k < s.occupation.size(); ++k) dn += std::abs(s.occupation[k] - t.occupation[k]);
      EXPECT_EQ(dn, 1);
      EXPECT_EQ(flips, 1);
    }
}

TEST(Hamiltonian, InvalidInputs) {
  auto c = toy();
  c.truncation = 1;
  EXPECT_THROW(build_hamiltonian(c), InsufficientTruncation);
  c = toy();
  c.modes = ModeSet::from_table("1 0 0 0 0.2\n", 6, 1);
  EXPECT_THROW(rs2_shift(build_hamiltonian(c)), DegenerateSpectrum);
}

TEST(Perturbation, SecondOrderHasNoInteratomicPart) {
  EXPECT_LE(std::abs(interatomic_part(rs2_shift, toy())), 1e-14);
  EXPECT_LT(rs2_shift(build_hamiltonian(toy())), 0.0);
}

TEST(Perturbation, CouplingPowers) {
  auto c = toy(0.01), d = toy(0.02);
  EXPECT_NEAR(rs2_shift(build_hamiltonian(d)) / rs2_shift(build_hamiltonian(c)), 4.0, 1e-12);
  EXPECT_NEAR(interatomic_part(rs4_shift, d) / interatomic_part(rs4_shift, c), 16.0, 1e-9);
  EXPECT_EQ(rs4_shift(build_hamiltonian(toy(0.0))), 0.0);
}

TEST(Perturbation, ShellSumMatchesMatrixSum) {
  auto c = toy(0.5);
  double matrix = interatomic_part(rs4_shift, c);
  EXPECT_NEAR(rs4_interatomic_shells(c.modes, c.geometry, c.mu), matrix, 1e-12 * std::abs(matrix));
  c.modes = ModeSet::box_modes(6, 1.5, 3);
  c.geometry.xb = {0.6, 0.3, -0.2};
  matrix = interatomic_part(rs4_shift, c);
  EXPECT_NEAR(rs4_interatomic_shells(c.modes, c.geometry, c.mu), matrix, 1e-12 * std::abs(matrix));
}

TEST(Diagonalization, FitMatchesPerturbation) {
  auto c = toy(1.0);
  c.truncation = 3;
  auto fit = ed_quartic_fit(c, default_fit_samples(c.geometry));
  auto h = build_hamiltonian(c);
  EXPECT_NEAR(fit.e2, rs2_shift(h), 1e-8 * std::abs(rs2_shift(h)));
  EXPECT_NEAR(fit.e4, rs4_shift(h), 1e-4 * std::abs(rs4_shift(h)));
  EXPECT_LT(fit.condition, 1e10);
  EXPECT_THROW(ed_quartic_fit(c, {0.1, 0.2}), std::invalid_argument);
}

TEST(Report, CarriesInteratomicParts) {
  auto r = run_oracle(toy());
  EXPECT_LE(std::abs(r.rs2), 1e-14);
  EXPECT_NEAR(r.ed4, r.rs4, 1e-4 * std::abs(r.rs4));
  EXPECT_FALSE(r.has_ddc);
  auto text = format_report(r);
  EXPECT_NE(text.find("rs4 interatomic"), std::string::npos);
}
