#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ddc/evaluator.h"

using namespace ddc;

namespace {

Geometry toy_geometry() { return {1.0, 1.7, {0, 0, 0}, {0.9, 0, 0}}; }

EvalConfig toy_config() {
  EvalConfig c;
  c.geometry = toy_geometry();
  c.mu = 0.01;
  c.modes = ModeSet::box_modes(6, 2.1, 1);
  return c;
}

ScalarTerm term(std::vector<int> domain, std::vector<Kernel> kernels) {
  return {cplx(1, 0), 0, {0, 0}, std::move(domain), std::move(kernels)};
}

Kernel atom_kernel(KernelKind kind, int ta, int tb) { return {kind, Site::A, ta, Site::A, tb}; }

}  // namespace

// int_{-inf}^{tau} dt1 e^{eps (t1 - tau)} chi^A(tau - t1)
TEST(Spectral, SingleVariable) {
  KernelSet k(ModeSet::line_modes(6, {1}), toy_geometry());
  auto t = term({0}, {atom_kernel(KernelKind::AtomChi, 0, 1)});
  const double w = 1.0, eps = 0.3;
  cplx expect = 0.125 / cplx(eps, w) - 0.125 / cplx(eps, -w);
  EXPECT_NEAR(std::abs(nested_integral_spectral(t, k, eps) - expect), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(nested_integral_limit(t, k).value - cplx(0, -0.25 / w)), 0.0, 1e-15);
}

// Chain tau > t1 > t2 with K1(tau - t1) K2(t1 - t2): the outer damping
// enters twice, 1 / ((i nu1 + 2 eps) (i nu2 + eps)).
TEST(Spectral, TwoVariableChain) {
  Geometry g = toy_geometry();
  KernelSet k(ModeSet::line_modes(6, {1}), g);
  auto t = term({0, 1}, {atom_kernel(KernelKind::AtomC, 0, 1), {KernelKind::AtomChi, Site::B, 1, Site::B, 2}});
  const double eps = 0.2;
  cplx expect = 0;
  for (const auto& c1 : atomic_kernels(g.omega_a).c.components)
    for (const auto& c2 : atomic_kernels(g.omega_b).chi.components)
      expect += c1.amplitude * c2.amplitude / (cplx(2 * eps, c1.frequency) * cplx(eps, c2.frequency));
  EXPECT_NEAR(std::abs(nested_integral_spectral(t, k, eps) - expect), 0.0, 1e-15);
}

TEST(Spectral, ResonanceNeedsRegulator) {
  KernelSet k(ModeSet::line_modes(6, {1}), toy_geometry());
  auto t = term({0}, {atom_kernel(KernelKind::AtomC, 0, 1), atom_kernel(KernelKind::AtomC, 0, 1)});
  EXPECT_THROW(nested_integral_spectral(t, k, 0.0), RequiresRegulator);
  EXPECT_NO_THROW(nested_integral_spectral(t, k, 0.1));
  EXPECT_EQ(scan_resonances(t, k).resonant, 2u);
}

TEST(Spectral, BadDomainRejected) {
  KernelSet k(ModeSet::line_modes(6, {1}), toy_geometry());
  EXPECT_THROW(nested_integral_spectral(term({1}, {}), k, 0.1), std::invalid_argument);
  EXPECT_THROW(nested_integral_spectral(term({0}, {atom_kernel(KernelKind::AtomC, 0, 2)}), k, 0.1),
               std::invalid_argument);
}

TEST(Spectral, Linearity) {
  auto c = toy_config();
  KernelSet k(c.modes, c.geometry);
  const auto& rr = potential_terms(Part::rr);
  const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025, 0.0125};
  cplx sum = 0;
  for (const auto& t : rr) sum += evaluate_terms({t}, k, c.mu, ladder).value;
  EXPECT_NEAR(std::abs(evaluate_terms(rr, k, c.mu, ladder).value - sum), 0.0, 1e-12 * std::abs(sum));
  auto doubled = rr;
  for (auto& t : doubled) t.coefficient *= 2.0;
  EXPECT_NEAR(std::abs(evaluate_terms(doubled, k, c.mu, ladder).value - 2.0 * sum), 0.0, 1e-12 * std::abs(sum));
}

TEST(Richardson, RecoversSingularAnsatz) {
  std::vector<double> eps;
  std::vector<cplx> f;
  for (double e = 0.4; e > 0.01; e /= 2) {
    eps.push_back(e);
    f.push_back(cplx(2.0, -1.0) + 3.0 * e - e * e + 0.5 / e - 0.01 / (e * e));
  }
  auto r = richardson(eps, f, 2);
  EXPECT_NEAR(std::abs(r.value - cplx(2.0, -1.0)), 0.0, 1e-9);
  EXPECT_THROW(richardson({0.1}, {1.0, 2.0}), std::invalid_argument);
}

// Single terms keep 1/eps pieces that only cancel within each part, so the
// comparison is made on the part sums.
TEST(Richardson, AgreesWithExactLimit) {
  auto c = toy_config();
  KernelSet k(c.modes, c.geometry);
  for (Part p : {Part::vf, Part::rr}) {
    const auto& terms = potential_terms(p);
    cplx exact = 0;
    for (const auto& t : terms) exact += term_scale(t, c.geometry, 1.0) * nested_integral_limit(t, k).value;
    auto ext = evaluate_terms(terms, k, 1.0, choose_ladder(terms, k, c.quad));
    EXPECT_LT(std::abs(ext.value - exact), 1e-10 * std::abs(exact));
    EXPECT_LT(ext.error, 1e-7 * std::abs(exact));
  }
}

TEST(Quadrature, MatchesSpectralOnSmallTerm) {
  Geometry g = toy_geometry();
  KernelSet k(ModeSet::line_modes(6, {1}), g);
  auto t = term({0, 1}, {atom_kernel(KernelKind::AtomC, 0, 2), {KernelKind::FieldChi, Site::A, 1, Site::B, 2}});
  const double eps = 0.5;
  cplx spectral = nested_integral_spectral(t, k, eps);
  QuadratureConfig q;
  auto r = direct_time_quadrature(t, k, 40 / eps, eps, q);
  EXPECT_LT(std::abs(r.value - spectral), 1e-9 * std::abs(spectral));
  EXPECT_LT(r.error, 1e-6 * std::abs(spectral));
  // a shorter window cuts off a visible tail
  auto shortw = direct_time_quadrature(t, k, 4 / eps, eps, q);
  EXPECT_GT(std::abs(shortw.value - spectral), std::abs(r.value - spectral));
}

TEST(Quadrature, VanishingKernelGivesZero) {
  KernelSet k(ModeSet::line_modes(6, {1}), toy_geometry());
  auto t = term({0}, {atom_kernel(KernelKind::AtomChi, 1, 1)});
  EXPECT_NEAR(std::abs(direct_time_quadrature(t, k, 20, 1.0).value), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(nested_integral_spectral(t, k, 1.0)), 0.0, 1e-15);
}

TEST(Potential, MirrorSymmetric) {
  auto c = toy_config();
  auto m = c;
  std::swap(m.geometry.omega_a, m.geometry.omega_b);
  std::swap(m.geometry.xa, m.geometry.xb);
  double a = delta_e_total(c).total, b = delta_e_total(m).total;
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(Potential, ScalesAsFourthPowerOfCoupling) {
  auto c = toy_config();
  double a = delta_e_total(c).total;
  c.mu *= 2;
  double b = delta_e_total(c).total;
  EXPECT_NEAR(b / a, 16.0, 1e-9);
}

TEST(Potential, PartsAddUp) {
  auto c = toy_config();
  auto r = delta_e_total(c);
  EXPECT_NEAR(r.vf.real() + r.rr.real(), r.total, 1e-12 * std::abs(r.vf));
  EXPECT_NEAR(std::abs(delta_e_vf(c) - r.vf), 0.0, 1e-12 * std::abs(r.vf));
  EXPECT_NEAR(std::abs(delta_e_rr(c) - r.rr), 0.0, 1e-12 * std::abs(r.rr));
  EXPECT_LE(r.imag_residual, 1e-9 * std::abs(r.total));
  EXPECT_EQ(r.ladder.size(), 8u);
}

TEST(Potential, RejectsBadLadder) {
  auto c = toy_config();
  c.quad.ladder = {0.1, 0.2};
  EXPECT_THROW(delta_e_total(c), std::invalid_argument);
}

TEST(Sweep, RowsAndCsv) {
  auto c = toy_config();
  auto rows = sweep_separation(c, {0.5, 0.9, -1.0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].error.empty());
  EXPECT_NEAR(rows[1].result.total, delta_e_total(c).total, 1e-15);
  EXPECT_FALSE(rows[2].error.empty());
  EXPECT_TRUE(std::isnan(rows[2].result.total));
  EXPECT_EQ(csv_header(), "L,deltaE_vf,deltaE_rr,deltaE_total,imag_residual,err_est,epsilon_final");
  std::string line = csv_row(rows[1].result);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  std::istringstream is(line);
  double l = 0;
  is >> l;
  EXPECT_DOUBLE_EQ(l, 0.9);
}

TEST(Terms, ScalarTermsNeedAveraging) {
  EXPECT_THROW(scalar_terms(effective_hamiltonian(Part::vf, 4).terms), std::invalid_argument);
  EXPECT_EQ(potential_terms(Part::vf).size(), 2u);
  EXPECT_EQ(potential_terms(Part::rr).size(), 6u);
}
