#include "ddc/evaluator.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

namespace ddc {

namespace {

int check_domain(const std::vector<int>& domain) {
  for (std::size_t v = 1; v <= domain.size(); ++v)
    if (domain[v - 1] < 0 || domain[v - 1] >= static_cast<int>(v))
      throw std::invalid_argument("integration bounds must point to an earlier variable or tau");
  return static_cast<int>(domain.size());
}

// subtree[v] lists the variables bounded (directly or not) by v, v included.
std::vector<std::vector<int>> subtrees(const std::vector<int>& domain) {
  int n = static_cast<int>(domain.size());
  std::vector<std::vector<int>> sub(n + 1);
  for (int u = 1; u <= n; ++u)
    for (int v = u; v != 0; v = domain[v - 1]) sub[v].push_back(u);
  return sub;
}

struct Prepared {
  int n = 0;
  std::vector<const SpectralKernel*> kernels;
  std::vector<Kernel> symbols;
  std::vector<std::vector<int>> sub;
};

Prepared prepare(const ScalarTerm& t, const KernelSet& k) {
  Prepared p;
  p.n = check_domain(t.domain);
  p.sub = subtrees(t.domain);
  for (const auto& ker : t.kernels) {
    if (ker.ta < 0 || ker.tb < 0 || ker.ta > p.n || ker.tb > p.n)
      throw std::invalid_argument("kernel time outside the integration variables");
    p.kernels.push_back(&k.resolve(ker));
    p.symbols.push_back(ker);
  }
  return p;
}

// Walks every component combination; f(amp, omega) gets omega[v] = the
// frequency carried by variable v (kernel e^{-i nu (ta - tb)}).
template <class F>
void for_each_combination(const Prepared& p, F&& f) {
  std::vector<double> omega(p.n + 1, 0.0);
  const std::size_t nk = p.kernels.size();
  auto rec = [&](auto&& self, std::size_t j, cplx amp) -> void {
    if (j == nk) {
      f(amp, omega);
      return;
    }
    const Kernel& s = p.symbols[j];
    for (const auto& c : p.kernels[j]->components) {
      omega[s.ta] -= c.frequency;
      omega[s.tb] += c.frequency;
      self(self, j + 1, amp * c.amplitude);
      omega[s.ta] += c.frequency;
      omega[s.tb] -= c.frequency;
    }
  };
  rec(rec, 0, cplx(1, 0));
}

}  // namespace

std::vector<ScalarTerm> scalar_terms(const OperatorExpr& e) {
  std::vector<ScalarTerm> out;
  for (const auto& [m, c] : e.terms()) {
    if (!m.atoms.empty() || !m.fields.empty())
      throw std::invalid_argument("term still carries operators; average it first");
    if (!m.phase.empty()) throw std::invalid_argument("phase factors are not supported by the evaluator");
    out.push_back({c.value(), m.mu, m.omega, m.domain, m.kernels});
  }
  return out;
}

std::vector<ScalarTerm> scalar_terms(const std::vector<IntegralTerm>& terms) {
  return scalar_terms(flatten(terms));
}

KernelSet::KernelSet(const ModeSet& modes, const Geometry& g) : geom_(g) {
  atom_[0] = atomic_kernels(g.omega_a);
  atom_[1] = atomic_kernels(g.omega_b);
  const Vec3* x[2] = {&g.xa, &g.xb};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) field_[i][j] = field_kernels_discrete(modes, *x[i], *x[j]);
}

const SpectralKernel& KernelSet::resolve(const Kernel& k) const {
  if (k.a == Site::X || k.b == Site::X) throw std::invalid_argument("kernel at a generic field point");
  int a = atom_index(k.a), b = atom_index(k.b);
  switch (k.kind) {
    case KernelKind::FieldC: return field_[a][b].c;
    case KernelKind::FieldChi: return field_[a][b].chi;
    case KernelKind::AtomC:
    case KernelKind::AtomChi:
      if (a != b) throw std::invalid_argument("atomic kernel across atoms");
      return k.kind == KernelKind::AtomC ? atom_[a].c : atom_[a].chi;
  }
  throw std::invalid_argument("unknown kernel kind");
}

std::vector<cplx> nested_integral_spectral(const ScalarTerm& t, const KernelSet& k,
                                           const std::vector<double>& eps) {
  Prepared p = prepare(t, k);
  // Resonant combinations are O(1/eps^k) and cancel within the sum, so the
  // rounding of each rung grows as eps shrinks; extended precision holds
  // it below the extrapolation error.
  using lcplx = std::complex<long double>;
  std::vector<lcplx> sum(eps.size(), 0.0L);
  std::vector<long double> part(p.n + 1);
  for_each_combination(p, [&](cplx amp, const std::vector<double>& omega) {
    for (int v = 1; v <= p.n; ++v) {
      long double s = 0;
      for (int u : p.sub[v]) s += omega[u];
      part[v] = s;
    }
    for (std::size_t e = 0; e < eps.size(); ++e) {
      lcplx den = 1;
      for (int v = 1; v <= p.n; ++v) {
        lcplx d(static_cast<long double>(p.sub[v].size()) * eps[e], part[v]);
        if (d == lcplx(0, 0)) throw RequiresRegulator("resonant frequency sum needs eps > 0");
        den *= d;
      }
      sum[e] += lcplx(amp) / den;
    }
  });
  return {sum.begin(), sum.end()};
}

cplx nested_integral_spectral(const ScalarTerm& t, const KernelSet& k, double eps) {
  return nested_integral_spectral(t, k, std::vector<double>{eps})[0];
}

LaurentLimit nested_integral_limit(const ScalarTerm& t, const KernelSet& k) {
  Prepared p = prepare(t, k);
  double scale = 0;
  for (const auto* ker : p.kernels)
    for (const auto& c : ker->components) scale = std::max(scale, std::abs(c.frequency));
  const double zero = 1e-12 * std::max(scale, 1.0);
  LaurentLimit out;
  std::vector<cplx> singular(p.n + 1, 0.0);
  std::vector<cplx> h(p.n + 1);
  for_each_combination(p, [&](cplx amp, const std::vector<double>& omega) {
    // prod_v 1 / (i Omega_v + n_v eps): resonant factors give 1 / (n_v eps),
    // the others expand as 1 / (i Omega_v) * sum_j (-n_v eps / (i Omega_v))^j.
    std::fill(h.begin(), h.end(), cplx(0, 0));
    h[0] = 1;
    cplx lead = amp;
    int r = 0;
    for (int v = 1; v <= p.n; ++v) {
      double s = 0;
      for (int u : p.sub[v]) s += omega[u];
      const double n = static_cast<double>(p.sub[v].size());
      if (std::abs(s) <= zero) {
        ++r;
        lead /= n;
        continue;
      }
      cplx io(0, s);
      lead /= io;
      cplx a = -n / io;
      for (int j = 1; j <= p.n; ++j) h[j] += a * h[j - 1];
    }
    // the eps^0 coefficient takes the eps^r term of the regular factors
    out.value += lead * h[r];
    for (int q = 1; q <= r; ++q) singular[q] += lead * h[r - q];
  });
  for (int q = 1; q <= p.n; ++q) out.singular = std::max(out.singular, std::abs(singular[q]));
  return out;
}

ResonanceScan scan_resonances(const ScalarTerm& t, const KernelSet& k) {
  Prepared p = prepare(t, k);
  ResonanceScan r{std::numeric_limits<double>::infinity(), 0};
  double scale = 0;
  for (const auto* ker : p.kernels)
    for (const auto& c : ker->components) scale = std::max(scale, std::abs(c.frequency));
  const double zero = 1e-12 * std::max(scale, 1.0);
  for_each_combination(p, [&](cplx, const std::vector<double>& omega) {
    for (int v = 1; v <= p.n; ++v) {
      double s = 0;
      for (int u : p.sub[v]) s += omega[u];
      s = std::abs(s);
      if (s <= zero)
        ++r.resonant;
      else
        r.min_nonzero = std::min(r.min_nonzero, s);
    }
  });
  return r;
}

cplx term_scale(const ScalarTerm& t, const Geometry& g, double mu) {
  return t.coefficient * std::pow(mu, t.mu) * std::pow(g.omega_a, t.omega[0]) * std::pow(g.omega_b, t.omega[1]);
}

Extrapolation richardson(const std::vector<double>& eps, const std::vector<cplx>& f, int singular) {
  if (eps.empty() || eps.size() != f.size()) throw std::invalid_argument("richardson: ladder and values differ");
  if (singular < 0) throw std::invalid_argument("richardson: negative singular order");
  const int n = static_cast<int>(eps.size());
  if (n < singular + 1) throw std::invalid_argument("richardson: ladder too short for the singular terms");
  // f(eps) = sum_{p >= -singular} c_p eps^p through the first m rungs; c_0 is
  // the limit. Powers of eps / eps_0 keep the columns comparable.
  auto fit = [&](int m) {
    Eigen::MatrixXcd a(m, m);
    Eigen::VectorXcd y(m);
    for (int i = 0; i < m; ++i) {
      double x = eps[i] / eps[0];
      for (int j = 0; j < m; ++j) a(i, j) = std::pow(x, j - singular);
      y[i] = f[i];
    }
    Eigen::VectorXcd c = a.colPivHouseholderQr().solve(y);
    return c[singular];
  };
  Extrapolation out{fit(n), 0, static_cast<std::size_t>(n)};
  // no spare rung: the limit is unchecked
  out.error = n > singular + 1 ? std::abs(out.value - fit(n - 1)) : std::numeric_limits<double>::infinity();
  return out;
}

namespace {

struct Rule {
  std::vector<double> x, w;  // on [-1, 1]
};

template <int N>
Rule boost_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  Rule r;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(w[i]);
    if (a[i] != 0) {
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
    }
  }
  return r;
}

Rule gauss_rule(int n) {
  switch (n) {
    case 7: return boost_rule<7>();
    case 10: return boost_rule<10>();
    case 15: return boost_rule<15>();
    case 20: return boost_rule<20>();
  }
  throw std::invalid_argument("nodes per panel must be one of 7, 10, 15, 20");
}

// Kernels are evaluated from per-variable tables of exp(-i nu t) over the
// distinct frequencies, so each node costs one exponential per frequency.
struct Quadrature {
  const Prepared& p;
  const Rule& rule;
  double lower, eps, panel;
  std::vector<double> freqs;
  // per kernel: (frequency index, amplitude) pairs
  std::vector<std::vector<std::pair<std::size_t, cplx>>> comps;
  std::vector<std::vector<std::size_t>> at_level;  // kernels closed at variable v
  std::vector<std::vector<cplx>> phase;            // phase[v][f] = exp(-i nu_f t_v)
  long long count = 0;

  Quadrature(const Prepared& pp, const Rule& r, double T, double e, double pan)
      : p(pp), rule(r), lower(-T), eps(e), panel(pan) {
    for (const auto* k : p.kernels)
      for (const auto& c : k->components) freqs.push_back(c.frequency);
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    for (const auto* k : p.kernels) {
      comps.emplace_back();
      for (const auto& c : k->components) {
        auto f = std::lower_bound(freqs.begin(), freqs.end(), c.frequency) - freqs.begin();
        comps.back().emplace_back(static_cast<std::size_t>(f), c.amplitude);
      }
    }
    at_level.resize(p.n + 1);
    for (std::size_t j = 0; j < p.symbols.size(); ++j)
      at_level[std::max(p.symbols[j].ta, p.symbols[j].tb)].push_back(j);
    phase.assign(p.n + 1, std::vector<cplx>(freqs.size(), cplx(1, 0)));
  }

  void set_time(int v, double t) {
    for (std::size_t f = 0; f < freqs.size(); ++f) phase[v][f] = std::exp(cplx(0, -freqs[f] * t));
  }

  cplx kernel_product(int v) const {
    cplx prod = 1;
    for (std::size_t j : at_level[v]) {
      const Kernel& s = p.symbols[j];
      cplx k = 0;
      // exp(-i nu (ta - tb)) = phase(ta) * conj(phase(tb))
      for (const auto& [f, amp] : comps[j]) k += amp * phase[s.ta][f] * std::conj(phase[s.tb][f]);
      prod *= k;
    }
    return prod;
  }

  cplx integrate(int v, const std::vector<double>& t, const std::vector<int>& domain) {
    if (v > p.n) {
      ++count;
      return 1;
    }
    double upper = t[domain[v - 1]];
    double len = upper - lower;
    if (len <= 0) return 0;
    int panels = std::max(1, static_cast<int>(std::ceil(len / panel)));
    double h = len / panels;
    std::vector<double> tt = t;
    cplx sum = 0;
    for (int q = 0; q < panels; ++q) {
      double mid = lower + (q + 0.5) * h;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        tt[v] = mid + 0.5 * h * rule.x[i];
        set_time(v, tt[v]);
        cplx f = kernel_product(v);
        if (f == cplx(0, 0)) continue;
        sum += 0.5 * h * rule.w[i] * std::exp(eps * tt[v]) * f * integrate(v + 1, tt, domain);
      }
    }
    return sum;
  }
};

cplx run_quadrature(const Prepared& p, const ScalarTerm& term, const Rule& rule, double T, double eps,
                    double panel, long long& count) {
  Quadrature q(p, rule, T, eps, panel);
  std::vector<double> t(p.n + 1, 0.0);
  q.set_time(0, 0.0);
  cplx outer = q.kernel_product(0);
  cplx v = outer == cplx(0, 0) ? cplx(0, 0) : outer * q.integrate(1, t, term.domain);
  count += q.count;
  return v;
}

}  // namespace

QuadratureResult direct_time_quadrature(const ScalarTerm& t, const KernelSet& k, double T, double eps,
                                        const QuadratureConfig& cfg) {
  if (!(T > 0)) throw std::invalid_argument("quadrature window must be positive");
  if (eps < 0) throw std::invalid_argument("regulator must be non-negative");
  Prepared p = prepare(t, k);
  QuadratureResult r;
  if (!(cfg.panel > 0)) throw std::invalid_argument("panel width must be positive");
  Rule rule = gauss_rule(cfg.nodes_per_panel);
  r.value = run_quadrature(p, t, rule, T, eps, cfg.panel, r.evaluations);
  // half the node density: panels twice as wide
  cplx low = run_quadrature(p, t, rule, T, eps, 2 * cfg.panel, r.evaluations);
  // the window cuts off a tail damped by at least exp(-eps T)
  r.error = std::abs(r.value - low) + std::exp(-eps * T) * std::abs(r.value);
  return r;
}

const std::vector<ScalarTerm>& potential_terms(Part part) {
  static const std::vector<ScalarTerm> vf =
      scalar_terms(ground_state_average(effective_hamiltonian(Part::vf, 4).terms));
  static const std::vector<ScalarTerm> rr =
      scalar_terms(ground_state_average(effective_hamiltonian(Part::rr, 4).terms));
  return part == Part::vf ? vf : rr;
}

std::vector<double> choose_ladder(const std::vector<ScalarTerm>& terms, const KernelSet& k,
                                  const QuadratureConfig& q) {
  if (!q.ladder.empty()) {
    for (std::size_t i = 0; i < q.ladder.size(); ++i)
      if (!(q.ladder[i] > 0) || (i > 0 && !(q.ladder[i] < q.ladder[i - 1])))
        throw std::invalid_argument("epsilon ladder must be positive and strictly decreasing");
    return q.ladder;
  }
  double w = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) w = std::min(w, scan_resonances(t, k).min_nonzero);
  if (!std::isfinite(w)) w = 1;
  std::vector<double> ladder;
  double e = q.ladder_scale * w;
  for (int i = 0; i < q.ladder_levels; ++i, e *= 0.5) ladder.push_back(e);
  return ladder;
}

namespace {

int max_depth(const std::vector<ScalarTerm>& terms) {
  std::size_t d = 0;
  for (const auto& t : terms) d = std::max(d, t.domain.size());
  return static_cast<int>(d);
}

std::vector<cplx> ladder_values(const std::vector<ScalarTerm>& terms, const KernelSet& k, double mu,
                                const std::vector<double>& ladder) {
  std::vector<cplx> sum(ladder.size(), 0.0);
  for (const auto& t : terms) {
    cplx s = term_scale(t, k.geometry(), mu);
    auto v = nested_integral_spectral(t, k, ladder);
    for (std::size_t i = 0; i < ladder.size(); ++i) sum[i] += s * v[i];
  }
  return sum;
}

}  // namespace

Extrapolation evaluate_terms(const std::vector<ScalarTerm>& terms, const KernelSet& k, double mu,
                             const std::vector<double>& ladder) {
  return richardson(ladder, ladder_values(terms, k, mu, ladder), max_depth(terms));
}

namespace {

cplx delta_e_part(const EvalConfig& c, Part part) {
  KernelSet k(c.modes, c.geometry);
  const auto& terms = potential_terms(part);
  return evaluate_terms(terms, k, c.mu, choose_ladder(terms, k, c.quad)).value;
}

}  // namespace

cplx delta_e_vf(const EvalConfig& c) { return delta_e_part(c, Part::vf); }
cplx delta_e_rr(const EvalConfig& c) { return delta_e_part(c, Part::rr); }

PotentialResult delta_e_total(const EvalConfig& c) {
  KernelSet k(c.modes, c.geometry);
  const auto& vf = potential_terms(Part::vf);
  const auto& rr = potential_terms(Part::rr);
  std::vector<ScalarTerm> all(vf);
  all.insert(all.end(), rr.begin(), rr.end());
  PotentialResult r;
  r.ladder = choose_ladder(all, k, c.quad);
  auto fv = ladder_values(vf, k, c.mu, r.ladder);
  auto fr = ladder_values(rr, k, c.mu, r.ladder);
  std::vector<cplx> ft(fv.size());
  for (std::size_t i = 0; i < ft.size(); ++i) ft[i] = fv[i] + fr[i];
  const int s = max_depth(all);
  Extrapolation ev = richardson(r.ladder, fv, s), er = richardson(r.ladder, fr, s), et = richardson(r.ladder, ft, s);
  const Vec3& d = c.geometry.xb;
  const Vec3& a = c.geometry.xa;
  r.separation = std::sqrt((d[0] - a[0]) * (d[0] - a[0]) + (d[1] - a[1]) * (d[1] - a[1]) + (d[2] - a[2]) * (d[2] - a[2]));
  r.vf = ev.value;
  r.rr = er.value;
  r.total = et.value.real();
  r.imag_residual = std::abs(et.value.imag());
  r.error = et.error;
  r.epsilon_final = r.ladder.back();
  r.mu = c.mu;
  r.omega_a = c.geometry.omega_a;
  r.omega_b = c.geometry.omega_b;
  if (r.imag_residual > c.quad.tolerance * std::abs(et.value)) {
    std::ostringstream os;
    os << "imaginary residual " << r.imag_residual << " exceeds " << c.quad.tolerance << " of |dE| = "
       << std::abs(et.value);
    throw InconsistencyError(os.str());
  }
  return r;
}

std::vector<SweepRow> sweep_separation(const EvalConfig& base, const std::vector<double>& separations) {
  std::vector<SweepRow> rows;
  for (double L : separations) {
    SweepRow row;
    row.result.separation = L;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.result.vf = row.result.rr = cplx(nan, nan);
    row.result.total = row.result.imag_residual = row.result.error = row.result.epsilon_final = nan;
    try {
      if (!(L > 0)) throw InvalidSeparation("separation must be positive");
      EvalConfig c = base;
      c.geometry.xb = {c.geometry.xa[0] + L, c.geometry.xa[1], c.geometry.xa[2]};
      row.result = delta_e_total(c);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_header() { return "L,deltaE_vf,deltaE_rr,deltaE_total,imag_residual,err_est,epsilon_final"; }

std::string csv_row(const PotentialResult& r) {
  std::ostringstream os;
  os << std::setprecision(15) << r.separation << ',' << r.vf.real() << ',' << r.rr.real() << ',' << r.total << ','
     << r.imag_residual << ',' << r.error << ',' << r.epsilon_final;
  return os.str();
}

}  // namespace ddc
