#include "ddc/oracle.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace ddc {

namespace {

void patterns(std::vector<int>& occ, std::size_t mode, int left, std::vector<std::vector<int>>& out) {
  if (mode == occ.size()) {
    out.push_back(occ);
    return;
  }
  for (int n = 0; n <= left; ++n) {
    occ[mode] = n;
    patterns(occ, mode + 1, left - n, out);
  }
  occ[mode] = 0;
}

}  // namespace

Eigen::MatrixXcd DiscreteHamiltonian::matrix() const {
  Eigen::MatrixXcd m = mu * v;
  m.diagonal() += h0.cast<cplx>();
  return m;
}

DiscreteHamiltonian build_hamiltonian(const ModeSet& modes, const Geometry& g, double mu, int truncation,
                                      Coupling coupling) {
  if (truncation < 2) throw InsufficientTruncation("fourth order needs at most two photons: truncation >= 2");
  if (modes.modes.empty()) throw InvalidModes("empty mode set");
  const std::size_t nm = modes.modes.size();
  std::vector<std::vector<int>> occs;
  std::vector<int> occ(nm, 0);
  patterns(occ, 0, truncation, occs);
  // vacuum first, then by total photon number
  std::stable_sort(occs.begin(), occs.end(), [](const auto& x, const auto& y) {
    int sx = 0, sy = 0;
    for (int n : x) sx += n;
    for (int n : y) sy += n;
    return sx < sy;
  });
  DiscreteHamiltonian h;
  h.mu = mu;
  std::map<std::tuple<int, int, std::vector<int>>, Eigen::Index> index;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (const auto& o : occs) {
        index[{a, b, o}] = static_cast<Eigen::Index>(h.basis.size());
        h.basis.push_back({a, b, o});
      }
  const Eigen::Index n = static_cast<Eigen::Index>(h.basis.size());
  h.h0.resize(n);
  h.v = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = h.basis[i];
    double e = g.omega_a * (s.a - 0.5) + g.omega_b * (s.b - 0.5);
    for (std::size_t k = 0; k < nm; ++k) e += modes.modes[k].omega * s.occupation[k];
    h.h0[i] = e;
  }
  h.ground = index.at({0, 0, std::vector<int>(nm, 0)});
  for (int xi = 0; xi < 2; ++xi) {
    if ((xi == 0 && coupling == Coupling::b_only) || (xi == 1 && coupling == Coupling::a_only)) continue;
    const Vec3& x = xi == 0 ? g.xa : g.xb;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = h.basis[i];
      int level = xi == 0 ? s.a : s.b;
      // R2 = (i/2)(R- - R+): <g|R2|e> = i/2, <e|R2|g> = -i/2
      cplx r2 = level == 1 ? cplx(0, 0.5) : cplx(0, -0.5);
      int na = xi == 0 ? 1 - s.a : s.a;
      int nb = xi == 1 ? 1 - s.b : s.b;
      int total = 0;
      for (int o : s.occupation) total += o;
      for (std::size_t k = 0; k < nm; ++k) {
        const Mode& m = modes.modes[k];
        double kx = m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2];
        std::vector<int> o = s.occupation;
        if (o[k] > 0) {
          o[k] -= 1;
          h.v(index.at({na, nb, o}), i) += r2 * m.g * std::sqrt(double(s.occupation[k])) * std::exp(cplx(0, kx));
          o[k] += 1;
        }
        if (total < truncation) {
          o[k] += 1;
          h.v(index.at({na, nb, o}), i) += r2 * m.g * std::sqrt(double(o[k])) * std::exp(cplx(0, -kx));
        }
      }
    }
  }
  return h;
}

DiscreteHamiltonian build_hamiltonian(const OracleConfig& c, Coupling coupling) {
  return build_hamiltonian(c.modes, c.geometry, c.mu, c.truncation, coupling);
}

namespace {

// 1 / (E_0 - E_k) off the ground state, 0 on it.
Eigen::VectorXd resolvent(const DiscreteHamiltonian& h) {
  Eigen::VectorXd r(h.h0.size());
  const double e0 = h.h0[h.ground];
  const double scale = std::max(1.0, h.h0.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    if (k == h.ground) {
      r[k] = 0;
      continue;
    }
    double d = e0 - h.h0[k];
    if (std::abs(d) < 1e-12 * scale) throw DegenerateSpectrum("intermediate state degenerate with the ground state");
    r[k] = 1 / d;
  }
  return r;
}

}  // namespace

double rs2_shift(const DiscreteHamiltonian& h) {
  Eigen::VectorXd r = resolvent(h);
  Eigen::VectorXcd v0 = h.v.col(h.ground);
  return h.mu * h.mu * (v0.cwiseAbs2().array() * r.array()).sum();
}

double rs4_shift(const DiscreteHamiltonian& h) {
  Eigen::VectorXd r = resolvent(h);
  Eigen::VectorXcd v0 = h.v.col(h.ground);
  Eigen::VectorXcd t = v0.cwiseProduct(r.cast<cplx>());
  t = (h.v * t).cwiseProduct(r.cast<cplx>());
  t = (h.v * t).cwiseProduct(r.cast<cplx>());
  cplx chain = v0.dot(t);
  double e2 = (v0.cwiseAbs2().array() * r.array()).sum();
  double norm = (v0.cwiseAbs2().array() * r.array().square()).sum();
  return std::pow(h.mu, 4) * (chain.real() - e2 * norm);
}

double interatomic_part(const ShiftFn& shift, const OracleConfig& c) {
  return shift(build_hamiltonian(c, Coupling::both)) - shift(build_hamiltonian(c, Coupling::a_only)) -
         shift(build_hamiltonian(c, Coupling::b_only));
}

std::vector<double> default_fit_samples(const Geometry& g) {
  std::vector<double> mu;
  // large enough for mu^4 to stand clear of eigenvalue roundoff, small
  // enough for four even powers to absorb the rest of the series
  double top = 0.3 * std::min(g.omega_a, g.omega_b);
  for (int j = 1; j <= 8; ++j) mu.push_back(top * j / 8);
  return mu;
}

QuarticFit ed_quartic_fit(const OracleConfig& c, const std::vector<double>& mu, Coupling coupling) {
  if (mu.size() < 5) throw std::invalid_argument("quartic fit needs at least five coupling samples");
  DiscreteHamiltonian h = build_hamiltonian(c.modes, c.geometry, 0, c.truncation, coupling);
  auto ground = [&](double m) {
    h.mu = m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  };
  QuarticFit f;
  f.e0 = ground(0);
  const double top = *std::max_element(mu.begin(), mu.end());
  const int p = 4;
  Eigen::MatrixXd a(mu.size(), p);
  Eigen::VectorXd y(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double x = (mu[i] / top) * (mu[i] / top);
    for (int j = 0; j < p; ++j) a(i, j) = std::pow(x, j + 1);
    y[i] = ground(mu[i]) - f.e0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  f.condition = s[0] / s[s.size() - 1];
  if (!(f.condition < 1e10)) throw FitFailure("ill-conditioned quartic fit", f.condition);
  Eigen::VectorXd coef = svd.solve(y);
  f.residual = (a * coef - y).cwiseAbs().maxCoeff();
  f.e2 = coef[0] / (top * top);
  f.e4 = coef[1] / std::pow(top, 4);
  return f;
}

double rs4_interatomic_shells(const ModeSet& modes, const Geometry& g, double mu) {
  if (modes.modes.empty()) throw InvalidModes("empty mode set");
  // shells of equal frequency; G[s][x][y] = sum_k g^2 exp(i k.(x_y - x_x))
  std::vector<const Mode*> sorted;
  for (const auto& m : modes.modes) sorted.push_back(&m);
  std::stable_sort(sorted.begin(), sorted.end(), [](const Mode* p, const Mode* q) { return p->omega < q->omega; });
  struct Shell {
    double omega;
    cplx G[2][2];
  };
  std::vector<Shell> shells;
  const Vec3* x[2] = {&g.xa, &g.xb};
  for (const Mode* m : sorted) {
    if (shells.empty() || std::abs(m->omega - shells.back().omega) > 1e-12 * m->omega)
      shells.push_back({m->omega, {{0, 0}, {0, 0}}});
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a) {
        double kd = 0;
        for (int i = 0; i < 3; ++i) kd += m->k[i] * ((*x[a])[i] - (*x[c])[i]);
        shells.back().G[c][a] += m->g * m->g * std::exp(cplx(0, kd));
      }
  }
  const double w[2] = {g.omega_a, g.omega_b};
  // Atom orders with each atom flipped twice; the photon is created at c*
  // and annihilated at a*.
  static const int seqs[6][4] = {{0, 0, 1, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}, {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 1, 0, 0}};
  // 0 create p1, 1 annihilate p1, 2 create p2, 3 annihilate p2
  static const int photon[3][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 2, 1, 3}};
  cplx sum = 0;
  for (const auto& seq : seqs) {
    for (const auto& pat : photon) {
      int at[4];
      for (int j = 0; j < 4; ++j) at[pat[j]] = seq[j];
      for (const auto& s1 : shells) {
        for (const auto& s2 : shells) {
          cplx amp = s1.G[at[0]][at[1]] * s2.G[at[2]][at[3]];
          double den = 1;
          bool excited[2] = {false, false};
          double photons = 0;
          bool skip = false;
          for (int j = 0; j < 3; ++j) {
            excited[seq[j]] = !excited[seq[j]];
            double wp = pat[j] < 2 ? s1.omega : s2.omega;
            photons += (pat[j] % 2 == 0) ? wp : -wp;
            double e = photons + (excited[0] ? w[0] : 0) + (excited[1] ? w[1] : 0);
            if (std::abs(e) < 1e-12) {
              skip = true;
              break;
            }
            den *= -e;
          }
          if (!skip) sum += amp / den;
        }
      }
    }
  }
  // each atom contributes <g|R2|e><e|R2|g> = 1/4
  double e4 = sum.real() / 16;
  double e2[2] = {0, 0}, norm[2] = {0, 0};
  for (const auto& s : shells)
    for (int xi = 0; xi < 2; ++xi) {
      double v2 = s.G[xi][xi].real() / 4;
      e2[xi] -= v2 / (w[xi] + s.omega);
      norm[xi] += v2 / ((w[xi] + s.omega) * (w[xi] + s.omega));
    }
  e4 -= e2[0] * norm[1] + e2[1] * norm[0];
  return std::pow(mu, 4) * e4;
}

OracleReport run_oracle(const OracleConfig& c) {
  OracleReport r;
  r.rs2 = interatomic_part(rs2_shift, c);
  r.rs4 = interatomic_part(rs4_shift, c);
  r.rs4_total = rs4_shift(build_hamiltonian(c));
  OracleConfig ed = c;
  ed.truncation = std::max(c.truncation, 3);
  auto samples = default_fit_samples(c.geometry);
  double m4 = std::pow(c.mu, 4);
  QuarticFit both = ed_quartic_fit(ed, samples, Coupling::both);
  r.ed4_total = both.e4 * m4;
  r.ed4 = (both.e4 - ed_quartic_fit(ed, samples, Coupling::a_only).e4 -
           ed_quartic_fit(ed, samples, Coupling::b_only).e4) * m4;
  return r;
}

namespace {

double rel(double a, double b) { return b == 0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

}  // namespace

std::string format_report(const OracleReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  auto row = [&](const char* name, double v, const char* against, double ref) {
    os << std::left << std::setw(22) << name << std::right << std::setw(22) << v;
    if (against) os << "   rel diff vs " << against << " " << std::setprecision(3) << rel(v, ref) << std::setprecision(12);
    os << '\n';
  };
  row("rs2 interatomic", r.rs2, nullptr, 0);
  row("rs4 total", r.rs4_total, nullptr, 0);
  row("ed-quartic total", r.ed4_total, "rs4 total", r.rs4_total);
  row("rs4 interatomic", r.rs4, nullptr, 0);
  row("ed-quartic interatomic", r.ed4, "rs4", r.rs4);
  if (r.has_ddc) {
    row("ddc-vf", r.ddc_vf, nullptr, 0);
    row("ddc-rr", r.ddc_rr, nullptr, 0);
    row("ddc-total", r.ddc_total, "rs4", r.rs4);
  }
  return os.str();
}

}  // namespace ddc
