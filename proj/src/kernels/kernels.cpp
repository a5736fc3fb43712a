#include "ddc/kernels.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace ddc {

cplx SpectralKernel::operator()(cplx dt) const {
  cplx s = 0;
  for (const auto& c : components) s += c.amplitude * std::exp(cplx(0, -c.frequency) * dt);
  return s;
}

void SpectralKernel::merge() {
  std::stable_sort(components.begin(), components.end(),
            [](const SpectralComponent& a, const SpectralComponent& b) { return a.frequency < b.frequency; });
  std::vector<SpectralComponent> out;
  for (const auto& c : components) {
    if (!out.empty() && out.back().frequency == c.frequency)
      out.back().amplitude += c.amplitude;
    else
      out.push_back(c);
  }
  std::erase_if(out, [](const SpectralComponent& c) { return c.amplitude == cplx(0, 0); });
  components = std::move(out);
}

AtomKernels atomic_kernels(double omega) {
  if (!(omega > 0)) throw InvalidFrequency("atomic transition frequency must be positive");
  AtomKernels k;
  k.c.components = {{0.125, omega}, {0.125, -omega}};
  k.c.parity = Parity::symmetric;
  k.chi.components = {{0.125, omega}, {-0.125, -omega}};
  k.chi.parity = Parity::antisymmetric;
  return k;
}

ModeSet ModeSet::box_modes(double box, double cutoff, int dim) {
  if (!(box > 0) || !(cutoff > 0) || dim < 1 || dim > 3)
    throw InvalidModes("box, cutoff and dimension must be positive (dim 1..3)");
  ModeSet s;
  s.box = box;
  s.cutoff = cutoff;
  s.dim = dim;
  const double dk = 2 * std::numbers::pi / box;
  const int n = static_cast<int>(std::floor(cutoff / dk));
  const double vol = std::pow(box, dim);
  const int ny = dim >= 2 ? n : 0;
  const int nz = dim >= 3 ? n : 0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -ny; j <= ny; ++j) {
      for (int l = -nz; l <= nz; ++l) {
        long long n2 = 1LL * i * i + 1LL * j * j + 1LL * l * l;
        if (n2 == 0) continue;
        // from the integer norm so equal shells give bitwise equal omega
        double w = dk * std::sqrt(static_cast<double>(n2));
        if (w > cutoff) continue;
        s.modes.push_back({{dk * i, dk * j, dk * l}, w, 1.0 / std::sqrt(2 * w * vol)});
      }
    }
  }
  if (s.modes.empty()) throw InvalidModes("no modes below the cutoff");
  return s;
}

ModeSet ModeSet::line_modes(double box, const std::vector<int>& n) {
  if (!(box > 0)) throw InvalidModes("box length must be positive");
  ModeSet s;
  s.box = box;
  s.dim = 1;
  const double dk = 2 * std::numbers::pi / box;
  for (int i : n) {
    if (i == 0) throw InvalidModes("the k = 0 mode has no coupling");
    double w = dk * std::abs(i);
    s.modes.push_back({{dk * i, 0, 0}, w, 1.0 / std::sqrt(2 * w * box)});
    s.cutoff = std::max(s.cutoff, w);
  }
  if (s.modes.empty()) throw InvalidModes("empty mode list");
  return s;
}

std::string ModeSet::table() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& m : modes) os << m.k[0] << ' ' << m.k[1] << ' ' << m.k[2] << ' ' << m.omega << ' ' << m.g << '\n';
  return os.str();
}

ModeSet ModeSet::from_table(const std::string& text, double box, int dim) {
  ModeSet s;
  s.box = box;
  s.dim = dim;
  std::istringstream is(text);
  Mode m;
  while (is >> m.k[0] >> m.k[1] >> m.k[2] >> m.omega >> m.g) {
    s.modes.push_back(m);
    s.cutoff = std::max(s.cutoff, m.omega);
  }
  if (s.modes.empty()) throw InvalidModes("mode table is empty");
  return s;
}

FieldKernels field_kernels_discrete(const ModeSet& modes, const Vec3& xa, const Vec3& xb) {
  if (modes.modes.empty()) throw InvalidModes("empty mode set");
  FieldKernels k;
  const Vec3 d{xa[0] - xb[0], xa[1] - xb[1], xa[2] - xb[2]};
  for (const auto& m : modes.modes) {
    double kd = m.k[0] * d[0] + m.k[1] * d[1] + m.k[2] * d[2];
    // <phi(xa,t) phi(xb,t')> = sum g^2 e^{i k.d} e^{-i w (t - t')}
    cplx fwd = m.g * m.g * std::exp(cplx(0, kd));
    cplx bwd = m.g * m.g * std::exp(cplx(0, -kd));
    k.c.components.push_back({0.5 * fwd, m.omega});
    k.c.components.push_back({0.5 * bwd, -m.omega});
    k.chi.components.push_back({0.5 * fwd, m.omega});
    k.chi.components.push_back({-0.5 * bwd, -m.omega});
  }
  k.c.merge();
  k.chi.merge();
  k.c.parity = Parity::symmetric;
  k.chi.parity = Parity::antisymmetric;
  return k;
}

ContinuumKernels::ContinuumKernels(double separation) : l_(separation) {
  if (!(separation > 0)) throw InvalidSeparation("separation must be positive");
}

cplx ContinuumKernels::wightman(cplx z) const {
  return -1.0 / (4 * std::numbers::pi * std::numbers::pi * (z * z - l_ * l_));
}

// <phi(x') phi(x)> is W at -dt - i eps.
cplx ContinuumKernels::c(double dt, double eps) const {
  return 0.5 * (wightman({dt, -eps}) + wightman({-dt, -eps}));
}

cplx ContinuumKernels::chi(double dt, double eps) const {
  return 0.5 * (wightman({dt, -eps}) - wightman({-dt, -eps}));
}

ContinuumKernels field_kernels_continuum(double separation) { return ContinuumKernels(separation); }

}  // namespace ddc
