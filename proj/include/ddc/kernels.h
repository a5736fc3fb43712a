#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddc {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

struct InvalidFrequency : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidModes : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidSeparation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Static worldline: proper time equals coordinate time.
struct Trajectory {
  Vec3 position{};
  double time_rate() const { return 1.0; }
};

enum class Parity { none, symmetric, antisymmetric };

struct SpectralComponent {
  cplx amplitude;
  double frequency;
};

// K(dt) = sum_j a_j exp(-i nu_j dt) with dt = t_first - t_second.
struct SpectralKernel {
  std::vector<SpectralComponent> components;
  Parity parity = Parity::none;

  cplx operator()(double dt) const { return (*this)(cplx(dt, 0.0)); }
  // Complex argument, e.g. dt - i eps for a damped mode sum.
  cplx operator()(cplx dt) const;
  // Sums components of equal frequency and drops exact zeros.
  void merge();
};

// Ground-state statistical functions of a two-level atom:
// C = cos(w dt) / 4, chi = -i sin(w dt) / 4.
struct AtomKernels {
  SpectralKernel c;
  SpectralKernel chi;
};
AtomKernels atomic_kernels(double omega);

struct Mode {
  Vec3 k{};
  double omega = 0;
  double g = 0;
};

// Periodic box modes with |k| <= cutoff along the first `dim` axes,
// g = (2 omega box^dim)^(-1/2). The k = 0 mode is excluded.
struct ModeSet {
  std::vector<Mode> modes;
  double box = 0;
  double cutoff = 0;
  int dim = 3;

  static ModeSet box_modes(double box, double cutoff, int dim);
  // Explicit wavevectors along x (1D toy sets), with the box coupling.
  static ModeSet line_modes(double box, const std::vector<int>& n);

  // Plain-text table: kx ky kz omega g, one mode per line.
  std::string table() const;
  static ModeSet from_table(const std::string& text, double box, int dim);
};

struct FieldKernels {
  SpectralKernel c;
  SpectralKernel chi;
};

// C^F(xa@t, xb@t') and chi^F(xa@t, xb@t') as functions of t - t'.
FieldKernels field_kernels_discrete(const ModeSet& modes, const Vec3& xa, const Vec3& xb);

// Massless scalar in free 3D space, points a distance L apart,
// W(z) = -1 / (4 pi^2 (z^2 - L^2)) at z = dt - i eps.
class ContinuumKernels {
 public:
  explicit ContinuumKernels(double separation);
  double separation() const { return l_; }
  cplx wightman(cplx z) const;
  cplx c(double dt, double eps) const;
  cplx chi(double dt, double eps) const;

 private:
  double l_;
};
ContinuumKernels field_kernels_continuum(double separation);

}  // namespace ddc
