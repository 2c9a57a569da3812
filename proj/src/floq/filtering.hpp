#pragma once

#include <vector>

#include "floq/lattice.hpp"
#include "floq/trajectory.hpp"

namespace floq {

/// Continuum density g^2 / (pi sqrt(4J^2 - (omega - lambda)^2)) inside the band, 0 outside.
double spectral_density(const ChainSpec& chain, double omega);

/// Histogram of the finite-L mode set: weight |g_k|^2 per bin divided by the bin width.
struct BinnedDensity {
  double omega_min = 0.0;
  double width = 0.0;
  std::vector<double> values;

  double at(double omega) const;
  double centre(std::size_t i) const { return omega_min + (static_cast<double>(i) + 0.5) * width; }
};

BinnedDensity binned_spectral_density(const ChainSpec& chain, double bin_width);

/// f(x) ~ sum_b G_b dw exp(-i w_b x), the inverse transform of a binned density.
std::vector<cplx> density_inverse_transform(const BinnedDensity& density, const std::vector<double>& x);

/// epsilon_t(omega) = (2 pi)^{-1/2} int_0^t exp(i theta(s)) exp(i omega s) ds.
cplx control_amplitude(const DriveProtocol& drive, double t, double omega);

/// |epsilon_t(omega)|^2 on a grid.
std::vector<double> control_spectrum(const DriveProtocol& drive, double t, const std::vector<double>& omega_grid);

struct FilterOptions {
  double rel_tol = 1e-9;
  int grid_points = 2001;
  double padding = 6.0;                   // report grid spans the band +- padding (units of J)
  std::vector<double> spectrum_times;     // times at which control spectra are reported
};

struct FilterReport {
  double omega_a = 0.0;
  std::vector<double> times;
  std::vector<double> Q;
  std::vector<double> R;
  std::vector<double> c0_abs;
  std::vector<double> omega_grid;
  std::vector<double> noise_spectrum;                 // G(omega + omega_a)
  std::vector<double> control_times;
  std::vector<std::vector<double>> control_spectra;   // one row per control time
  double max_quadrature_error = 0.0;
};

/// R(t) Q(t) = 2 pi int G(omega + omega_a) |epsilon_t(omega)|^2 d omega, evaluated with the
/// substitution omega + omega_a = lambda + 2J sin(phi) that removes the band-edge singularities.
double filtered_exponent(const ChainSpec& chain, const DriveProtocol& drive, double t, double rel_tol,
                         double* error_out = nullptr);

/// |c0(t)| = exp(-R(t) Q(t) / 2) with Q(t) = t.
FilterReport filtered_population(const ChainSpec& chain, const DriveProtocol& drive, const std::vector<double>& times,
                                 const FilterOptions& options = {});

/// F_n = (1/T) int_0^T exp(-i theta(t)) exp(-i n omega t) dt.
cplx renorm_factor(const DriveProtocol& drive, int n);

struct F0Root {
  double a2 = 0.0;
  double residual = 0.0;  // |F0| at the root
};

/// Zeros of |F0|^2 for the symmetric family a1 = -a2 with fixed (T, tau), searched in [lo, hi].
/// An empty result means no root in the interval.
std::vector<F0Root> find_f0_zeros(double period, double tau, double lo, double hi, double threshold = 1e-12);

/// Static model with splitting lambda + Abar and coupling g |F0|; tagged approximate.
Trajectory renormalized_dynamics(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                                 const LatticeOptions& options = {});

}  // namespace floq
