#pragma once

// Physical model: impurity spin (site 0) attached to an XX chain (sites 1..L),
// restricted to the single-excitation sector. Units: J = hbar = 1 unless the
// caller picks another J; all energies and times are plain doubles.

#include <complex>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace floq {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class KernelMode {
  PaperPlaneWave,  // k = 2 pi n / L, |g_k|^2 = g^2/L; periodic ring closure on the lattice
  OpenChainExact,  // k = pi n / (L+1), |g_k|^2 = 2 g^2 sin^2 k / (L+1); open chain
};

const char* to_string(KernelMode mode) noexcept;
KernelMode kernel_mode_from_string(const std::string& text);

struct ChainSpec {
  int L = 800;
  double J = 1.0;
  double g = 1.0;
  double lambda = 20.0;
  KernelMode kernel_mode = KernelMode::OpenChainExact;

  static constexpr double x0 = 1.0;

  void validate() const;
  bool periodic() const noexcept { return kernel_mode == KernelMode::PaperPlaneWave; }
  int sites() const noexcept { return L + 1; }
};

struct StepDrive {
  double a1 = 0.0;
  double a2 = 0.0;
  double tau = 0.0;
  double period = 1.0;
};

struct HarmonicDrive {
  double period = 1.0;
  std::map<int, cplx> coefficients;  // omega_l, must satisfy omega_{-l} = conj(omega_l)
};

/// Periodic modulation A(t) of the impurity splitting.
///
/// Step convention: A = a1 on (nT, nT+tau], A = a2 on (nT+tau, (n+1)T].
/// Harmonic convention: A(t) = sum_l omega_l exp(i l omega t).
class DriveProtocol {
 public:
  DriveProtocol() : DriveProtocol(step(0.0, 0.0, 0.5, 1.0)) {}

  static DriveProtocol step(double a1, double a2, double tau, double period);
  static DriveProtocol constant(double amplitude, double period);
  static DriveProtocol harmonics(double period, std::map<int, cplx> coefficients);

  bool is_step() const noexcept { return std::holds_alternative<StepDrive>(variant_); }
  const StepDrive& step_params() const;
  const HarmonicDrive& harmonic_params() const;

  double period() const noexcept;
  double omega() const noexcept { return 2.0 * pi / period(); }
  double mean() const noexcept;  // Abar = omega_0

  double value(double t) const;
  /// Integral of A over [0, t].
  double phase(double t) const;
  /// theta(t) = integral of (A - Abar) over [0, t]; periodic in t.
  double detuning_phase(double t) const;
  /// omega_l = (1/T) integral_0^T A(t) exp(-i l omega t) dt.
  cplx harmonic(int l) const;
  /// Largest |A(t)| (exact for step drives, a bound for harmonic tables).
  double max_abs() const;

  void validate() const;

 private:
  explicit DriveProtocol(std::variant<StepDrive, HarmonicDrive> v) : variant_(std::move(v)) {}
  std::variant<StepDrive, HarmonicDrive> variant_;
};

/// Single-excitation Hamiltonian: tridiagonal part plus an optional ring closure
/// coupling chain sites 1 and L.
struct EffectiveHamiltonian {
  Eigen::VectorXd diag;
  Eigen::VectorXd offdiag;
  double ring_closure = 0.0;

  int size() const noexcept { return static_cast<int>(diag.size()); }
  bool tridiagonal() const noexcept { return ring_closure == 0.0; }
  Eigen::MatrixXd dense() const;
  /// y = H x, O(n).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
};

/// diag(lambda + A, lambda, ..., lambda), offdiag (g, J, ..., J). Global
/// multiples of the identity are dropped.
EffectiveHamiltonian build_effective_hamiltonian(const ChainSpec& chain, double drive_value);

struct ChainMode {
  int n = 0;
  double k = 0.0;
  double energy = 0.0;
  double weight = 0.0;  // |g_k|^2
};

std::vector<ChainMode> chain_spectrum(const ChainSpec& chain);

struct TimeGrid {
  double h = 0.01;
  std::size_t n = 0;  // number of nodes, t_i = i h
  double at(std::size_t i) const noexcept { return static_cast<double>(i) * h; }
  double end() const noexcept { return n == 0 ? 0.0 : at(n - 1); }
};

enum class KernelProvenance { DiscreteSum, ContinuumBessel };

const char* to_string(KernelProvenance p) noexcept;

struct MemoryKernel {
  TimeGrid grid;
  std::vector<cplx> values;
  KernelProvenance provenance = KernelProvenance::DiscreteSum;
};

/// f(x) = sum_k |g_k|^2 exp(-i E_k x) (DiscreteSum) or g^2 exp(-i lambda x) J0(2 J x).
MemoryKernel kernel(const ChainSpec& chain, const TimeGrid& grid,
                    KernelProvenance provenance = KernelProvenance::DiscreteSum);

/// f(x) exp(i lambda x), the slowly varying part of the kernel.
std::vector<cplx> kernel_envelope(const ChainSpec& chain, const TimeGrid& grid,
                                  KernelProvenance provenance);

cplx drive_fourier(const DriveProtocol& drive, int l);

/// Finite-size revival time of the discrete kernel, L / (2J).
double recurrence_time(const ChainSpec& chain);

/// Fold an energy into the zone (-omega/2, omega/2].
double fold(double energy, double omega);
/// Distance between two quasienergies on the circle of circumference omega.
double circular_distance(double a, double b, double omega);

}  // namespace floq
