#include "floq/model.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"

namespace floq {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation: return "validation";
    case ErrorCode::NotConverged: return "not_converged";
    case ErrorCode::Io: return "io";
    case ErrorCode::NotBound: return "not_bound";
    case ErrorCode::GapUndefined: return "gap_undefined";
    case ErrorCode::NonStepDrive: return "non_step_drive";
    case ErrorCode::StepNotCommensurate: return "step_not_commensurate";
    case ErrorCode::MissingPhaseConvention: return "missing_phase_convention";
    case ErrorCode::NoRootInInterval: return "no_root_in_interval";
    case ErrorCode::PlanInvalid: return "plan_invalid";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotConverged: return 3;
    case ErrorCode::Io: return 4;
    case ErrorCode::Internal: return 1;
    default: return 2;
  }
}

const char* to_string(KernelMode mode) noexcept {
  return mode == KernelMode::PaperPlaneWave ? "plane-wave" : "open-chain";
}

KernelMode kernel_mode_from_string(const std::string& text) {
  if (text == "plane-wave" || text == "PaperPlaneWave" || text == "ring") return KernelMode::PaperPlaneWave;
  if (text == "open-chain" || text == "OpenChainExact" || text == "open") return KernelMode::OpenChainExact;
  throw Error(ErrorCode::Validation, "unknown kernel_mode '" + text + "'");
}

const char* to_string(KernelProvenance p) noexcept {
  return p == KernelProvenance::DiscreteSum ? "discrete-sum" : "continuum-bessel";
}

void ChainSpec::validate() const {
  require(L >= 2, "chain.L must be >= 2");
  require(std::isfinite(J) && J > 0.0, "chain.J must be > 0");
  require(std::isfinite(g) && g >= 0.0, "chain.g must be >= 0");
  require(std::isfinite(lambda), "chain.lambda must be finite");
}

DriveProtocol DriveProtocol::step(double a1, double a2, double tau, double period) {
  DriveProtocol d(StepDrive{a1, a2, tau, period});
  d.validate();
  return d;
}

DriveProtocol DriveProtocol::constant(double amplitude, double period) {
  return step(amplitude, amplitude, 0.5 * period, period);
}

DriveProtocol DriveProtocol::harmonics(double period, std::map<int, cplx> coefficients) {
  DriveProtocol d(HarmonicDrive{period, std::move(coefficients)});
  d.validate();
  return d;
}

void DriveProtocol::validate() const {
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    require(std::isfinite(s->period) && s->period > 0.0, "drive.T must be > 0");
    require(std::isfinite(s->tau) && s->tau > 0.0 && s->tau < s->period, "drive.tau must satisfy 0 < tau < T");
    require(std::isfinite(s->a1) && std::isfinite(s->a2), "drive amplitudes must be finite");
    return;
  }
  const auto& h = std::get<HarmonicDrive>(variant_);
  require(std::isfinite(h.period) && h.period > 0.0, "drive.T must be > 0");
  for (const auto& [l, c] : h.coefficients) {
    require(std::isfinite(c.real()) && std::isfinite(c.imag()), "harmonic coefficients must be finite");
    const auto it = h.coefficients.find(-l);
    const cplx partner = it == h.coefficients.end() ? cplx(0.0) : it->second;
    const double scale = std::max(1.0, std::abs(c));
    require(std::abs(partner - std::conj(c)) <= 1e-12 * scale,
            "harmonic table must satisfy omega_{-l} = conj(omega_l) (l = " + std::to_string(l) + ")");
  }
}

const StepDrive& DriveProtocol::step_params() const {
  if (const auto* s = std::get_if<StepDrive>(&variant_)) return *s;
  throw Error(ErrorCode::NonStepDrive, "operation requires a step drive");
}

const HarmonicDrive& DriveProtocol::harmonic_params() const {
  if (const auto* h = std::get_if<HarmonicDrive>(&variant_)) return *h;
  throw Error(ErrorCode::Validation, "drive is not a harmonic table");
}

double DriveProtocol::period() const noexcept {
  return std::visit([](const auto& v) { return v.period; }, variant_);
}

double DriveProtocol::mean() const noexcept {
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    return (s->a1 * s->tau + s->a2 * (s->period - s->tau)) / s->period;
  }
  const auto& h = std::get<HarmonicDrive>(variant_);
  const auto it = h.coefficients.find(0);
  return it == h.coefficients.end() ? 0.0 : it->second.real();
}

double DriveProtocol::value(double t) const {
  const double T = period();
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    // Position inside the period, with the half-open (nT, nT+tau] convention.
    double r = t - T * std::floor(t / T);
    if (r == 0.0) r = T;
    return r <= s->tau ? s->a1 : s->a2;
  }
  const auto& h = std::get<HarmonicDrive>(variant_);
  const double w = omega();
  double a = 0.0;
  for (const auto& [l, c] : h.coefficients) a += (c * std::polar(1.0, l * w * t)).real();
  return a;
}

double DriveProtocol::phase(double t) const {
  const double T = period();
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    const double n = std::floor(t / T);
    const double r = t - n * T;
    const double per_period = s->a1 * s->tau + s->a2 * (T - s->tau);
    const double partial = r <= s->tau ? s->a1 * r : s->a1 * s->tau + s->a2 * (r - s->tau);
    return n * per_period + partial;
  }
  const auto& h = std::get<HarmonicDrive>(variant_);
  const double w = omega();
  double a = mean() * t;
  for (const auto& [l, c] : h.coefficients) {
    if (l == 0) continue;
    a += (c * (std::polar(1.0, l * w * t) - 1.0) / cplx(0.0, l * w)).real();
  }
  return a;
}

double DriveProtocol::detuning_phase(double t) const {
  const double T = period();
  const double r = t - T * std::floor(t / T);
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    const double abar = mean();
    return r <= s->tau ? (s->a1 - abar) * r : (s->a1 - abar) * s->tau + (s->a2 - abar) * (r - s->tau);
  }
  return phase(r) - mean() * r;
}

cplx DriveProtocol::harmonic(int l) const {
  if (const auto* s = std::get_if<StepDrive>(&variant_)) {
    if (l == 0) return mean();
    const double w = omega();
    const cplx e = std::polar(1.0, -l * w * s->tau);
    // exp(-i 2 pi l) = 1 for integer l.
    return (s->a1 * (1.0 - e) - s->a2 * (1.0 - e)) / cplx(0.0, 2.0 * pi * l);
  }
  const auto& h = std::get<HarmonicDrive>(variant_);
  const auto it = h.coefficients.find(l);
  return it == h.coefficients.end() ? cplx(0.0) : it->second;
}

double DriveProtocol::max_abs() const {
  if (const auto* s = std::get_if<StepDrive>(&variant_)) return std::max(std::abs(s->a1), std::abs(s->a2));
  double m = 0.0;
  for (const auto& [l, c] : std::get<HarmonicDrive>(variant_).coefficients) m += std::abs(c);
  return m;
}

Eigen::MatrixXd EffectiveHamiltonian::dense() const {
  const int n = size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  h.diagonal() = diag;
  for (int i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = offdiag(i);
    h(i + 1, i) = offdiag(i);
  }
  if (ring_closure != 0.0) {
    h(1, n - 1) += ring_closure;
    h(n - 1, 1) += ring_closure;
  }
  return h;
}

Eigen::VectorXcd EffectiveHamiltonian::apply(const Eigen::VectorXcd& x) const {
  const int n = size();
  Eigen::VectorXcd y = diag.cwiseProduct(x);
  for (int i = 0; i + 1 < n; ++i) {
    y(i) += offdiag(i) * x(i + 1);
    y(i + 1) += offdiag(i) * x(i);
  }
  if (ring_closure != 0.0) {
    y(1) += ring_closure * x(n - 1);
    y(n - 1) += ring_closure * x(1);
  }
  return y;
}

EffectiveHamiltonian build_effective_hamiltonian(const ChainSpec& chain, double drive_value) {
  const int n = chain.sites();
  EffectiveHamiltonian h;
  h.diag = Eigen::VectorXd::Constant(n, chain.lambda);
  h.diag(0) = chain.lambda + drive_value;
  h.offdiag = Eigen::VectorXd::Constant(n - 1, chain.J);
  h.offdiag(0) = chain.g;
  if (chain.periodic()) h.ring_closure = chain.J;
  return h;
}

std::vector<ChainMode> chain_spectrum(const ChainSpec& chain) {
  std::vector<ChainMode> modes;
  modes.reserve(static_cast<std::size_t>(chain.L));
  const double g2 = chain.g * chain.g;
  if (chain.kernel_mode == KernelMode::PaperPlaneWave) {
    for (int n = 0; n < chain.L; ++n) {
      const double k = 2.0 * pi * n / chain.L;
      modes.push_back({n, k, chain.lambda + 2.0 * chain.J * std::cos(k * ChainSpec::x0), g2 / chain.L});
    }
  } else {
    for (int n = 1; n <= chain.L; ++n) {
      const double k = pi * n / (chain.L + 1);
      const double s = std::sin(k);
      modes.push_back({n, k, chain.lambda + 2.0 * chain.J * std::cos(k * ChainSpec::x0),
                       g2 * 2.0 / (chain.L + 1) * s * s});
    }
  }
  return modes;
}

std::vector<cplx> kernel_envelope(const ChainSpec& chain, const TimeGrid& grid, KernelProvenance provenance) {
  std::vector<cplx> out(grid.n);
  const double g2 = chain.g * chain.g;
  if (provenance == KernelProvenance::ContinuumBessel) {
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = g2 * std::cyl_bessel_j(0.0, 2.0 * chain.J * grid.at(i));
    return out;
  }
  // Mode sum by phase recurrence, re-anchored periodically to keep roundoff at the 1e-15 level.
  const auto modes = chain_spectrum(chain);
  const std::size_t m = modes.size();
  std::vector<double> w(m), de(m);
  std::vector<cplx> z(m), step(m);
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = modes[k].weight;
    de[k] = modes[k].energy - chain.lambda;
    step[k] = std::polar(1.0, -de[k] * grid.h);
  }
  constexpr std::size_t reanchor = 256;
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (i % reanchor == 0) {
      const double x = grid.at(i);
      for (std::size_t k = 0; k < m; ++k) z[k] = std::polar(1.0, -de[k] * x);
    }
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      re += w[k] * z[k].real();
      im += w[k] * z[k].imag();
      z[k] *= step[k];
    }
    out[i] = {re, im};
  }
  return out;
}

MemoryKernel kernel(const ChainSpec& chain, const TimeGrid& grid, KernelProvenance provenance) {
  chain.validate();
  MemoryKernel f;
  f.grid = grid;
  f.provenance = provenance;
  f.values = kernel_envelope(chain, grid, provenance);
  for (std::size_t i = 0; i < grid.n; ++i) f.values[i] *= std::polar(1.0, -chain.lambda * grid.at(i));
  if (provenance == KernelProvenance::DiscreteSum && grid.n > 0) {
    // Exact at x = 0: the weights sum to g^2.
    double s = 0.0;
    for (const auto& m : chain_spectrum(chain)) s += m.weight;
    f.values[0] = s;
  }
  return f;
}

cplx drive_fourier(const DriveProtocol& drive, int l) { return drive.harmonic(l); }

double recurrence_time(const ChainSpec& chain) { return chain.L / (2.0 * chain.J); }

double fold(double energy, double omega) {
  const double n = std::ceil(energy / omega - 0.5);
  double r = energy - n * omega;
  if (r <= -0.5 * omega) r += omega;
  if (r > 0.5 * omega) r -= omega;
  return r;
}

double circular_distance(double a, double b, double omega) {
  const double d = std::fmod(std::abs(a - b), omega);
  return std::min(d, omega - d);
}

}  // namespace floq
