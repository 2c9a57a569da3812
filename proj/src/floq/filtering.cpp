#include "floq/filtering.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "floq/errors.hpp"

namespace floq {

double spectral_density(const ChainSpec& chain, double omega) {
  const double x = omega - chain.lambda;
  const double w2 = 4.0 * chain.J * chain.J - x * x;
  if (w2 <= 0.0) return 0.0;
  return chain.g * chain.g / (pi * std::sqrt(w2));
}

double BinnedDensity::at(double omega) const {
  if (values.empty() || width <= 0.0) return 0.0;
  const double pos = (omega - omega_min) / width;
  if (pos < 0.0) return 0.0;
  const auto i = static_cast<std::size_t>(pos);
  if (i >= values.size()) return 0.0;
  return values[i];
}

BinnedDensity binned_spectral_density(const ChainSpec& chain, double bin_width) {
  chain.validate();
  require(bin_width > 0.0, "bin width must be > 0");
  BinnedDensity d;
  d.width = bin_width;
  // Bins tile [lambda - 2J, lambda + 2J] with the band edges on bin boundaries.
  const int bins = static_cast<int>(std::ceil(4.0 * chain.J / bin_width - 1e-9));
  d.omega_min = chain.lambda - 0.5 * bins * bin_width;
  d.values.assign(static_cast<std::size_t>(bins), 0.0);
  for (const auto& m : chain_spectrum(chain)) {
    auto i = static_cast<long>(std::floor((m.energy - d.omega_min) / bin_width));
    i = std::clamp(i, 0L, static_cast<long>(bins) - 1);
    d.values[static_cast<std::size_t>(i)] += m.weight / bin_width;
  }
  return d;
}

std::vector<cplx> density_inverse_transform(const BinnedDensity& density, const std::vector<double>& x) {
  std::vector<cplx> f(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < density.values.size(); ++i) {
      s += density.values[i] * density.width * std::polar(1.0, -density.centre(i) * x[k]);
    }
    f[k] = s;
  }
  return f;
}

namespace {

// int_0^d exp(i k s) ds, stable for small k d.
cplx phase_integral(double k, double d) {
  const double x = 0.5 * k * d;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return d * sinc * std::polar(1.0, x);
}

// sum_{m=0}^{n-1} exp(i x m)
cplx geometric_sum(double x, std::size_t n) {
  if (n == 0) return 0.0;
  const double s = std::sin(0.5 * x);
  if (std::abs(s) < 1e-6) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += std::polar(1.0, x * static_cast<double>(m));
    return acc;
  }
  const double nn = static_cast<double>(n);
  return std::polar(std::sin(0.5 * nn * x) / s, 0.5 * (nn - 1.0) * x);
}

// int_0^t exp(i theta(s) + i w s) ds for a step drive; sgn = -1 gives exp(-i theta - i w s).
cplx step_phase_integral(const StepDrive& s, double abar, double t, double w, double sgn) {
  const double T = s.period;
  const double k1 = sgn * (s.a1 - abar + w);
  const double k2 = sgn * (s.a2 - abar + w);
  const double theta_tau = sgn * ((s.a1 - abar) * s.tau);
  const cplx jump = std::polar(1.0, theta_tau + sgn * w * s.tau);
  auto partial = [&](double r) {
    if (r <= s.tau) return phase_integral(k1, r);
    return phase_integral(k1, s.tau) + jump * phase_integral(k2, r - s.tau);
  };
  const double nf = std::floor(t / T);
  auto n = static_cast<std::size_t>(nf);
  double r = t - nf * T;
  if (r < 0.0) r = 0.0;
  const cplx per_period = partial(T);
  return geometric_sum(sgn * w * T, n) * per_period + std::polar(1.0, sgn * w * nf * T) * partial(r);
}

cplx generic_phase_integral(const DriveProtocol& drive, double t, double w, double sgn) {
  using boost::math::quadrature::gauss;
  const double T = drive.period();
  const int panels = std::max(1, static_cast<int>(std::ceil(t / T * 8.0)));
  const double width = t / panels;
  double re = 0.0, im = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    const double b = a + width;
    re += gauss<double, 30>::integrate(
        [&](double s) { return std::cos(sgn * (drive.detuning_phase(s) + w * s)); }, a, b);
    im += gauss<double, 30>::integrate(
        [&](double s) { return std::sin(sgn * (drive.detuning_phase(s) + w * s)); }, a, b);
  }
  return {re, im};
}

cplx phase_integral_any(const DriveProtocol& drive, double t, double w, double sgn) {
  if (drive.is_step()) return step_phase_integral(drive.step_params(), drive.mean(), t, w, sgn);
  return generic_phase_integral(drive, t, w, sgn);
}

}  // namespace

cplx control_amplitude(const DriveProtocol& drive, double t, double omega) {
  require(t >= 0.0, "control spectrum time must be >= 0");
  return phase_integral_any(drive, t, omega, 1.0) / std::sqrt(2.0 * pi);
}

std::vector<double> control_spectrum(const DriveProtocol& drive, double t, const std::vector<double>& omega_grid) {
  std::vector<double> out(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) out[i] = std::norm(control_amplitude(drive, t, omega_grid[i]));
  return out;
}

double filtered_exponent(const ChainSpec& chain, const DriveProtocol& drive, double t, double rel_tol,
                         double* error_out) {
  using boost::math::quadrature::gauss_kronrod;
  if (t <= 0.0) {
    if (error_out) *error_out = 0.0;
    return 0.0;
  }
  const double omega_a = chain.lambda + drive.mean();
  auto integrand = [&](double phi) {
    const double w = chain.lambda - omega_a + 2.0 * chain.J * std::sin(phi);
    return std::norm(control_amplitude(drive, t, w));
  };
  // Panels narrower than the sinc main lobe so that no peak is skipped by the first rule.
  const int panels = std::max(8, static_cast<int>(std::ceil(2.0 * chain.J * t)));
  const double width = pi / panels;
  double total = 0.0, err = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -0.5 * pi + p * width;
    double e = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, a, a + width, 12, rel_tol, &e);
    err += e;
  }
  const double rq = 2.0 * chain.g * chain.g * total;
  const double abs_err = 2.0 * chain.g * chain.g * err;
  if (error_out) *error_out = abs_err;
  if (abs_err > std::max(1e3 * rel_tol * std::abs(rq), 1e-12)) {
    throw Error(ErrorCode::NotConverged, "QuadratureNotConverged: filter integral at t=" + std::to_string(t) +
                                             " has error " + std::to_string(abs_err));
  }
  return rq;
}

FilterReport filtered_population(const ChainSpec& chain, const DriveProtocol& drive, const std::vector<double>& times,
                                 const FilterOptions& options) {
  chain.validate();
  drive.validate();
  require(!times.empty(), "filter needs at least one time");
  require(options.grid_points >= 2, "filter grid needs >= 2 points");
  FilterReport rep;
  rep.omega_a = chain.lambda + drive.mean();
  rep.times = times;
  for (double t : times) {
    require(t >= 0.0, "filter times must be >= 0");
    double e = 0.0;
    const double rq = filtered_exponent(chain, drive, t, options.rel_tol, &e);
    rep.max_quadrature_error = std::max(rep.max_quadrature_error, e);
    rep.Q.push_back(t);  // |epsilon| = 1 for a real drive, so Q(t) = t exactly
    rep.R.push_back(t > 0.0 ? rq / t : 2.0 * pi * spectral_density(chain, rep.omega_a));
    rep.c0_abs.push_back(std::exp(-0.5 * rq));
  }
  // Report grid in the control-spectrum variable: the band sits at [-Abar - 2J, -Abar + 2J].
  const double centre = chain.lambda - rep.omega_a;
  const double half = 2.0 * chain.J + options.padding * chain.J;
  rep.omega_grid.resize(static_cast<std::size_t>(options.grid_points));
  for (int i = 0; i < options.grid_points; ++i) {
    rep.omega_grid[static_cast<std::size_t>(i)] = centre - half + 2.0 * half * i / (options.grid_points - 1);
  }
  for (double w : rep.omega_grid) rep.noise_spectrum.push_back(spectral_density(chain, w + rep.omega_a));
  rep.control_times = options.spectrum_times;
  for (double t : options.spectrum_times) rep.control_spectra.push_back(control_spectrum(drive, t, rep.omega_grid));
  return rep;
}

cplx renorm_factor(const DriveProtocol& drive, int n) {
  const double T = drive.period();
  const cplx f = phase_integral_any(drive, T, n * drive.omega(), -1.0) / T;
  require(std::abs(f) <= 1.0 + 1e-12, "renormalization factor exceeds 1 in modulus", ErrorCode::Internal);
  return f;
}

std::vector<F0Root> find_f0_zeros(double period, double tau, double lo, double hi, double threshold) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "search interval must be finite with lo < hi");
  auto f0sq = [&](double a2) { return std::norm(renorm_factor(DriveProtocol::step(-a2, a2, tau, period), 0)); };
  // Roots are spaced by at least 2 pi / T for tau = T / 2; sample well below that.
  const double spacing = std::min(0.01, 0.01 * 2.0 * pi / period);
  const auto n = static_cast<std::size_t>(std::max(200.0, std::ceil((hi - lo) / spacing)));
  std::vector<double> x(n + 1), y(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    y[i] = f0sq(x[i]);
  }
  std::vector<F0Root> roots;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(y[i] <= y[i - 1] && y[i] < y[i + 1])) continue;
    const auto r = boost::math::tools::brent_find_minima(f0sq, x[i - 1], x[i + 1], std::numeric_limits<double>::digits);
    // Brent stops near sqrt(eps) in position; polish with Gauss-Newton on the complex F0.
    double a = r.first;
    auto f0 = [&](double v) { return renorm_factor(DriveProtocol::step(-v, v, tau, period), 0); };
    for (int it = 0; it < 4; ++it) {
      const double d = 1e-5 * std::max(1.0, std::abs(a));
      const cplx df = (f0(a + d) - f0(a - d)) / (2.0 * d);
      if (std::norm(df) == 0.0) break;
      const double next = a - (std::conj(df) * f0(a)).real() / std::norm(df);
      if (!(std::abs(next - a) < x[i + 1] - x[i - 1])) break;
      a = next;
    }
    if (f0sq(a) > r.second) a = r.first;
    const double value = f0sq(a);
    if (value < threshold) roots.push_back({a, std::sqrt(value)});
  }
  return roots;
}

Trajectory renormalized_dynamics(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                                 const LatticeOptions& options) {
  ChainSpec c = chain;
  c.g = chain.g * std::abs(renorm_factor(drive, 0));
  const DriveProtocol flat = DriveProtocol::constant(drive.mean(), drive.period());
  Trajectory traj = propagate_lattice(c, flat, horizon, options).trajectory;
  traj.chain = chain;
  traj.drive = drive;
  traj.solver = "renormalized";
  traj.approximate = true;
  traj.diagnostics["g_renormalized"] = c.g;
  return traj;
}

}  // namespace floq
