#include "floq/volterra.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"

namespace floq {

namespace {

// Best rational approximation p/q of x with q <= qmax, by continued fractions.
bool rational_approx(double x, long qmax, double rel_tol, long& p_out, long& q_out) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0;
    const long q2 = ai * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(static_cast<double>(p1) / q1 - x) <= rel_tol * x) {
      p_out = p1;
      q_out = q1;
      return true;
    }
    const double frac = r - a;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
  }
  return false;
}

bool is_integer_multiple(double span, double h) {
  const double k = span / h;
  return std::abs(k - std::round(k)) <= 1e-8 * std::max(1.0, k);
}

}  // namespace

void check_commensurate(const DriveProtocol& drive, double h) {
  require(std::isfinite(h) && h > 0.0, "solver.h must be > 0");
  if (!drive.is_step()) return;
  const auto& s = drive.step_params();
  if (!is_integer_multiple(s.tau, h) || !is_integer_multiple(s.period - s.tau, h)) {
    throw Error(ErrorCode::StepNotCommensurate,
                "step h=" + std::to_string(h) + " does not divide tau and T - tau");
  }
}

double commensurate_step(const DriveProtocol& drive, double target) {
  require(std::isfinite(target) && target > 0.0, "step target must be > 0");
  if (!drive.is_step()) return target;
  const auto& s = drive.step_params();
  long p = 0, q = 0;
  if (!rational_approx(s.tau / (s.period - s.tau), 100000, 1e-11, p, q)) {
    throw Error(ErrorCode::StepNotCommensurate, "tau and T - tau have no common grid unit");
  }
  const double unit = s.tau / static_cast<double>(p);
  const double m = std::ceil(unit / target - 1e-12);
  return unit / m;
}

double default_volterra_step(const ChainSpec& chain, const DriveProtocol& drive) {
  const double scale = std::max({drive.max_abs(), 2.0 * chain.J, chain.g});
  return commensurate_step(drive, 0.05 / scale);
}

std::vector<cplx> volterra_pass(const ChainSpec& chain, const DriveProtocol& drive, std::size_t steps, double h,
                                KernelProvenance provenance) {
  const std::size_t n_nodes = steps + 1;
  const TimeGrid grid{h, n_nodes};
  const std::vector<cplx> fk = kernel_envelope(chain, grid, provenance);

  // Reversed split storage so each memory sum is a contiguous dot product.
  Eigen::ArrayXd fr(n_nodes), fi(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    fr(static_cast<Eigen::Index>(n_nodes - 1 - i)) = fk[i].real();
    fi(static_cast<Eigen::Index>(n_nodes - 1 - i)) = fk[i].imag();
  }
  Eigen::ArrayXd zr = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n_nodes));
  Eigen::ArrayXd zi = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n_nodes));

  const cplx f0 = fk[0];
  const cplx denom = 1.0 + h * h * f0 / 4.0;
  const Eigen::Index N = static_cast<Eigen::Index>(n_nodes);

  zr(0) = 1.0;
  cplx z{1.0, 0.0};
  cplx memory{0.0, 0.0};  // I_n = int_0^{t_n} fhat(t_n - s) z(s) ds
  double theta_prev = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double theta_next = drive.phase(grid.at(n + 1));
    const cplx e = std::polar(1.0, -(theta_next - theta_prev));
    theta_prev = theta_next;

    // sum_part = fhat_{n+1} z_0 / 2 + sum_{m=1..n} fhat_{n+1-m} z_m
    cplx sum_part = 0.5 * fk[n + 1] * cplx(zr(0), zi(0));
    const Eigen::Index len = static_cast<Eigen::Index>(n);
    if (len > 0) {
      const Eigen::Index off = N - 1 - static_cast<Eigen::Index>(n + 1) + 1;  // index of fhat_n
      const auto a = fr.segment(off, len);
      const auto b = fi.segment(off, len);
      const auto xr = zr.segment(1, len);
      const auto xi = zi.segment(1, len);
      sum_part += cplx((a * xr).sum() - (b * xi).sum(), (a * xi).sum() + (b * xr).sum());
    }
    const cplx hist = h * sum_part;
    z = (e * z - 0.5 * h * (e * memory + hist)) / denom;
    memory = hist + 0.5 * h * f0 * z;
    zr(static_cast<Eigen::Index>(n + 1)) = z.real();
    zi(static_cast<Eigen::Index>(n + 1)) = z.imag();
  }

  std::vector<cplx> c(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    c[i] = cplx(zr(static_cast<Eigen::Index>(i)), zi(static_cast<Eigen::Index>(i))) *
           std::polar(1.0, -chain.lambda * grid.at(i));
  }
  return c;
}

Trajectory solve_volterra(const ChainSpec& chain, const DriveProtocol& drive, double horizon,
                          const VolterraOptions& options) {
  chain.validate();
  drive.validate();
  require(std::isfinite(horizon) && horizon > 0.0, "horizon must be > 0");
  require(options.refinements >= 0 && options.refinements <= 4, "solver.refinements must be in [0, 4]");

  const double h = options.h > 0.0 ? options.h : default_volterra_step(chain, drive);
  check_commensurate(drive, h);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));

  // Romberg table on the coarse nodes: level k uses h / 2^k.
  std::vector<std::vector<cplx>> levels;
  for (int k = 0; k <= options.refinements; ++k) {
    const std::size_t stride = std::size_t{1} << k;
    const auto fine = volterra_pass(chain, drive, steps * stride, h / static_cast<double>(stride), options.provenance);
    std::vector<cplx> coarse(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) coarse[i] = fine[i * stride];
    levels.push_back(std::move(coarse));
  }
  double raw_delta = 0.0;
  if (levels.size() > 1) {
    const auto& a = levels[levels.size() - 1];
    const auto& b = levels[levels.size() - 2];
    for (std::size_t i = 0; i <= steps; ++i) raw_delta = std::max(raw_delta, std::abs(std::norm(a[i]) - std::norm(b[i])));
  }
  const std::vector<cplx> finest = levels.back();
  for (std::size_t m = 1; m < levels.size(); ++m) {
    const double factor = std::pow(4.0, static_cast<double>(m));
    for (std::size_t k = levels.size() - 1; k >= m; --k) {
      for (std::size_t i = 0; i <= steps; ++i) {
        levels[k][i] = (factor * levels[k][i] - levels[k - 1][i]) / (factor - 1.0);
      }
    }
  }
  const std::vector<cplx>& best = levels.back();
  double extrap_delta = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) extrap_delta = std::max(extrap_delta, std::abs(std::norm(best[i]) - std::norm(finest[i])));

  Trajectory traj;
  traj.solver = "volterra";
  traj.h = h;
  traj.chain = chain;
  traj.drive = drive;
  traj.times.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) traj.push(static_cast<double>(i) * h, best[i]);
  traj.diagnostics["refinements"] = options.refinements;
  traj.diagnostics["halving_max_dp"] = raw_delta;
  traj.diagnostics["extrapolation_max_dp"] = extrap_delta;
  traj.diagnostics["finest_h"] = h / static_cast<double>(std::size_t{1} << options.refinements);
  if (options.provenance == KernelProvenance::DiscreteSum && horizon >= recurrence_time(chain)) {
    traj.warnings.push_back("HorizonBeyondRecurrence: horizon exceeds L/(2J), finite-size revivals expected");
  }
  return traj;
}

}  // namespace floq
