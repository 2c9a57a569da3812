#include "floq/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "floq/errors.hpp"

namespace floq {

namespace {

Eigen::MatrixXcd exp_segment(const SpectralDecomposition& d, double dt) {
  const Eigen::VectorXcd ph = (cplx(0.0, -dt) * d.energies.cast<cplx>()).array().exp();
  return d.vectors.cast<cplx>() * ph.asDiagonal() * d.vectors.transpose().cast<cplx>();
}

// Eigenvectors of the complex symmetric unitary U = X + iY through the real symmetric
// pencil X + s Y (X and Y commute). Residual failures are re-split with another s.
void diagonalize_symmetric_unitary(const Eigen::MatrixXcd& u, Eigen::MatrixXd& vecs, Eigen::VectorXcd& mu,
                                   double& residual) {
  const Eigen::MatrixXd x = u.real();
  const Eigen::MatrixXd y = u.imag();
  const Eigen::Index n = u.rows();
  const double s0 = 0.7548776662466927;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x + s0 * y);
  require(es.info() == Eigen::Success, "monodromy eigensolver failed", ErrorCode::NotConverged);
  vecs = es.eigenvectors();
  mu.resize(n);
  auto rayleigh = [&](const Eigen::VectorXd& v) { return cplx(v.dot(x * v), v.dot(y * v)); };
  auto resid = [&](const Eigen::VectorXd& v, cplx m) { return (u * v.cast<cplx>() - m * v.cast<cplx>()).norm(); };
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = rayleigh(vecs.col(i));

  const double tol = 1e-9;
  std::vector<Eigen::Index> bad;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (resid(vecs.col(i), mu(i)) > tol) bad.push_back(i);
  }
  // Accidental degeneracies of X + s Y: diagonalize the pencil again inside each cluster.
  const double shifts[] = {-1.3247179572447460, 2.2055694304005903, 0.4142135623730950};
  for (double s : shifts) {
    if (bad.empty()) break;
    const Eigen::Index m = static_cast<Eigen::Index>(bad.size());
    Eigen::MatrixXd q(n, m);
    for (Eigen::Index c = 0; c < m; ++c) q.col(c) = vecs.col(bad[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXd xc = q.transpose() * x * q;
    const Eigen::MatrixXd yc = q.transpose() * y * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(xc + s * yc);
    const Eigen::MatrixXd rot = q * ec.eigenvectors();
    std::vector<Eigen::Index> still;
    for (Eigen::Index c = 0; c < m; ++c) {
      const Eigen::Index i = bad[static_cast<std::size_t>(c)];
      vecs.col(i) = rot.col(c);
      mu(i) = rayleigh(vecs.col(i));
      if (resid(vecs.col(i), mu(i)) > tol) still.push_back(i);
    }
    bad.swap(still);
  }
  residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) residual = std::max(residual, resid(vecs.col(i), mu(i)));
}

}  // namespace

MonodromySolution monodromy_spectrum(const ChainSpec& chain, const DriveProtocol& drive, const ClassifyTolerances& tol) {
  chain.validate();
  drive.validate();
  if (!drive.is_step()) throw Error(ErrorCode::NonStepDrive, "monodromy route requires a step drive");
  const StepDrive& sd = drive.step_params();

  MonodromySolution sol;
  sol.chain = chain;
  sol.drive = drive;
  sol.pieces = PiecewiseHamiltonian::build(chain, sd);
  const double T = sd.period;
  const double w = drive.omega();

  // Symmetric split U_s = W U2 W with W = exp(-i H1 tau / 2) is complex symmetric;
  // U(T) = U2 W W, so eigenvectors map back through u(0) = W^{-1} v.
  const Eigen::MatrixXcd half = exp_segment(sol.pieces.first, 0.5 * sd.tau);
  const Eigen::MatrixXcd u2 = exp_segment(sol.pieces.second, T - sd.tau);
  Eigen::MatrixXcd us = half * u2 * half;
  us = 0.5 * (us + us.transpose()).eval();

  Eigen::MatrixXd v;
  Eigen::VectorXcd mu;
  diagonalize_symmetric_unitary(us, v, mu, sol.max_residual);
  sol.multipliers = mu;

  const Eigen::MatrixXd& v1 = sol.pieces.first.vectors;
  const Eigen::VectorXcd back = (cplx(0.0, 0.5 * sd.tau) * sol.pieces.first.energies.cast<cplx>()).array().exp();
  const Eigen::MatrixXcd coeff = back.asDiagonal() * (v1.transpose() * v).cast<cplx>();
  const Eigen::MatrixXcd u0 = v1.cast<cplx>() * coeff;

  const Eigen::Index n = u0.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> eps(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    sol.max_unitarity_defect = std::max(sol.max_unitarity_defect, std::abs(std::abs(mu(i)) - 1.0));
    eps[static_cast<std::size_t>(i)] = fold(-std::arg(mu(i)) / T, w);
  }
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return eps[static_cast<std::size_t>(a)] < eps[static_cast<std::size_t>(b)];
  });

  sol.spectrum.omega = w;
  sol.spectrum.solver = "monodromy";
  Eigen::VectorXcd sorted_mu(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[static_cast<std::size_t>(k)];
    SpectrumEntry e;
    e.quasienergy = eps[static_cast<std::size_t>(i)];
    sol.spectrum.entries.push_back(e);
    Eigen::VectorXcd col = u0.col(i);
    // Fix the global phase so that the impurity amplitude at t = 0 is real and non-negative.
    if (std::abs(col(0)) > 0.0) col *= std::polar(1.0, -std::arg(col(0)));
    sol.spectrum.u0.push_back(col);
    sorted_mu(k) = mu(i);
  }
  sol.multipliers = sorted_mu;
  if (sol.max_unitarity_defect > 1e-10) {
    sol.spectrum.warnings.push_back("unitarity defect " + std::to_string(sol.max_unitarity_defect));
  }
  classify_modes(sol.spectrum, chain, tol);
  return sol;
}

Eigen::VectorXcd MonodromySolution::state_at(int alpha, double t) const {
  require(alpha >= 0 && alpha < size(), "mode index out of range");
  const StepDrive& sd = drive.step_params();
  const double T = sd.period;
  require(t >= -1e-12 && t <= T + 1e-12, "intra-period time must lie in [0, T]");
  const double eps = spectrum.entries[static_cast<std::size_t>(alpha)].quasienergy;
  const Eigen::VectorXcd& u0 = spectrum.u0[static_cast<std::size_t>(alpha)];
  const SpectralDecomposition& d1 = pieces.first;
  const SpectralDecomposition& d2 = pieces.second;
  Eigen::VectorXcd a = d1.vectors.transpose().cast<cplx>() * u0;
  const double t1 = std::min(t, sd.tau);
  a = (cplx(0.0, -t1) * d1.energies.cast<cplx>()).array().exp() * a.array();
  Eigen::VectorXcd out;
  if (t <= sd.tau) {
    out = d1.vectors.cast<cplx>() * a;
  } else {
    Eigen::VectorXcd b = pieces.overlap.transpose().cast<cplx>() * a;
    b = (cplx(0.0, -(t - sd.tau)) * d2.energies.cast<cplx>()).array().exp() * b.array();
    out = d2.vectors.cast<cplx>() * b;
  }
  return out * std::polar(1.0, eps * t);
}

const MonodromySolution::ImpurityCache& MonodromySolution::cache(int alpha) const {
  if (cache_.size() != static_cast<std::size_t>(size())) cache_.assign(static_cast<std::size_t>(size()), {});
  ImpurityCache& c = cache_[static_cast<std::size_t>(alpha)];
  if (c.first.size() == 0) {
    const StepDrive& sd = drive.step_params();
    const SpectralDecomposition& d1 = pieces.first;
    const SpectralDecomposition& d2 = pieces.second;
    const Eigen::VectorXcd a = d1.vectors.transpose().cast<cplx>() * spectrum.u0[static_cast<std::size_t>(alpha)];
    const Eigen::VectorXcd at_tau = (cplx(0.0, -sd.tau) * d1.energies.cast<cplx>()).array().exp() * a.array();
    const Eigen::VectorXcd b = pieces.overlap.transpose().cast<cplx>() * at_tau;
    c.first = d1.vectors.row(0).transpose().cast<cplx>().array() * a.array();
    c.second = d2.vectors.row(0).transpose().cast<cplx>().array() * b.array();
  }
  return c;
}

cplx MonodromySolution::impurity_at(int alpha, double t) const {
  require(alpha >= 0 && alpha < size(), "mode index out of range");
  const StepDrive& sd = drive.step_params();
  const double T = sd.period;
  const double r = t - T * std::floor(t / T);
  const double eps = spectrum.entries[static_cast<std::size_t>(alpha)].quasienergy;
  const ImpurityCache& c = cache(alpha);
  cplx s = 0.0;
  if (r <= sd.tau) {
    const Eigen::VectorXd& e = pieces.first.energies;
    for (Eigen::Index k = 0; k < e.size(); ++k) s += c.first(k) * std::polar(1.0, -e(k) * r);
  } else {
    const Eigen::VectorXd& e = pieces.second.energies;
    for (Eigen::Index k = 0; k < e.size(); ++k) s += c.second(k) * std::polar(1.0, -e(k) * (r - sd.tau));
  }
  return s * std::polar(1.0, eps * r);
}

FloquetMode MonodromySolution::mode(int alpha, int K, int samples) const {
  require(K >= 0 && samples >= 2 * K + 1, "need samples >= 2K+1 for the harmonic DFT");
  FloquetMode m;
  m.quasienergy = spectrum.entries[static_cast<std::size_t>(alpha)].quasienergy;
  m.K = K;
  const double T = drive.period();
  const double w = drive.omega();
  const int n = chain.sites();
  m.harmonics = Eigen::MatrixXcd::Zero(n, 2 * K + 1);
  for (int s = 0; s < samples; ++s) {
    const double t = T * s / samples;
    Eigen::VectorXcd u = state_at(alpha, t);
    for (int k = -K; k <= K; ++k) m.harmonics.col(k + K) += u * std::polar(1.0 / samples, -k * w * t);
    m.period_times.push_back(t);
    m.period_series.push_back(std::move(u));
  }
  m.overlap_x = std::conj(spectrum.u0[static_cast<std::size_t>(alpha)](0));
  return m;
}

}  // namespace floq
