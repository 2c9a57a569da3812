#include "floq/sambe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "floq/errors.hpp"
#include "floq/filtering.hpp"
#include "floq/linalg.hpp"

namespace floq {

const char* to_string(SambeFrame f) noexcept { return f == SambeFrame::Rotated ? "rotated" : "unrotated"; }

SambeFrame sambe_frame_from_string(const std::string& text) {
  if (text == "rotated") return SambeFrame::Rotated;
  if (text == "unrotated" || text == "lab") return SambeFrame::Unrotated;
  throw Error(ErrorCode::Validation, "unknown Sambe frame '" + text + "'");
}

Eigen::MatrixXcd sambe_matrix(const ChainSpec& chain, const DriveProtocol& drive, int K) {
  chain.validate();
  require(K >= 1, "Sambe truncation K must be >= 1");
  const int n = chain.sites();
  const int blocks = 2 * K + 1;
  const double w = drive.omega();
  const Eigen::MatrixXd h0 = build_effective_hamiltonian(chain, 0.0).dense();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(blocks * n, blocks * n);
  for (int l = -K; l <= K; ++l) {
    const int bl = (l + K) * n;
    m.block(bl, bl, n, n) = h0.cast<cplx>();
    m.block(bl, bl, n, n).diagonal().array() += l * w;
    for (int k = -K; k <= K; ++k) m(bl, (k + K) * n) += drive.harmonic(l - k);
  }
  return m;
}

Eigen::MatrixXcd sambe_matrix_rotated(const ChainSpec& chain, const DriveProtocol& drive, int K) {
  chain.validate();
  require(K >= 1, "Sambe truncation K must be >= 1");
  const int n = chain.sites();
  const int blocks = 2 * K + 1;
  const double w = drive.omega();
  EffectiveHamiltonian h = build_effective_hamiltonian(chain, drive.mean());
  h.offdiag(0) = 0.0;
  const Eigen::MatrixXd h0 = h.dense();
  std::vector<cplx> f(static_cast<std::size_t>(4 * K + 1));
  for (int d = -2 * K; d <= 2 * K; ++d) f[static_cast<std::size_t>(d + 2 * K)] = renorm_factor(drive, d);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(blocks * n, blocks * n);
  for (int l = -K; l <= K; ++l) {
    const int bl = (l + K) * n;
    m.block(bl, bl, n, n) = h0.cast<cplx>();
    m.block(bl, bl, n, n).diagonal().array() += l * w;
    for (int k = -K; k <= K; ++k) {
      const int bk = (k + K) * n;
      const cplx c = chain.g * f[static_cast<std::size_t>(l - k + 2 * K)];
      m(bl + 1, bk) += c;
      m(bk, bl + 1) += std::conj(c);
    }
  }
  return m;
}

namespace {

struct ReducedChain {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
  std::vector<double> dark;
  Eigen::MatrixXd basis;  // empty for the open chain
};

// Static single-excitation chain with A = 0, reduced to the part that talks to the impurity.
ReducedChain reduce_chain(const ChainSpec& chain) {
  const EffectiveHamiltonian h = build_effective_hamiltonian(chain, 0.0);
  ReducedChain rc;
  if (h.tridiagonal()) {
    rc.diag = h.diag;
    rc.off = h.offdiag;
    return rc;
  }
  const int L = chain.L;
  const int n = chain.sites();
  std::vector<Eigen::VectorXd> cols;
  auto unit = [&](int j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(j) = 1.0;
    return v;
  };
  cols.push_back(unit(0));
  cols.push_back(unit(1));
  for (int m = 2;; ++m) {
    const int partner = L + 2 - m;
    if (partner < m) break;
    if (partner == m) {
      cols.push_back(unit(m));
      break;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(m) = v(partner) = 1.0 / std::sqrt(2.0);
    cols.push_back(v);
  }
  const int r = static_cast<int>(cols.size());
  rc.basis.resize(n, r);
  for (int c = 0; c < r; ++c) rc.basis.col(c) = cols[static_cast<std::size_t>(c)];
  Eigen::MatrixXd hq(n, r);
  for (int c = 0; c < r; ++c) hq.col(c) = h.apply(rc.basis.col(c).cast<cplx>()).real();
  const Eigen::MatrixXd hr = rc.basis.transpose() * hq;
  rc.diag = hr.diagonal();
  rc.off = hr.diagonal(1);
  for (int i = 0; i < r; ++i) {
    for (int j = i + 2; j < r; ++j) {
      require(std::abs(hr(i, j)) < 1e-12, "ring reduction is not tridiagonal", ErrorCode::Internal);
    }
  }
  for (int k = 1; 2 * k < L; ++k) rc.dark.push_back(chain.lambda + 2.0 * chain.J * std::cos(2.0 * pi * k / L));
  return rc;
}

}  // namespace

SambeOperator build_sambe_operator(const ChainSpec& chain, const DriveProtocol& drive, int K, SambeFrame frame) {
  chain.validate();
  drive.validate();
  require(K >= 1, "Sambe truncation K must be >= 1");
  const ReducedChain rc = reduce_chain(chain);
  SambeOperator op;
  op.K = K;
  op.omega = drive.omega();
  op.dark = rc.dark;
  op.reduced_basis = rc.basis;
  const int blocks = 2 * K + 1;
  const int r = static_cast<int>(rc.diag.size());
  if (frame == SambeFrame::Unrotated) {
    op.nd = 1;
    op.dense = Eigen::MatrixXcd::Zero(blocks, blocks);
    for (int l = -K; l <= K; ++l) {
      op.dense(l + K, l + K) += rc.diag(0) + l * op.omega;
      for (int k = -K; k <= K; ++k) op.dense(l + K, k + K) += drive.harmonic(l - k);
    }
  } else {
    op.nd = 2;
    op.dense = Eigen::MatrixXcd::Zero(2 * blocks, 2 * blocks);
    std::vector<cplx> f(static_cast<std::size_t>(4 * K + 1));
    for (int d = -2 * K; d <= 2 * K; ++d) f[static_cast<std::size_t>(d + 2 * K)] = renorm_factor(drive, d);
    const double link01 = rc.off(0);
    for (int l = -K; l <= K; ++l) {
      const int il = 2 * (l + K);
      op.dense(il, il) = rc.diag(0) + drive.mean() + l * op.omega;
      op.dense(il + 1, il + 1) = rc.diag(1) + l * op.omega;
      for (int k = -K; k <= K; ++k) {
        const int ik = 2 * (k + K);
        const cplx c = link01 * f[static_cast<std::size_t>(l - k + 2 * K)];
        op.dense(il + 1, ik) += c;
        op.dense(ik, il + 1) += std::conj(c);
      }
    }
  }
  op.tail_diag = rc.diag.tail(r - op.nd);
  op.tail_off = rc.off.tail(r - op.nd - 1 > 0 ? r - op.nd - 1 : 0);
  op.link = rc.off(op.nd - 1);
  return op;
}

namespace {

double pivot_floor(const SambeOperator& op) {
  double m = op.link * op.link;
  for (Eigen::Index i = 0; i < op.tail_off.size(); ++i) m = std::max(m, op.tail_off(i) * op.tail_off(i));
  return std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon() * std::max(1.0, m);
}

}  // namespace

long SambeOperator::count_below(double sigma) const {
  const double pivmin = pivot_floor(*this);
  const Eigen::Index nt = tail_diag.size();
  long neg = 0;
  Eigen::MatrixXcd s = dense;
  s.diagonal().array() -= sigma;
  for (int l = -K; l <= K; ++l) {
    const double shift = l * omega - sigma;
    double d = tail_diag(nt - 1) + shift;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++neg;
    for (Eigen::Index i = nt - 2; i >= 0; --i) {
      d = tail_diag(i) + shift - tail_off(i) * tail_off(i) / d;
      if (std::abs(d) < pivmin) d = -pivmin;
      if (d < 0.0) ++neg;
    }
    const Eigen::Index idx = static_cast<Eigen::Index>(l + K) * nd + nd - 1;
    s(idx, idx) -= link * link / d;
  }
  neg += hermitian_negative_count(s);
  for (double e : dark) {
    // harmonics l in [-K, K] with e + l omega < sigma
    const double bound = (sigma - e) / omega;
    long hi = static_cast<long>(std::ceil(bound)) - 1;
    hi = std::min<long>(hi, K);
    if (hi >= -K) neg += hi + K + 1;
  }
  return neg;
}

Eigen::VectorXcd SambeOperator::solve_shifted(double sigma, const Eigen::VectorXcd& b) const {
  const double pivmin = pivot_floor(*this);
  const Eigen::Index nt = tail_diag.size();
  const int r = reduced_sites();
  const int blocks = 2 * K + 1;
  Eigen::MatrixXd d(nt, blocks);
  Eigen::MatrixXcd rr(nt, blocks);
  Eigen::MatrixXcd s = dense;
  s.diagonal().array() -= sigma;
  Eigen::VectorXcd rhs(nd * blocks);
  for (int l = -K; l <= K; ++l) {
    const int c = l + K;
    const Eigen::Index base = static_cast<Eigen::Index>(c) * r;
    for (int q = 0; q < nd; ++q) rhs(c * nd + q) = b(base + q);
    const double shift = l * omega - sigma;
    d(nt - 1, c) = tail_diag(nt - 1) + shift;
    if (std::abs(d(nt - 1, c)) < pivmin) d(nt - 1, c) = -pivmin;
    rr(nt - 1, c) = b(base + nd + nt - 1);
    for (Eigen::Index i = nt - 2; i >= 0; --i) {
      double di = tail_diag(i) + shift - tail_off(i) * tail_off(i) / d(i + 1, c);
      if (std::abs(di) < pivmin) di = -pivmin;
      d(i, c) = di;
      rr(i, c) = b(base + nd + i) - tail_off(i) * rr(i + 1, c) / d(i + 1, c);
    }
    const Eigen::Index idx = static_cast<Eigen::Index>(c) * nd + nd - 1;
    s(idx, idx) -= link * link / d(0, c);
    rhs(idx) -= link * rr(0, c) / d(0, c);
  }
  const Eigen::VectorXcd xd = s.partialPivLu().solve(rhs);
  Eigen::VectorXcd x(static_cast<Eigen::Index>(blocks) * r);
  for (int c = 0; c < blocks; ++c) {
    const Eigen::Index base = static_cast<Eigen::Index>(c) * r;
    for (int q = 0; q < nd; ++q) x(base + q) = xd(c * nd + q);
    cplx prev = (rr(0, c) - link * xd(c * nd + nd - 1)) / d(0, c);
    x(base + nd) = prev;
    for (Eigen::Index i = 0; i + 1 < nt; ++i) {
      prev = (rr(i + 1, c) - tail_off(i) * prev) / d(i + 1, c);
      x(base + nd + i + 1) = prev;
    }
  }
  return x;
}

std::vector<double> sambe_eigenvalues(const SambeOperator& op, double lo, double hi, double tol) {
  struct Interval {
    double a, b;
    long na, nb;
  };
  std::vector<double> out;
  std::vector<Interval> stack{{lo, hi, op.count_below(lo), op.count_below(hi)}};
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const long k = iv.nb - iv.na;
    if (k <= 0) continue;
    if (iv.b - iv.a <= tol) {
      for (long i = 0; i < k; ++i) out.push_back(0.5 * (iv.a + iv.b));
      continue;
    }
    const double mid = 0.5 * (iv.a + iv.b);
    const long nm = op.count_below(mid);
    // Push the upper half first so the lower half is processed first.
    stack.push_back({mid, iv.b, nm, iv.nb});
    stack.push_back({iv.a, mid, iv.na, nm});
  }
  std::sort(out.begin(), out.end());
  return out;
}

SambeZone sambe_zone(const SambeOperator& op, double centre) {
  const double w = op.omega;
  const double delta = 0.1 * w;
  const double b0 = centre - 0.5 * w;
  const std::vector<double> ev = sambe_eigenvalues(op, b0 - delta, centre + 0.5 * w + delta);
  // Place the zone cut in the widest gap (modulo omega) near the nominal boundary b0.
  std::vector<double> ys{-delta, delta};
  for (double x : ev) {
    const double y = fold(x - b0, w);
    if (std::abs(y) < delta) ys.push_back(y);
  }
  std::sort(ys.begin(), ys.end());
  double best_gap = -1.0, cut = b0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const double gap = ys[i + 1] - ys[i];
    if (gap > best_gap) {
      best_gap = gap;
      cut = b0 + 0.5 * (ys[i] + ys[i + 1]);
    }
  }
  SambeZone z;
  z.cut = cut;
  for (double x : ev) {
    if (x >= cut && x < cut + w) {
      z.raw.push_back(x);
      z.folded.push_back(fold(x, w));
    }
  }
  return z;
}

namespace {

Eigen::VectorXcd inverse_iteration(const SambeOperator& op, double e, const std::vector<Eigen::VectorXcd>& deflate,
                                   std::mt19937_64& rng) {
  const Eigen::Index size = static_cast<Eigen::Index>(2 * op.K + 1) * op.reduced_sites();
  std::normal_distribution<double> normal;
  Eigen::VectorXcd x(size);
  for (Eigen::Index i = 0; i < size; ++i) x(i) = cplx(normal(rng), normal(rng));
  const double sigma = e + 1e-10 * std::max(1.0, std::abs(e));
  for (int it = 0; it < 4; ++it) {
    for (const auto& v : deflate) x -= v.dot(x) * v;
    x.normalize();
    x = op.solve_shifted(sigma, x);
  }
  for (const auto& v : deflate) x -= v.dot(x) * v;
  x.normalize();
  return x;
}

// u(0) on all L+1 sites from a Sambe eigenvector (t = 0, where both frames coincide).
Eigen::VectorXcd initial_profile(const SambeOperator& op, const Eigen::VectorXcd& x) {
  const int r = op.reduced_sites();
  Eigen::VectorXcd red = Eigen::VectorXcd::Zero(r);
  for (int c = 0; c < 2 * op.K + 1; ++c) red += x.segment(static_cast<Eigen::Index>(c) * r, r);
  Eigen::VectorXcd full = op.reduced_basis.size() == 0 ? red : Eigen::VectorXcd(op.reduced_basis.cast<cplx>() * red);
  const double nrm = full.norm();
  if (nrm > 0.0) full /= nrm;
  return full;
}

Eigen::VectorXcd dark_profile(const ChainSpec& chain, int k) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(chain.sites());
  for (int j = 1; j <= chain.L; ++j) {
    v(j) = std::sqrt(2.0 / chain.L) * std::sin(2.0 * pi * k * (j - 1) / chain.L);
  }
  return v;
}

}  // namespace

QuasienergySpectrum solve_sambe(const ChainSpec& chain, const DriveProtocol& drive, const SambeOptions& options) {
  chain.validate();
  drive.validate();
  const KPolicy& p = options.policy;
  require(p.K0 >= 1 && p.K_max >= p.K0, "K policy needs 1 <= K0 <= K_max");
  require(p.step >= 1 && p.growth >= 1.0 && p.tol > 0.0, "K policy needs step >= 1, growth >= 1, tol > 0");

  QuasienergySpectrum spec;
  spec.omega = drive.omega();
  spec.solver = "sambe";
  int K = p.K0;
  SambeOperator op = build_sambe_operator(chain, drive, K, options.frame);
  SambeZone zone = sambe_zone(op, chain.lambda);
  spec.convergence.converged = false;
  for (;;) {
    const int next = std::max(K + p.step, static_cast<int>(std::ceil(K * p.growth)));
    if (next > p.K_max) break;
    SambeOperator op2 = build_sambe_operator(chain, drive, next, options.frame);
    SambeZone zone2 = sambe_zone(op2, chain.lambda);
    const double shift = spectrum_distance(zone2.folded, zone.folded, spec.omega);
    spec.convergence.history.emplace_back(next, shift);
    spec.convergence.last_shift = shift;
    K = next;
    op = std::move(op2);
    zone = std::move(zone2);
    if (shift < p.tol) {
      spec.convergence.converged = true;
      break;
    }
  }
  spec.K = K;
  spec.convergence.K_final = K;
  if (!spec.convergence.converged) {
    spec.warnings.push_back("TruncationNotConverged: K_max=" + std::to_string(p.K_max) +
                            " reached, last shift " + std::to_string(spec.convergence.last_shift));
  }
  if (static_cast<int>(zone.raw.size()) != chain.sites()) {
    spec.warnings.push_back("zone holds " + std::to_string(zone.raw.size()) + " representatives, expected " +
                            std::to_string(chain.sites()));
  }

  // Split off dark levels (ring only): one representative per level inside the window.
  std::vector<int> dark_of(zone.raw.size(), -1);
  for (std::size_t k = 0; k < op.dark.size(); ++k) {
    const double e = op.dark[k];
    const double l = std::floor((e - zone.cut) / spec.omega);
    const double image = e - l * spec.omega;
    std::size_t best = zone.raw.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zone.raw.size(); ++i) {
      const double dd = std::abs(zone.raw[i] - image);
      if (dark_of[i] < 0 && dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    if (best < zone.raw.size() && best_d < 1e-8) dark_of[best] = static_cast<int>(k) + 1;
  }

  std::mt19937_64 rng(20240611ULL);
  std::vector<Eigen::VectorXcd> cluster;
  double cluster_e = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < zone.raw.size(); ++i) {
    SpectrumEntry entry;
    entry.quasienergy = zone.folded[i];
    spec.entries.push_back(entry);
    if (!options.eigenvectors) continue;
    if (dark_of[i] > 0) {
      spec.u0.push_back(dark_profile(chain, dark_of[i]));
      continue;
    }
    const double e = zone.raw[i];
    if (!(std::abs(e - cluster_e) < 1e-9 * std::max(1.0, std::abs(e)))) cluster.clear();
    cluster_e = e;
    const Eigen::VectorXcd x = inverse_iteration(op, e, cluster, rng);
    cluster.push_back(x);
    spec.u0.push_back(initial_profile(op, x));
  }
  if (options.eigenvectors) classify_modes(spec, chain, options.tolerances);
  return spec;
}

Eigen::MatrixXcd sambe_mode_harmonics(const SambeOperator& op, const ChainSpec& chain, const DriveProtocol& drive,
                                      SambeFrame frame, double raw_eigenvalue) {
  std::mt19937_64 rng(7ULL);
  const Eigen::VectorXcd x = inverse_iteration(op, raw_eigenvalue, {}, rng);
  const int r = op.reduced_sites();
  const int blocks = 2 * op.K + 1;
  Eigen::MatrixXcd h(chain.sites(), blocks);
  for (int c = 0; c < blocks; ++c) {
    const Eigen::VectorXcd red = x.segment(static_cast<Eigen::Index>(c) * r, r);
    h.col(c) = op.reduced_basis.size() == 0 ? red : Eigen::VectorXcd(op.reduced_basis.cast<cplx>() * red);
  }
  if (frame == SambeFrame::Rotated) {
    // Lab impurity amplitude is exp(-i theta(t)) times the rotated one.
    const Eigen::VectorXcd rot = h.row(0).transpose();
    for (int k = -op.K; k <= op.K; ++k) {
      cplx s = 0.0;
      for (int m = -op.K; m <= op.K; ++m) s += renorm_factor(drive, k - m) * rot(m + op.K);
      h(0, k + op.K) = s;
    }
  }
  // Re-index so the representative sits in the central zone.
  const int n = static_cast<int>(std::lround((raw_eigenvalue - fold(raw_eigenvalue, op.omega)) / op.omega));
  Eigen::MatrixXcd shifted = Eigen::MatrixXcd::Zero(h.rows(), h.cols());
  for (int k = -op.K; k <= op.K; ++k) {
    const int src = k + n;
    if (src >= -op.K && src <= op.K) shifted.col(k + op.K) = h.col(src + op.K);
  }
  return shifted;
}

}  // namespace floq
