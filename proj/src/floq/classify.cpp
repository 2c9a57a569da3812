#include "floq/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"

namespace floq {

const char* to_string(ModeClass c) noexcept {
  switch (c) {
    case ModeClass::Band: return "band";
    case ModeClass::Bound: return "bound";
    case ModeClass::Marginal: return "marginal";
  }
  return "band";
}

double ClassifyTolerances::resolved_gap_tol(const ChainSpec& chain, double omega) const {
  if (gap_tol >= 0.0) return gap_tol;
  return std::max(1e-3 * omega, 3.0 * 4.0 * chain.J / chain.L);
}

int QuasienergySpectrum::bound_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const SpectrumEntry& e) { return e.cls == ModeClass::Bound; }));
}

int QuasienergySpectrum::strongest_bound() const {
  int best = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].cls != ModeClass::Bound) continue;
    if (best < 0 || entries[i].impurity_weight > entries[static_cast<std::size_t>(best)].impurity_weight) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

void measure_mode(const Eigen::VectorXcd& u0, int j_loc, SpectrumEntry& entry) {
  const double total = u0.squaredNorm();
  const double norm = total > 0.0 ? total : 1.0;
  const Eigen::Index n = u0.size();
  entry.impurity_weight = std::norm(u0(0)) / norm;
  const Eigen::Index last = std::min<Eigen::Index>(n - 1, j_loc);
  entry.region_weight = u0.head(last + 1).squaredNorm() / norm;

  // Log-linear fit of |u_j|^2 over the sites just beyond the impurity.
  const Eigen::Index j_end = std::min<Eigen::Index>(n - 1, 2 * j_loc);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Eigen::Index j = 1; j <= j_end; ++j) {
    const double w = std::norm(u0(j)) / norm;
    if (w < 1e-280) continue;
    const double x = static_cast<double>(j);
    const double y = std::log(w);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  entry.localization_length = std::numeric_limits<double>::infinity();
  if (m >= 3) {
    const double den = m * sxx - sx * sx;
    const double slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
    // |u_j|^2 ~ exp(-2 j / xi)
    if (slope < 0.0) entry.localization_length = -2.0 / slope;
  }
}

double gap_distance(double eps, const ChainSpec& chain, double omega) {
  const double centre = fold(chain.lambda, omega);
  return std::max(0.0, circular_distance(eps, centre, omega) - 2.0 * chain.J);
}

void classify_modes(QuasienergySpectrum& spectrum, const ChainSpec& chain, const ClassifyTolerances& tol) {
  require(tol.w_min >= 0.0 && tol.w_min <= 1.0, "w_min must lie in [0, 1]");
  require(tol.j_loc >= 0, "j_loc must be >= 0");
  const double omega = spectrum.omega;
  spectrum.tolerances = tol;
  spectrum.gap_tol = tol.resolved_gap_tol(chain, omega);
  spectrum.gap_undefined = omega <= 4.0 * chain.J;
  for (std::size_t i = 0; i < spectrum.entries.size(); ++i) {
    SpectrumEntry& e = spectrum.entries[i];
    if (i < spectrum.u0.size()) measure_mode(spectrum.u0[i], tol.j_loc, e);
    e.gap_distance = spectrum.gap_undefined ? 0.0 : gap_distance(e.quasienergy, chain, omega);
    e.cls = ModeClass::Band;
    if (spectrum.gap_undefined) continue;
    if (e.region_weight <= tol.w_min) continue;
    if (e.gap_distance > 2.0 * spectrum.gap_tol) {
      e.cls = ModeClass::Bound;
    } else {
      e.cls = ModeClass::Marginal;
    }
  }
}

namespace {

double one_way_distance(const std::vector<double>& from, std::vector<double> to, double omega) {
  std::sort(to.begin(), to.end());
  double worst = 0.0;
  for (double x : from) {
    // Nearest neighbour of x or of its +-omega images.
    double best = std::numeric_limits<double>::infinity();
    for (double shift : {-omega, 0.0, omega}) {
      const double y = x + shift;
      const auto it = std::lower_bound(to.begin(), to.end(), y);
      if (it != to.end()) best = std::min(best, std::abs(*it - y));
      if (it != to.begin()) best = std::min(best, std::abs(*(it - 1) - y));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double spectrum_distance(const std::vector<double>& a, const std::vector<double>& b, double omega) {
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(one_way_distance(a, b, omega), one_way_distance(b, a, omega));
}

std::vector<double> quasienergies(const QuasienergySpectrum& s) {
  std::vector<double> q;
  q.reserve(s.entries.size());
  for (const auto& e : s.entries) q.push_back(e.quasienergy);
  return q;
}

}  // namespace floq
