#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "floq/model.hpp"

namespace floq {

enum class ModeClass { Band, Bound, Marginal };

const char* to_string(ModeClass c) noexcept;

struct ClassifyTolerances {
  double gap_tol = -1.0;  // < 0: max(1e-3 omega, 3 * 4J / L)
  double w_min = 0.25;
  int j_loc = 20;

  double resolved_gap_tol(const ChainSpec& chain, double omega) const;
};

struct SpectrumEntry {
  double quasienergy = 0.0;
  ModeClass cls = ModeClass::Band;
  double gap_distance = 0.0;
  double impurity_weight = 0.0;  // |u_0(0)|^2
  double region_weight = 0.0;    // sum_{j <= j_loc} |u_j(0)|^2
  double localization_length = std::numeric_limits<double>::infinity();
};

struct ConvergenceReport {
  bool converged = true;
  int K_final = 0;
  double last_shift = 0.0;
  std::vector<std::pair<int, double>> history;  // (K, max shift vs previous K)
};

struct QuasienergySpectrum {
  double omega = 0.0;
  std::string solver;  // "monodromy" or "sambe"
  int K = 0;
  std::vector<SpectrumEntry> entries;
  std::vector<Eigen::VectorXcd> u0;  // u_alpha(0) on all L+1 sites, same order as entries
  ConvergenceReport convergence;
  bool gap_undefined = false;
  double gap_tol = 0.0;
  ClassifyTolerances tolerances;
  std::vector<std::string> warnings;

  int bound_count() const;
  /// Index of the Bound entry with the largest impurity weight, or -1.
  int strongest_bound() const;
};

/// Fills impurity/region weights and the localization length from a u(0) vector.
void measure_mode(const Eigen::VectorXcd& u0, int j_loc, SpectrumEntry& entry);

/// Gap distance: circular distance of eps from the folded band centre minus 2J, clipped at 0.
double gap_distance(double eps, const ChainSpec& chain, double omega);

/// Dual criterion (in-gap and localized). Sets gap_undefined and leaves every mode Band
/// when 2 pi / T <= 4J. Modes within 2 gap_tol of the band edge are Marginal.
void classify_modes(QuasienergySpectrum& spectrum, const ChainSpec& chain, const ClassifyTolerances& tol = {});

/// Largest circular nearest-neighbour distance between two folded spectra.
double spectrum_distance(const std::vector<double>& a, const std::vector<double>& b, double omega);

std::vector<double> quasienergies(const QuasienergySpectrum& s);

}  // namespace floq
