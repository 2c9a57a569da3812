#pragma once

#include <functional>
#include <string>
#include <vector>

#include "floq/sambe.hpp"
#include "floq/spectrum.hpp"
#include "floq/trajectory.hpp"

namespace floq {

enum class SweepAxis { Amplitude, SwitchTime, Period, SymmetricAmplitude };

const char* to_string(SweepAxis a) noexcept;
SweepAxis sweep_axis_from_string(const std::string& text);

struct SweepPlan {
  SweepAxis axis = SweepAxis::Amplitude;
  double start = 0.0;
  double stop = 40.0;
  double step = 0.5;
  ChainSpec chain;
  DriveProtocol base;  // step drive; the swept field is overwritten per point
  bool dynamics = true;
  bool spectrum = true;
  bool filter = false;
  double horizon = 100.0;
  int samples_per_period = 50;
  double plateau_t0 = 80.0;
  double plateau_t1 = 100.0;
  double plateau_threshold = 0.05;
  ClassifyTolerances tolerances;
  int workers = 1;

  std::vector<double> values() const;
  void validate() const;
};

DriveProtocol drive_at(const SweepPlan& plan, double value);

struct SweepPoint {
  std::size_t index = 0;
  double value = 0.0;
  bool ok = false;
  std::string error;
  int bound_count = 0;
  bool marginal = false;
  double gap_distance = 0.0;
  double impurity_weight = 0.0;  // of the strongest localized mode
  double plateau = std::numeric_limits<double>::quiet_NaN();
  double p_infinity_mean = 0.0;
  double filter_prediction = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> times;
  std::vector<double> p;
  std::vector<SpectrumEntry> entries;
};

struct SweepSummary {
  std::size_t points = 0;
  std::size_t failed = 0;
  std::size_t excluded_marginal = 0;
  std::size_t scored = 0;
  std::size_t agree = 0;
  double agreement = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  SweepPlan plan;
  std::vector<SweepPoint> points;
  SweepSummary summary;
};

/// Evaluates every grid point (in parallel when workers > 1); results are ordered by grid
/// index, so output is identical for any worker count. Per-point failures are recorded.
SweepResult run_sweep(const SweepPlan& plan, const std::function<void(std::size_t)>& on_point_done = {});

SweepSummary summarize(const SweepPlan& plan, const std::vector<SweepPoint>& points);

struct ConvergenceRow {
  std::string study;   // "h", "K", "L"
  double parameter = 0.0;
  double observable = 0.0;
  double drift = 0.0;
  double target = 0.0;
  bool pass = false;
};

struct ConvergenceOptions {
  double volterra_horizon = 20.0;
  double plateau_t0 = 80.0;
  double plateau_t1 = 100.0;
  int samples_per_period = 50;
  SambeOptions sambe;
};

/// Drift of the observables under h-halving, K growth (K -> K+4) and L doubling.
std::vector<ConvergenceRow> convergence_report(const ChainSpec& chain, const DriveProtocol& drive,
                                               const ConvergenceOptions& options = {});

}  // namespace floq
