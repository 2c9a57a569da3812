#pragma once

#include <map>
#include <string>
#include <vector>

#include "floq/sambe.hpp"
#include "floq/spectrum.hpp"
#include "floq/sweep.hpp"
#include "floq/trajectory.hpp"

namespace floq {

/// Fully resolved run configuration. Every field is addressable as "section.key".
struct RunConfig {
  std::string preset;

  ChainSpec chain;

  std::string drive_kind = "step";  // step | harmonic
  double a1 = 0.0;
  double a2 = 0.0;
  double tau = 0.1 * pi;
  double period = 0.25 * pi;
  std::map<int, cplx> harmonics;  // harmonic drives only

  double horizon = 100.0;
  double h = 0.0;
  int refinements = 1;
  int samples_per_period = 50;
  double crosscheck_horizon = 20.0;
  std::string spectrum_solver = "monodromy";  // monodromy | sambe
  KPolicy k_policy;
  SambeFrame sambe_frame = SambeFrame::Rotated;
  ClassifyTolerances tolerances;
  double plateau_t0 = 80.0;
  double plateau_t1 = 100.0;
  double plateau_threshold = 0.05;
  double profile_fraction = 0.0;  // FBS profile at t = fraction * T
  int period_samples = 128;
  int mode_K = 16;
  double filter_rel_tol = 1e-9;
  int filter_grid_points = 2001;
  double f0_lo = 1.0;
  double f0_hi = 40.0;

  cplx alpha{1.0 / 1.4142135623730951, 0.0};
  cplx beta{1.0 / 1.4142135623730951, 0.0};

  std::string output_dir = "out";

  SweepAxis sweep_axis = SweepAxis::Amplitude;
  double sweep_start = 0.0;
  double sweep_stop = 40.0;
  double sweep_step = 0.5;
  int workers = 1;
  bool sweep_dynamics = true;
  bool sweep_spectrum = true;
  bool sweep_filter = false;

  DriveProtocol drive() const;
  SuperpositionState state() const { return {alpha, beta}; }
  SambeOptions sambe_options() const;
  SweepPlan sweep_plan() const;
  /// Throws Validation with the offending key in the message.
  void validate() const;
};

/// Parses a number in units of J or 1/J; a trailing "pi" multiplies by pi ("0.25pi", "pi", "-2pi").
double parse_number(const std::string& text);

/// fig1 ... fig6; throws Validation for unknown names.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Sets one "section.key" field. Setting "preset" replaces the whole config by the preset.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);
std::vector<std::string> config_keys();

/// Flat INI text: "[section]" headers, "key = value" lines, '#' or ';' comments.
/// A "preset" key at top level is applied first so explicit keys override it.
RunConfig parse_config(const std::string& text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});
/// Round-trips through parse_config to an identical config.
std::string serialize_config(const RunConfig& cfg);

}  // namespace floq
