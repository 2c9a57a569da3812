#pragma once

#include <map>
#include <string>
#include <vector>

#include "floq/model.hpp"

namespace floq {

/// Phase frame of a stored amplitude series. c0_prime evolves under
/// diag(lambda+A, lambda, ...); lab carries the extra exp(i Phi/2) of the
/// spin Hamiltonian with Phi = integral of (lambda + A).
inline constexpr const char* frame_c0_prime = "c0_prime";
inline constexpr const char* frame_lab = "lab";

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> c0;
  std::vector<double> p;
  std::string solver;
  std::string frame = frame_c0_prime;
  double h = 0.0;
  bool approximate = false;
  ChainSpec chain;
  DriveProtocol drive;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return times.size(); }
  void push(double t, cplx c) {
    times.push_back(t);
    c0.push_back(c);
    p.push_back(std::norm(c));
  }
};

struct SuperpositionState {
  cplx alpha{1.0 / 1.4142135623730951, 0.0};
  cplx beta{1.0 / 1.4142135623730951, 0.0};
  void validate() const;
};

/// Mean of P over the samples with t in [t0, t1].
double window_mean(const std::vector<double>& times, const std::vector<double>& values, double t0, double t1);

/// Linear interpolation of P at time t (times ascending).
double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t);

}  // namespace floq
