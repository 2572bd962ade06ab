#pragma once

// Monte Carlo harnesses: pointwise coverage of bootstrap bands and the error
// metrics of point estimates over repeated simulated panels.

#include "tvmed/bootstrap.hpp"
#include "tvmed/simulation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tvmed {

struct CoverageConfig {
  SimScenario scenario;
  std::size_t replications = 500;
  std::vector<double> check_times = {0.2, 0.4, 0.6, 0.8};
  BootstrapConfig bootstrap;  // its seed and workers are overridden per replication
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct CheckRecord {
  double snapped_time = 0.0;
  std::vector<double> eta_true, eta_hat, lower, upper;  // per arm
  std::vector<bool> covered;
};

struct ReplicationRecord {
  std::size_t replication = 0;
  bool failed = false;
  std::string error;
  std::size_t bootstrap_failures = 0;
  std::vector<CheckRecord> checks;
};

struct CoverageResult {
  std::vector<double> check_times;
  std::vector<double> snapped_times;  // nearest default evaluation point
  Matrix coverage;                    // n_check x K, over successful replications
  std::size_t replications = 0;
  std::size_t failures = 0;
  std::vector<ReplicationRecord> log;
};

/// Replication r simulates with seed stream 2r and bootstraps with stream
/// 2r+1 of `seed`; results are identical for any worker count.
CoverageResult coverage_experiment(const CoverageConfig& config);

/// Nearest element of `grid` to `t`.
std::size_t snap_index(const Vector& grid, double t);

struct ErrorRecord {
  bool failed = false;
  std::vector<ErrorMetrics> metrics;   // per arm, over the evaluation grid
  std::vector<double> max_error;      // per arm, max |eta - eta_hat| / range(eta) on the interior
};

struct ErrorExperimentConfig {
  SimScenario scenario;
  std::size_t replications = 50;
  std::uint64_t seed = 0;
  FitOptions fit;
  double interior_lo = 0.1;
  double interior_hi = 0.9;
  std::size_t workers = 1;
};

std::vector<ErrorRecord> error_experiment(const ErrorExperimentConfig& config);

}  // namespace tvmed
