#pragma once

// Subject-level percentile bootstrap for the mediation effect.

#include "tvmed/mediation.hpp"
#include "tvmed/random.hpp"

#include <cstdint>
#include <vector>

namespace tvmed {

struct BootstrapConfig {
  std::size_t replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  FitOptions fit;                  // shared by the original fit and every replicate
  bool freeze_bandwidths = false;  // reuse the original fit's bandwidths
  double max_failure_fraction = 0.10;
  std::size_t workers = 1;

  /// Throws InvalidArgument unless 0 < level < 1 and
  /// replicates >= 2 / (1 - level).
  void validate() const;
};

/// Per-arm replicate matrices (replicate x eval point). Rows of failed
/// replicates are unused.
struct BootstrapDistribution {
  Vector eval_grid;
  std::vector<Matrix> eta;
  std::vector<bool> failed;

  std::size_t replicates() const { return failed.size(); }
  std::size_t failures() const;
};

/// Draws N subjects with replacement; each copy keeps its whole series and
/// gets the id "<original>#<draw position>".
Panel resample_panel(const Panel& panel, Rng& rng);

/// Order statistic conventions on an ascending sample of size n (1-based
/// index, clamped to [1, n]):
///   lower: ceil(q n)        upper: floor(q n) + 1
/// q n is rounded to the nearest integer first when within 1e-9 of it.
double percentile_lower(const std::vector<double>& sorted, double q);
double percentile_upper(const std::vector<double>& sorted, double q);
inline double percentile(const std::vector<double>& sorted, double q) {
  return percentile_lower(sorted, q);
}

/// Runs the whole pipeline on `replicates` resamples evaluated on
/// `reference.curves.eval_grid`. Replicate r draws from Rng(seed, r), so the
/// result does not depend on the worker count.
BootstrapDistribution bootstrap_distribution(const Panel& panel, const Fit& reference,
                                             const BootstrapConfig& config);

/// Percentile bounds at `level` from the successful replicates. Throws
/// TooManyFailures when the failed share exceeds max_failure_fraction.
void attach_percentile_bounds(MediationBand& band, const BootstrapDistribution& dist,
                              double level, double max_failure_fraction);

struct BootstrapResult {
  Fit fit;  // original-panel estimate; fit.band carries the bounds
  BootstrapDistribution distribution;
};

BootstrapResult bootstrap_band(const Panel& panel, const BootstrapConfig& config);

}  // namespace tvmed
