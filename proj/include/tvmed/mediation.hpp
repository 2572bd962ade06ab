#pragma once

// Step two: smoothed coefficient curves and the mediation effect
// eta_k(t) = alpha_k(t - dt) * beta(t).

#include "tvmed/estimator.hpp"
#include "tvmed/panel.hpp"
#include "tvmed/smoother.hpp"

#include <optional>
#include <utility>

namespace tvmed {

struct SeriesBandwidths {
  Vector alpha;  // per arm
  Vector gamma;  // per arm
  double beta = 0.0;
};

struct SmootherConfig {
  KernelFamily family = KernelFamily::Epanechnikov;
  std::optional<double> bandwidth;        // one value for every series
  std::optional<SeriesBandwidths> fixed;  // per-series values, e.g. frozen for bootstrap
};

struct SmoothedCurves {
  Vector eval_grid;
  double dt = 0.0;
  KernelFamily family = KernelFamily::Epanechnikov;
  Matrix alpha;  // n_eval x K, evaluated at eval_grid - dt
  Matrix gamma;  // n_eval x K
  Vector beta;   // n_eval
  SeriesBandwidths bandwidths;

  std::size_t n_arms() const { return static_cast<std::size_t>(alpha.cols()); }
};

struct MediationBand {
  Vector eval_grid;
  Matrix eta;  // n_eval x K
  std::optional<Matrix> lower;
  std::optional<Matrix> upper;
  double level = 0.95;

  bool has_bounds() const { return lower.has_value() && upper.has_value(); }
};

/// End-to-end point estimate: raw estimates, smoothed curves and eta.
struct Fit {
  RawEstimates raw;
  SmoothedCurves curves;
  MediationBand band;
};

struct FitOptions {
  double rank_tol = kDefaultRankTol;
  std::optional<double> dt;  // default_dt(panel) when absent
  SmootherConfig smoother;
  std::optional<Vector> eval_grid;  // raw estimable times when absent
};

Fit fit_mediation(const Panel& panel, const FitOptions& options);

/// Half the smallest gap between consecutive grid times.
double default_dt(const Panel& panel);

/// Selects bandwidths for every raw series (override > fixed > rule of thumb).
SeriesBandwidths select_bandwidths(const RawEstimates& raw, const SmootherConfig& config);

/// Smooths every raw series onto eval_grid. Errors from the smoother are
/// rethrown with the offending series named.
SmoothedCurves smooth_all(const RawEstimates& raw, double dt, const SmootherConfig& config,
                          const Vector& eval_grid);

MediationBand mediation_effect(const SmoothedCurves& curves);

/// Weight vectors over RawEstimates::stacked() such that
/// eta_k(t) = (w_a . d)(w_b . d).
std::pair<Vector, Vector> mediation_weight_vectors(const RawEstimates& raw, double t, double dt,
                                                   std::size_t arm,
                                                   const SeriesBandwidths& bandwidths,
                                                   KernelFamily family);

/// eta through the inner-product route; agrees with mediation_effect.
Matrix mediation_effect_inner_product(const RawEstimates& raw, const SmoothedCurves& curves);

}  // namespace tvmed
