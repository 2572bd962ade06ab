#pragma once

// Synthetic panels from the time-varying mediation model with
// exponential-covariance (Ornstein-Uhlenbeck) errors.

#include "tvmed/expression.hpp"
#include "tvmed/panel.hpp"
#include "tvmed/random.hpp"
#include "tvmed/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tvmed {

/// Zero-mean Gaussian path with cov(s, t) = sigma2 exp(-phi |s - t|) at
/// nondecreasing `times`, by the exact Markov recursion
///   e_1 = sqrt(sigma2) z_1,  e_{j+1} = rho_j e_j + sqrt(sigma2 (1 - rho_j^2)) z_{j+1},
///   rho_j = exp(-phi (t_{j+1} - t_j)).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> ou_path(
    const Eigen::MatrixBase<Derived>& times, typename Derived::Scalar sigma2,
    typename Derived::Scalar phi, Rng& rng) {
  typedef typename Derived::Scalar S;
  const Eigen::Index n = times.size();
  Eigen::Matrix<S, Eigen::Dynamic, 1> path(n);
  if (n == 0) return path;
  const S sd = std::sqrt(sigma2);
  path(0) = sd * S(rng.normal());
  for (Eigen::Index j = 1; j < n; ++j) {
    const S gap = times(j) - times(j - 1);
    if (gap < S(0)) throw InvalidArgument("ou_path: times must be nondecreasing");
    const S rho = std::exp(-phi * gap);
    path(j) = rho * path(j - 1) + sd * std::sqrt(std::max(S(0), S(1) - rho * rho)) * S(rng.normal());
  }
  return path;
}

struct ArmEffects {
  Expression alpha;  // effect of the arm on the mediator
  Expression gamma;  // direct effect on the outcome
  double probability = 0.5;
};

/// Where the data-generating process takes the lagged mediator from.
enum class LagMode {
  TrueLag,       // M(t_j - dt), simulated on the merged grid
  PreviousGrid,  // M(t_{j-1}), i.e. exactly the estimator's substitute
};

const char* to_string(LagMode m);
LagMode parse_lag_mode(const std::string& s);

enum class BuiltinModel { ModelI, ModelII };

inline const char* to_string(BuiltinModel m) { return m == BuiltinModel::ModelI ? "i" : "ii"; }
BuiltinModel parse_builtin_model(const std::string& s);

/// Fully describes one synthetic data-generating process.
struct SimScenario {
  std::string name = "custom";
  Expression alpha0;
  Expression beta0;
  Expression beta;
  std::vector<ArmEffects> arms;  // K >= 1; the remaining probability is the reference arm
  double sigma2 = 15.0;
  double phi = 0.3;
  std::optional<double> sigma2_outcome;  // defaults to sigma2
  std::size_t n_times = 50;
  double t_start = 0.0;
  double t_end = 1.0;
  std::optional<double> dt;  // default: half the grid spacing
  std::size_t n_subjects = 100;
  std::uint64_t seed = 0;
  LagMode lag_mode = LagMode::TrueLag;
  double dropout = 0.0;  // independent per-cell missingness probability

  void validate() const;
  std::vector<double> grid() const;  // equally spaced, both endpoints included
  double resolved_dt() const;
  double outcome_sigma2() const { return sigma2_outcome.value_or(sigma2); }
  std::size_t n_arms() const { return arms.size(); }
};

SimScenario builtin_scenario(BuiltinModel model);

/// A two-arm scenario in the shape of a three-condition trial: arm 1 takes
/// model i's alpha and gamma, arm 2 model ii's, with model i's beta. Each arm
/// and the reference group get probability 1/3.
SimScenario two_arm_scenario();

/// alpha(t - dt), beta(t), gamma(t) and eta(t) = alpha(t - dt) beta(t) per arm.
struct GroundTruth {
  Vector times;
  Matrix alpha;  // at times - dt
  Matrix gamma;
  Vector beta;
  Matrix eta;
};

GroundTruth ground_truth(const SimScenario& scenario, const Vector& times);

struct SimulatedPanel {
  Panel panel;
  GroundTruth truth;  // on the full grid
};

/// Subject i draws from Rng(seed, i): arm assignment, mediator path, outcome
/// path, then dropout flags.
SimulatedPanel generate_panel(const SimScenario& scenario);

struct ErrorMetrics {
  double made = 0.0;
  double wase = 0.0;
};

/// MADE = (4T)^-1 sum |eta - eta_hat| / range(eta),
/// WASE = (4T)^-1 sum (eta - eta_hat)^2 / range(eta)^2, range over the grid.
ErrorMetrics made_wase(const Vector& truth, const Vector& estimate);

}  // namespace tvmed
