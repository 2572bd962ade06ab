#include "tvmed/mediation.hpp"

namespace tvmed {

double default_dt(const Panel& panel) { return 0.5 * panel.min_spacing(); }

Fit fit_mediation(const Panel& panel, const FitOptions& options) {
  Fit fit;
  fit.raw = estimate_all(panel, options.rank_tol);
  const double dt = options.dt ? *options.dt : default_dt(panel);
  const Vector grid = options.eval_grid ? *options.eval_grid : fit.raw.times_vector();
  fit.curves = smooth_all(fit.raw, dt, options.smoother, grid);
  fit.band = mediation_effect(fit.curves);
  return fit;
}

namespace {

double pick(const SmootherConfig& config, const std::optional<double>& fixed, const Vector& times,
            const Vector& values) {
  if (config.bandwidth) return *config.bandwidth;
  if (fixed) return *fixed;
  return rot_bandwidth(times, values, config.family);
}

template <typename Fn>
auto with_series(const std::string& series, Fn&& fn) {
  try {
    return fn();
  } catch (const DegenerateNeighborhood& e) {
    throw DegenerateNeighborhood(e.at(), series + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(series + ": " + e.what());
  }
}

}  // namespace

SeriesBandwidths select_bandwidths(const RawEstimates& raw, const SmootherConfig& config) {
  if (raw.n_points() < 2) throw InvalidArgument("smoothing needs at least 2 raw points");
  if (config.bandwidth && !(*config.bandwidth > 0.0))
    throw InvalidArgument("bandwidth override must be positive");
  const Eigen::Index k = raw.a.cols();
  const Vector times = raw.times_vector();
  SeriesBandwidths bw;
  bw.alpha.resize(k);
  bw.gamma.resize(k);
  auto fixed_at = [&](const Vector SeriesBandwidths::*member, Eigen::Index i) -> std::optional<double> {
    if (!config.fixed) return std::nullopt;
    return ((*config.fixed).*member)(i);
  };
  for (Eigen::Index a = 0; a < k; ++a) {
    const std::string idx = std::to_string(a + 1);
    bw.alpha(a) = with_series("alpha_" + idx, [&] {
      return pick(config, fixed_at(&SeriesBandwidths::alpha, a), times, raw.a.col(a));
    });
    bw.gamma(a) = with_series("gamma_" + idx, [&] {
      return pick(config, fixed_at(&SeriesBandwidths::gamma, a), times, raw.c.col(a));
    });
  }
  std::optional<double> fixed_beta;
  if (config.fixed) fixed_beta = config.fixed->beta;
  bw.beta = with_series("beta", [&] { return pick(config, fixed_beta, times, raw.b); });
  return bw;
}

SmoothedCurves smooth_all(const RawEstimates& raw, double dt, const SmootherConfig& config,
                          const Vector& eval_grid) {
  if (!(dt >= 0.0)) throw InvalidArgument("dt must be nonnegative");
  SmoothedCurves curves;
  curves.eval_grid = eval_grid;
  curves.dt = dt;
  curves.family = config.family;
  curves.bandwidths = select_bandwidths(raw, config);
  const Eigen::Index k = raw.a.cols();
  const Vector times = raw.times_vector();
  const Vector lagged = eval_grid.array() - dt;
  curves.alpha.resize(eval_grid.size(), k);
  curves.gamma.resize(eval_grid.size(), k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const std::string idx = std::to_string(a + 1);
    curves.alpha.col(a) = with_series("alpha_" + idx, [&] {
      return smooth_series(times, raw.a.col(a), {config.family, curves.bandwidths.alpha(a)},
                           lagged);
    });
    curves.gamma.col(a) = with_series("gamma_" + idx, [&] {
      return smooth_series(times, raw.c.col(a), {config.family, curves.bandwidths.gamma(a)},
                           eval_grid);
    });
  }
  curves.beta = with_series("beta", [&] {
    return smooth_series(times, raw.b, {config.family, curves.bandwidths.beta}, eval_grid);
  });
  return curves;
}

MediationBand mediation_effect(const SmoothedCurves& curves) {
  MediationBand band;
  band.eval_grid = curves.eval_grid;
  band.eta = curves.alpha.array().colwise() * curves.beta.array();
  return band;
}

std::pair<Vector, Vector> mediation_weight_vectors(const RawEstimates& raw, double t, double dt,
                                                   std::size_t arm,
                                                   const SeriesBandwidths& bandwidths,
                                                   KernelFamily family) {
  const Eigen::Index k = raw.a.cols();
  const Eigen::Index width = 2 * k + 1;
  const Eigen::Index n = static_cast<Eigen::Index>(raw.n_points());
  const auto ka = static_cast<Eigen::Index>(arm);
  const Vector times = raw.times_vector();
  const Vector wa = local_linear_weights(times, t - dt, {family, bandwidths.alpha(ka)});
  const Vector wb = local_linear_weights(times, t, {family, bandwidths.beta});
  Vector full_a = Vector::Zero(n * width);
  Vector full_b = Vector::Zero(n * width);
  for (Eigen::Index l = 0; l < n; ++l) {
    full_a(l * width + ka) = wa(l);
    full_b(l * width + 2 * k) = wb(l);
  }
  return {full_a, full_b};
}

Matrix mediation_effect_inner_product(const RawEstimates& raw, const SmoothedCurves& curves) {
  const Vector d = raw.stacked();
  const auto k = static_cast<std::size_t>(curves.alpha.cols());
  Matrix eta(curves.eval_grid.size(), static_cast<Eigen::Index>(k));
  for (Eigen::Index e = 0; e < curves.eval_grid.size(); ++e)
    for (std::size_t a = 0; a < k; ++a) {
      auto [wa, wb] = mediation_weight_vectors(raw, curves.eval_grid(e), curves.dt, a,
                                               curves.bandwidths, curves.family);
      eta(e, static_cast<Eigen::Index>(a)) = wa.dot(d) * wb.dot(d);
    }
  return eta;
}

}  // namespace tvmed
