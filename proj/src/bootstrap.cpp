#include "tvmed/bootstrap.hpp"

#include "tvmed/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace tvmed {

void BootstrapConfig::validate() const {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  const double floor = 2.0 / (1.0 - level);
  if (double(replicates) < floor - 1e-9)
    throw InvalidArgument("bootstrap needs at least " + std::to_string(int(std::ceil(floor - 1e-9))) +
                          " replicates at level " + std::to_string(level));
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
    throw InvalidArgument("max_failure_fraction must lie in [0, 1]");
}

std::size_t BootstrapDistribution::failures() const {
  return static_cast<std::size_t>(std::count(failed.begin(), failed.end(), true));
}

Panel resample_panel(const Panel& panel, Rng& rng) {
  const std::size_t n = panel.n_subjects();
  std::vector<SubjectRecord> drawn;
  drawn.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SubjectRecord s = panel.subject(rng.below(n));
    s.id += '#';
    s.id += std::to_string(i);
    drawn.push_back(std::move(s));
  }
  return Panel(panel.grid(), panel.n_arms(), std::move(drawn));
}

namespace {

std::size_t order_index(double position, std::size_t n, bool upper) {
  const double nearest = std::round(position);
  if (std::abs(position - nearest) <= 1e-9) position = nearest;
  double idx = upper ? std::floor(position) + 1.0 : std::ceil(position);
  idx = std::clamp(idx, 1.0, double(n));
  return static_cast<std::size_t>(idx) - 1;
}

void check_sample(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("percentile probability outside [0, 1]");
}

}  // namespace

double percentile_lower(const std::vector<double>& sorted, double q) {
  check_sample(sorted, q);
  return sorted[order_index(q * double(sorted.size()), sorted.size(), false)];
}

double percentile_upper(const std::vector<double>& sorted, double q) {
  check_sample(sorted, q);
  return sorted[order_index(q * double(sorted.size()), sorted.size(), true)];
}

BootstrapDistribution bootstrap_distribution(const Panel& panel, const Fit& reference,
                                             const BootstrapConfig& config) {
  config.validate();
  const std::size_t b = config.replicates;
  const std::size_t k = panel.n_arms();
  BootstrapDistribution dist;
  dist.eval_grid = reference.curves.eval_grid;
  dist.eta.assign(k, Matrix::Zero(static_cast<Eigen::Index>(b), dist.eval_grid.size()));
  dist.failed.assign(b, false);
  std::vector<char> failed(b, 0);  // vector<bool> is not safe for concurrent writes

  FitOptions options = config.fit;
  options.dt = reference.curves.dt;
  options.eval_grid = reference.curves.eval_grid;
  if (config.freeze_bandwidths) options.smoother.fixed = reference.curves.bandwidths;

  parallel_for(b, config.workers, [&](std::size_t r) {
    Rng rng(config.seed, r);
    try {
      const Panel resampled = resample_panel(panel, rng);
      const Fit fit = fit_mediation(resampled, options);
      for (std::size_t a = 0; a < k; ++a)
        dist.eta[a].row(static_cast<Eigen::Index>(r)) =
            fit.band.eta.col(static_cast<Eigen::Index>(a)).transpose();
    } catch (const Error&) {
      failed[r] = 1;
    }
  });
  for (std::size_t r = 0; r < b; ++r) dist.failed[r] = failed[r] != 0;
  return dist;
}

void attach_percentile_bounds(MediationBand& band, const BootstrapDistribution& dist, double level,
                              double max_failure_fraction) {
  const std::size_t failures = dist.failures();
  const std::size_t total = dist.replicates();
  if (total == 0 || failures == total ||
      double(failures) > max_failure_fraction * double(total) + 1e-9)
    throw TooManyFailures(std::to_string(failures) + " of " + std::to_string(total) +
                          " bootstrap replicates failed");
  const double tail = 0.5 * (1.0 - level);
  const Eigen::Index n_eval = dist.eval_grid.size();
  const auto k = static_cast<Eigen::Index>(dist.eta.size());
  Matrix lower(n_eval, k), upper(n_eval, k);
  std::vector<double> sample;
  sample.reserve(total - failures);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index e = 0; e < n_eval; ++e) {
      sample.clear();
      for (std::size_t r = 0; r < total; ++r)
        if (!dist.failed[r]) sample.push_back(dist.eta[a](static_cast<Eigen::Index>(r), e));
      std::sort(sample.begin(), sample.end());
      lower(e, a) = percentile_lower(sample, tail);
      upper(e, a) = percentile_upper(sample, 1.0 - tail);
    }
  band.lower = std::move(lower);
  band.upper = std::move(upper);
  band.level = level;
}

BootstrapResult bootstrap_band(const Panel& panel, const BootstrapConfig& config) {
  config.validate();
  BootstrapResult result;
  result.fit = fit_mediation(panel, config.fit);
  result.distribution = bootstrap_distribution(panel, result.fit, config);
  attach_percentile_bounds(result.fit.band, result.distribution, config.level,
                           config.max_failure_fraction);
  return result;
}

}  // namespace tvmed
