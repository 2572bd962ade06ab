#include "tvmed/coverage.hpp"

#include "tvmed/parallel.hpp"

#include <cmath>

namespace tvmed {

std::size_t snap_index(const Vector& grid, double t) {
  if (grid.size() == 0) throw InvalidArgument("snap_index: empty grid");
  Eigen::Index best = 0;
  (grid.array() - t).abs().minCoeff(&best);
  return static_cast<std::size_t>(best);
}

CoverageResult coverage_experiment(const CoverageConfig& config) {
  config.scenario.validate();
  config.bootstrap.validate();
  if (config.replications < 1) throw InvalidArgument("coverage needs at least one replication");
  const std::vector<double> grid = config.scenario.grid();
  for (double t : config.check_times)
    if (t < grid.front() || t > grid.back())
      throw InvalidArgument("check time " + std::to_string(t) + " outside the simulated grid");

  const std::size_t k = config.scenario.n_arms();
  const std::size_t nc = config.check_times.size();
  CoverageResult result;
  result.check_times = config.check_times;
  result.replications = config.replications;
  const Vector nominal = Eigen::Map<const Vector>(grid.data() + 1, grid.size() - 1);
  for (double t : config.check_times) result.snapped_times.push_back(nominal(snap_index(nominal, t)));

  result.log.resize(config.replications);
  parallel_for(config.replications, config.workers, [&](std::size_t r) {
    ReplicationRecord& rec = result.log[r];
    rec.replication = r;
    try {
      SimScenario scenario = config.scenario;
      scenario.seed = stream_seed(config.seed, 2 * r);
      const SimulatedPanel sim = generate_panel(scenario);
      BootstrapConfig boot = config.bootstrap;
      if (!boot.fit.dt) boot.fit.dt = scenario.resolved_dt();
      boot.seed = stream_seed(config.seed, 2 * r + 1);
      boot.workers = 1;
      const BootstrapResult br = bootstrap_band(sim.panel, boot);
      rec.bootstrap_failures = br.distribution.failures();
      const MediationBand& band = br.fit.band;
      const GroundTruth truth = ground_truth(scenario, band.eval_grid);
      for (double t : config.check_times) {
        const auto e = static_cast<Eigen::Index>(snap_index(band.eval_grid, t));
        CheckRecord check;
        check.snapped_time = band.eval_grid(e);
        for (std::size_t a = 0; a < k; ++a) {
          const auto ka = static_cast<Eigen::Index>(a);
          const double eta = truth.eta(e, ka);
          check.eta_true.push_back(eta);
          check.eta_hat.push_back(band.eta(e, ka));
          check.lower.push_back((*band.lower)(e, ka));
          check.upper.push_back((*band.upper)(e, ka));
          check.covered.push_back((*band.lower)(e, ka) <= eta && eta <= (*band.upper)(e, ka));
        }
        rec.checks.push_back(std::move(check));
      }
    } catch (const Error& err) {
      rec.failed = true;
      rec.error = err.what();
      rec.checks.clear();
    }
  });

  Matrix hits = Matrix::Zero(static_cast<Eigen::Index>(nc), static_cast<Eigen::Index>(k));
  std::size_t ok = 0;
  for (const auto& rec : result.log) {
    if (rec.failed) {
      ++result.failures;
      continue;
    }
    ++ok;
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t a = 0; a < k; ++a)
        if (rec.checks[c].covered[a]) hits(c, a) += 1.0;
  }
  result.coverage = ok > 0 ? Matrix(hits / double(ok))
                           : Matrix::Constant(hits.rows(), hits.cols(), std::nan(""));
  return result;
}

std::vector<ErrorRecord> error_experiment(const ErrorExperimentConfig& config) {
  config.scenario.validate();
  std::vector<ErrorRecord> records(config.replications);
  const std::size_t k = config.scenario.n_arms();
  parallel_for(config.replications, config.workers, [&](std::size_t r) {
    ErrorRecord& rec = records[r];
    try {
      SimScenario scenario = config.scenario;
      scenario.seed = stream_seed(config.seed, r);
      const SimulatedPanel sim = generate_panel(scenario);
      FitOptions fit_options = config.fit;
      if (!fit_options.dt) fit_options.dt = scenario.resolved_dt();
      const Fit fit = fit_mediation(sim.panel, fit_options);
      const GroundTruth truth = ground_truth(scenario, fit.band.eval_grid);
      for (std::size_t a = 0; a < k; ++a) {
        const auto ka = static_cast<Eigen::Index>(a);
        const Vector eta = truth.eta.col(ka);
        const Vector est = fit.band.eta.col(ka);
        rec.metrics.push_back(made_wase(eta, est));
        const double range = eta.maxCoeff() - eta.minCoeff();
        double worst = 0.0;
        for (Eigen::Index e = 0; e < eta.size(); ++e) {
          const double t = fit.band.eval_grid(e);
          if (t < config.interior_lo || t > config.interior_hi) continue;
          worst = std::max(worst, std::abs(eta(e) - est(e)) / range);
        }
        rec.max_error.push_back(worst);
      }
    } catch (const Error&) {
      rec.failed = true;
    }
  });
  return records;
}

}  // namespace tvmed
