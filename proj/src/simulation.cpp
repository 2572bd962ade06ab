#include "tvmed/simulation.hpp"

#include <algorithm>

namespace tvmed {

const char* to_string(LagMode m) {
  return m == LagMode::TrueLag ? "true_lag" : "previous_grid";
}

LagMode parse_lag_mode(const std::string& s) {
  if (s == "true_lag") return LagMode::TrueLag;
  if (s == "previous_grid") return LagMode::PreviousGrid;
  throw InvalidArgument("unknown lag mode '" + s + "' (expected true_lag or previous_grid)");
}

BuiltinModel parse_builtin_model(const std::string& s) {
  if (s == "i" || s == "1" || s == "model_i") return BuiltinModel::ModelI;
  if (s == "ii" || s == "2" || s == "model_ii") return BuiltinModel::ModelII;
  throw InvalidArgument("unknown model '" + s + "' (expected i or ii)");
}

void SimScenario::validate() const {
  if (arms.empty()) throw InvalidArgument("scenario needs at least one treatment arm");
  double total = 0.0;
  for (const auto& a : arms) {
    if (!(a.probability > 0.0 && a.probability < 1.0))
      throw InvalidArgument("arm probability must lie in (0, 1)");
    total += a.probability;
  }
  if (total > 1.0 + 1e-12)
    throw InvalidArgument("arm probabilities sum above 1");
  if (!(sigma2 >= 0.0) || !(outcome_sigma2() >= 0.0))
    throw InvalidArgument("error variance must be nonnegative");
  if (!(phi >= 0.0)) throw InvalidArgument("phi must be nonnegative");
  if (n_times < 3) throw InvalidArgument("scenario needs at least 3 time points");
  if (!(t_end > t_start)) throw InvalidArgument("t_end must exceed t_start");
  if (n_subjects < 1) throw InvalidArgument("scenario needs at least one subject");
  const double spacing = (t_end - t_start) / double(n_times - 1);
  const double d = resolved_dt();
  if (!(d >= 0.0) || d > spacing * (1.0 + 1e-12))
    throw InvalidArgument("dt must lie in [0, grid spacing]");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
}

std::vector<double> SimScenario::grid() const {
  std::vector<double> g(n_times);
  const double span = t_end - t_start;
  for (std::size_t j = 0; j < n_times; ++j)
    g[j] = t_start + span * double(j) / double(n_times - 1);
  g.back() = t_end;
  return g;
}

double SimScenario::resolved_dt() const {
  if (dt) return *dt;
  return 0.5 * (t_end - t_start) / double(n_times - 1);
}

namespace {

SimScenario base_scenario(const char* name) {
  SimScenario s;
  s.name = name;
  s.alpha0 = Expression::constant(0.0);
  s.beta0 = Expression::constant(0.0);
  return s;
}

}  // namespace

SimScenario builtin_scenario(BuiltinModel model) {
  if (model == BuiltinModel::ModelI) {
    SimScenario s = base_scenario("model_i");
    s.beta = Expression::parse("50+150*t^2");
    s.arms.push_back({Expression::parse("10+12*t^3"), Expression::parse("-20-18*t"), 0.5});
    return s;
  }
  SimScenario s = base_scenario("model_ii");
  s.beta = Expression::parse("1+2*t^2+11.3*(1-t)^3");
  s.arms.push_back(
      {Expression::parse("15+8.7*sin(0.5*pi*t)"), Expression::parse("4-17*(t-1/2)^2"), 0.5});
  return s;
}

SimScenario two_arm_scenario() {
  SimScenario s = builtin_scenario(BuiltinModel::ModelI);
  s.name = "two_arm";
  const SimScenario ii = builtin_scenario(BuiltinModel::ModelII);
  s.arms[0].probability = 1.0 / 3.0;
  s.arms.push_back(ii.arms[0]);
  s.arms[1].probability = 1.0 / 3.0;
  return s;
}

GroundTruth ground_truth(const SimScenario& scenario, const Vector& times) {
  const Eigen::Index n = times.size();
  const auto k = static_cast<Eigen::Index>(scenario.n_arms());
  const double dt = scenario.resolved_dt();
  GroundTruth truth;
  truth.times = times;
  truth.alpha.resize(n, k);
  truth.gamma.resize(n, k);
  truth.beta.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    truth.beta(j) = scenario.beta(times(j));
    for (Eigen::Index a = 0; a < k; ++a) {
      truth.alpha(j, a) = scenario.arms[a].alpha(times(j) - dt);
      truth.gamma(j, a) = scenario.arms[a].gamma(times(j));
    }
  }
  truth.eta = truth.alpha.array().colwise() * truth.beta.array();
  return truth;
}

SimulatedPanel generate_panel(const SimScenario& scenario) {
  scenario.validate();
  const std::vector<double> grid = scenario.grid();
  const std::size_t t = grid.size();
  const std::size_t k = scenario.n_arms();
  const double dt = scenario.resolved_dt();

  // Mediator noise times: the grid interleaved with each outcome's lag time
  // (true lag), or only the first lag time ahead of the grid (previous grid).
  std::vector<double> merged;
  std::vector<std::size_t> grid_pos(t), lag_pos(t);
  if (scenario.lag_mode == LagMode::TrueLag) {
    for (std::size_t j = 0; j < t; ++j) {
      lag_pos[j] = merged.size();
      merged.push_back(grid[j] - dt);
      grid_pos[j] = merged.size();
      merged.push_back(grid[j]);
    }
  } else {
    merged.push_back(grid[0] - dt);
    lag_pos[0] = 0;
    for (std::size_t j = 0; j < t; ++j) {
      grid_pos[j] = merged.size();
      merged.push_back(grid[j]);
      if (j > 0) lag_pos[j] = grid_pos[j - 1];
    }
  }
  const Vector merged_times = Eigen::Map<const Vector>(merged.data(), merged.size());
  const Vector grid_times = Eigen::Map<const Vector>(grid.data(), grid.size());

  const Eigen::Index nm = merged_times.size();
  Vector alpha0_m(nm);
  Matrix alpha_m(nm, static_cast<Eigen::Index>(k));
  for (Eigen::Index s = 0; s < nm; ++s) {
    alpha0_m(s) = scenario.alpha0(merged_times(s));
    for (std::size_t a = 0; a < k; ++a) alpha_m(s, a) = scenario.arms[a].alpha(merged_times(s));
  }
  Vector beta0_g(t), beta_g(t);
  Matrix gamma_g(t, static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < t; ++j) {
    beta0_g(j) = scenario.beta0(grid[j]);
    beta_g(j) = scenario.beta(grid[j]);
    for (std::size_t a = 0; a < k; ++a) gamma_g(j, a) = scenario.arms[a].gamma(grid[j]);
  }

  std::vector<SubjectRecord> subjects;
  subjects.reserve(scenario.n_subjects);
  for (std::size_t i = 0; i < scenario.n_subjects; ++i) {
    Rng rng(scenario.seed, i);
    SubjectRecord s;
    s.id = "s" + std::to_string(i + 1);
    s.arm.assign(k, 0);
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::optional<std::size_t> arm;
    for (std::size_t a = 0; a < k; ++a) {
      cumulative += scenario.arms[a].probability;
      if (u < cumulative) {
        arm = a;
        s.arm[a] = 1;
        break;
      }
    }
    const Vector eps_m = ou_path(merged_times, scenario.sigma2, scenario.phi, rng);
    const Vector eps_y = ou_path(grid_times, scenario.outcome_sigma2(), scenario.phi, rng);
    Vector m = alpha0_m + eps_m;
    if (arm) m += alpha_m.col(static_cast<Eigen::Index>(*arm));
    s.mediator.resize(t);
    s.outcome.resize(t);
    for (std::size_t j = 0; j < t; ++j) {
      double y = beta0_g(j) + beta_g(j) * m(static_cast<Eigen::Index>(lag_pos[j])) + eps_y(j);
      if (arm) y += gamma_g(j, static_cast<Eigen::Index>(*arm));
      s.mediator[j] = m(static_cast<Eigen::Index>(grid_pos[j]));
      s.outcome[j] = y;
    }
    if (scenario.dropout > 0.0) {
      for (std::size_t j = 0; j < t; ++j) {
        if (rng.bernoulli(scenario.dropout)) s.mediator[j].reset();
        if (rng.bernoulli(scenario.dropout)) s.outcome[j].reset();
      }
      if (!s.has_any_observation()) continue;
    }
    subjects.push_back(std::move(s));
  }
  SimulatedPanel out{Panel(grid, k, std::move(subjects)), ground_truth(scenario, grid_times)};
  return out;
}

ErrorMetrics made_wase(const Vector& truth, const Vector& estimate) {
  if (truth.size() != estimate.size() || truth.size() == 0)
    throw InvalidArgument("made_wase: grids differ in length");
  const double range = truth.maxCoeff() - truth.minCoeff();
  if (!(range > 0.0)) throw ZeroRange("true curve has zero range");
  const double scale = 1.0 / (4.0 * double(truth.size()));
  const Vector diff = truth - estimate;
  return {scale * diff.cwiseAbs().sum() / range, scale * diff.squaredNorm() / (range * range)};
}

}  // namespace tvmed
