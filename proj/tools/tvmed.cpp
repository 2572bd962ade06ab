// tvmed: simulate panels, fit time-varying mediation curves with bootstrap
// bands, run coverage experiments and compute error metrics.
//
// Exit codes:
//   0 success           4 too few estimable time points
//   1 I/O or other       5 too many failed bootstrap replicates
//   2 usage / invalid    6 degenerate smoothing neighborhood
//   3 malformed input    7 zero-range truth curve (metrics)

#include "tvmed/bootstrap.hpp"
#include "tvmed/coverage.hpp"
#include "tvmed/io.hpp"
#include "tvmed/mediation.hpp"
#include "tvmed/parallel.hpp"
#include "tvmed/scenario_io.hpp"
#include "tvmed/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

using namespace tvmed;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Args {
  // scenario selection
  std::string model;
  std::string scenario;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string lag_mode;
  // estimation
  std::string kernel = "epanechnikov";
  double bandwidth = 0.0;
  std::size_t boot = 1000;
  double level = 0.95;
  bool no_bootstrap = false;
  bool freeze = false;
  std::size_t eval_points = 0;
  std::size_t workers = 0;
  // io
  std::string in, out = ".";
  std::string id_col = "subject_id", time_col = "time";
  std::string mediator_col = "mediator", outcome_col = "outcome";
  std::vector<std::string> arm_cols = {"arm_1"};
  std::string raw_out, bootstrap_dump;
  bool summary = false;
  // coverage
  std::size_t reps = 500;
  std::vector<double> check_times = {0.2, 0.4, 0.6, 0.8};
  // metrics
  std::string truth, estimate;
};

std::string fmt(double v) { return io::format_double(v); }

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_json(const fs::path& path, const json& j) {
  io::write_file_atomic(path.string(), j.dump(2) + "\n");
}

fs::path out_dir(const Args& a) {
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + a.out + "': " + ec.message());
  return dir;
}

bool given(const CLI::App* app, const char* name) { return app->count(name) > 0; }

SimScenario resolve_scenario(const CLI::App* cmd, const Args& a) {
  if (a.model.empty() == a.scenario.empty())
    throw InvalidArgument("give exactly one of --model or --scenario");
  SimScenario sc = a.scenario.empty() ? builtin_scenario(parse_builtin_model(a.model))
                                      : load_scenario_file(a.scenario);
  if (given(cmd, "--n")) sc.n_subjects = a.n;
  if (given(cmd, "--dt")) sc.dt = a.dt;
  if (given(cmd, "--lag-mode")) sc.lag_mode = parse_lag_mode(a.lag_mode);
  sc.validate();
  return sc;
}

std::string model_label(const Args& a, const SimScenario& sc) {
  return a.model.empty() ? sc.name : to_string(parse_builtin_model(a.model));
}

FitOptions fit_options(const CLI::App* cmd, const Args& a) {
  FitOptions opt;
  opt.smoother.family = parse_kernel_family(a.kernel);
  if (given(cmd, "--bandwidth")) {
    if (!(a.bandwidth > 0.0)) throw InvalidArgument("--bandwidth must be positive");
    opt.smoother.bandwidth = a.bandwidth;
  }
  if (given(cmd, "--dt")) {
    if (!(a.dt >= 0.0)) throw InvalidArgument("--dt must be nonnegative");
    opt.dt = a.dt;
  }
  return opt;
}

json bandwidths_json(const SeriesBandwidths& bw) {
  json alpha = json::array(), gamma = json::array();
  for (Eigen::Index k = 0; k < bw.alpha.size(); ++k) {
    alpha.push_back(bw.alpha(k));
    gamma.push_back(bw.gamma(k));
  }
  return {{"alpha", alpha}, {"gamma", gamma}, {"beta", bw.beta}};
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CLI::App* cmd, const Args& a) {
  SimScenario sc = resolve_scenario(cmd, a);
  if (given(cmd, "--seed")) sc.seed = a.seed;
  const SimulatedPanel sim = generate_panel(sc);
  const fs::path dir = out_dir(a);
  const std::size_t k = sc.n_arms();

  std::ostringstream panel_csv;
  write_panel(panel_csv, sim.panel, PanelSchema::with_arms(k));
  io::write_file_atomic((dir / "panel.csv").string(), panel_csv.str());

  std::ostringstream truth;
  truth << "time" << (k > 1 ? ",arm" : "") << ",eta_true,alpha_true,beta_true,gamma_true\n";
  for (std::size_t arm = 0; arm < k; ++arm) {
    const auto ka = static_cast<Eigen::Index>(arm);
    for (Eigen::Index j = 0; j < sim.truth.times.size(); ++j) {
      truth << fmt(sim.truth.times(j));
      if (k > 1) truth << ',' << arm + 1;
      truth << ',' << fmt(sim.truth.eta(j, ka)) << ',' << fmt(sim.truth.alpha(j, ka)) << ','
            << fmt(sim.truth.beta(j)) << ',' << fmt(sim.truth.gamma(j, ka)) << '\n';
    }
  }
  io::write_file_atomic((dir / "truth.csv").string(), truth.str());

  write_json(dir / "manifest.json", {{"command", "simulate"},
                                     {"version", kVersion},
                                     {"scenario", scenario_to_json(sc)},
                                     {"subjects_written", sim.panel.n_subjects()},
                                     {"files", {"panel.csv", "truth.csv"}}});
  return 0;
}

// --------------------------------------------------------------------- fit

json panel_summary(const Panel& p) {
  json times = json::array();
  for (std::size_t j = 0; j < p.n_times(); ++j) {
    std::size_t observed = 0;
    for (const auto& s : p.subjects()) observed += (s.mediator[j] && s.outcome[j]) ? 1 : 0;
    json row = {{"time", p.grid()[j]}, {"n_observed", observed}};
    row["n_complete"] = j == 0 ? json(nullptr) : json(complete_cases(p, j).rows());
    times.push_back(row);
  }
  return {{"T", p.n_times()}, {"N", p.n_subjects()}, {"n_arms", p.n_arms()}, {"times", times}};
}

int cmd_fit(const CLI::App* cmd, const Args& a) {
  PanelSchema schema;
  schema.id_col = a.id_col;
  schema.time_col = a.time_col;
  schema.arm_cols = a.arm_cols;
  schema.mediator_col = a.mediator_col;
  schema.outcome_col = a.outcome_col;
  LoadReport report;
  const Panel panel = load_panel_file(a.in, schema, &report);
  if (report.dropped_subjects > 0)
    std::cerr << "warning: dropped " << report.dropped_subjects << " subject(s) with no observations\n";

  if (a.summary) {
    std::cout << panel_summary(panel).dump(2) << "\n";
    return 0;
  }

  FitOptions opt = fit_options(cmd, a);
  if (a.eval_points > 0) {
    const RawEstimates raw = estimate_all(panel, opt.rank_tol);
    if (a.eval_points < 2) throw InvalidArgument("--eval-points needs at least 2 points");
    opt.eval_grid = Vector::LinSpaced(static_cast<Eigen::Index>(a.eval_points), raw.times.front(),
                                      raw.times.back());
  }

  const std::size_t b = a.no_bootstrap ? 0 : a.boot;
  Fit fit;
  std::optional<BootstrapDistribution> dist;
  BootstrapConfig bc;
  if (b > 0) {
    bc.replicates = b;
    bc.level = a.level;
    bc.seed = a.seed;
    bc.fit = opt;
    bc.freeze_bandwidths = a.freeze;
    bc.workers = resolve_workers(a.workers ? std::optional<std::size_t>(a.workers) : std::nullopt);
    bc.validate();
    fit = fit_mediation(panel, opt);
    dist = bootstrap_distribution(panel, fit, bc);
    if (dist->failures() > 0)
      std::cerr << "warning: " << dist->failures() << " of " << b << " bootstrap replicates failed\n";
    attach_percentile_bounds(fit.band, *dist, bc.level, bc.max_failure_fraction);
  } else {
    fit = fit_mediation(panel, opt);
  }
  for (const auto& s : fit.raw.skipped)
    std::cerr << "warning: skipped time " << fmt(s.time) << " (" << to_string(s.reason) << ")\n";

  const fs::path dir = out_dir(a);
  const std::size_t k = panel.n_arms();
  const SmoothedCurves& c = fit.curves;
  const MediationBand& band = fit.band;

  std::ostringstream csv;
  csv << "time,arm,alpha_hat,gamma_hat,beta_hat,eta_hat" << (band.has_bounds() ? ",ci_lower,ci_upper" : "")
      << '\n';
  json curves = json::array();
  for (std::size_t arm = 0; arm < k; ++arm) {
    const auto ka = static_cast<Eigen::Index>(arm);
    json entry = {{"arm", arm + 1}};
    std::vector<double> tt, al, ga, be, et, lo, hi;
    for (Eigen::Index e = 0; e < c.eval_grid.size(); ++e) {
      csv << fmt(c.eval_grid(e)) << ',' << arm + 1 << ',' << fmt(c.alpha(e, ka)) << ','
          << fmt(c.gamma(e, ka)) << ',' << fmt(c.beta(e)) << ',' << fmt(band.eta(e, ka));
      tt.push_back(c.eval_grid(e));
      al.push_back(c.alpha(e, ka));
      ga.push_back(c.gamma(e, ka));
      be.push_back(c.beta(e));
      et.push_back(band.eta(e, ka));
      if (band.has_bounds()) {
        csv << ',' << fmt((*band.lower)(e, ka)) << ',' << fmt((*band.upper)(e, ka));
        lo.push_back((*band.lower)(e, ka));
        hi.push_back((*band.upper)(e, ka));
      }
      csv << '\n';
    }
    entry["time"] = tt;
    entry["alpha_hat"] = al;
    entry["gamma_hat"] = ga;
    entry["beta_hat"] = be;
    entry["eta_hat"] = et;
    if (band.has_bounds()) {
      entry["ci_lower"] = lo;
      entry["ci_upper"] = hi;
    }
    curves.push_back(entry);
  }
  io::write_file_atomic((dir / "curves.csv").string(), csv.str());

  json meta = {{"kernel", to_string(c.family)},
               {"dt", c.dt},
               {"bandwidths", bandwidths_json(c.bandwidths)},
               {"n_arms", k},
               {"level", band.has_bounds() ? json(band.level) : json(nullptr)},
               {"bootstrap_replicates", b}};
  json curves_json = meta;
  curves_json["curves"] = curves;
  write_json(dir / "curves.json", curves_json);

  json n_used = json::array();
  for (std::size_t r = 0; r < fit.raw.n_points(); ++r)
    n_used.push_back({{"time", fit.raw.times[r]}, {"n", fit.raw.n_used[r]}});
  json skipped = json::array();
  for (const auto& s : fit.raw.skipped)
    skipped.push_back({{"time", s.time}, {"grid_position", s.time_index + 1}, {"reason", to_string(s.reason)}});
  json summary = meta;
  summary["input"] = a.in;
  summary["T"] = panel.n_times();
  summary["N"] = panel.n_subjects();
  summary["dropped_subjects"] = report.dropped_subjects;
  summary["n_used"] = n_used;
  summary["skipped"] = skipped;
  summary["bootstrap_failures"] = dist ? json(dist->failures()) : json(0);
  if (b > 0) {
    summary["seed"] = a.seed;
    summary["freeze_bandwidths"] = a.freeze;
  }
  write_json(dir / "summary.json", summary);

  if (!a.raw_out.empty()) {
    std::ostringstream raw;
    raw << "time,n_used";
    for (std::size_t i = 1; i <= k; ++i) raw << ",a_" << i;
    for (std::size_t i = 1; i <= k; ++i) raw << ",c_" << i;
    raw << ",b\n";
    for (std::size_t r = 0; r < fit.raw.n_points(); ++r) {
      const auto kr = static_cast<Eigen::Index>(r);
      raw << fmt(fit.raw.times[r]) << ',' << fit.raw.n_used[r];
      for (Eigen::Index i = 0; i < fit.raw.a.cols(); ++i) raw << ',' << fmt(fit.raw.a(kr, i));
      for (Eigen::Index i = 0; i < fit.raw.c.cols(); ++i) raw << ',' << fmt(fit.raw.c(kr, i));
      raw << ',' << fmt(fit.raw.b(kr)) << '\n';
    }
    io::write_file_atomic(a.raw_out, raw.str());
  }

  if (!a.bootstrap_dump.empty()) {
    if (!dist) throw InvalidArgument("--bootstrap-dump needs bootstrap replicates");
    std::ostringstream dump;
    dump << "replicate,time,arm,eta_hat\n";
    for (std::size_t r = 0; r < dist->replicates(); ++r) {
      if (dist->failed[r]) continue;
      for (std::size_t arm = 0; arm < k; ++arm)
        for (Eigen::Index e = 0; e < dist->eval_grid.size(); ++e)
          dump << r << ',' << fmt(dist->eval_grid(e)) << ',' << arm + 1 << ','
               << fmt(dist->eta[arm](static_cast<Eigen::Index>(r), e)) << '\n';
    }
    io::write_file_atomic(a.bootstrap_dump, dump.str());
  }
  return 0;
}

// ---------------------------------------------------------------- coverage

int cmd_coverage(const CLI::App* cmd, const Args& a) {
  CoverageConfig cc;
  cc.scenario = resolve_scenario(cmd, a);
  cc.replications = a.reps;
  cc.check_times = a.check_times;
  cc.seed = a.seed;
  cc.workers = resolve_workers(a.workers ? std::optional<std::size_t>(a.workers) : std::nullopt);
  cc.bootstrap.replicates = a.boot;
  cc.bootstrap.level = a.level;
  cc.bootstrap.freeze_bandwidths = a.freeze;
  cc.bootstrap.fit = fit_options(cmd, a);
  cc.bootstrap.fit.dt.reset();  // fits use the scenario's dt
  const CoverageResult res = coverage_experiment(cc);
  if (res.failures > 0)
    std::cerr << "warning: " << res.failures << " of " << res.replications << " replications failed\n";

  const fs::path dir = out_dir(a);
  const std::size_t k = cc.scenario.n_arms();
  const std::string label = model_label(a, cc.scenario);

  std::ostringstream csv;
  csv << "model,N" << ",t" << (k > 1 ? ",arm" : "") << ",coverage,R,failures\n";
  for (std::size_t arm = 0; arm < k; ++arm)
    for (std::size_t c = 0; c < res.check_times.size(); ++c) {
      csv << quote_csv(label) << ',' << cc.scenario.n_subjects << ',' << fmt(res.check_times[c]);
      if (k > 1) csv << ',' << arm + 1;
      const double cov = res.coverage(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(arm));
      csv << ',' << (std::isnan(cov) ? std::string("") : fmt(cov)) << ',' << res.replications << ','
          << res.failures << '\n';
    }
  io::write_file_atomic((dir / "coverage.csv").string(), csv.str());

  std::ostringstream log;
  log << "replication,status,check_time,snapped_time,arm,eta_true,eta_hat,ci_lower,ci_upper,covered,"
         "bootstrap_failures,error\n";
  for (const auto& rec : res.log) {
    if (rec.failed) {
      log << rec.replication << ",failed,,,,,,,,,," << quote_csv(rec.error) << '\n';
      continue;
    }
    for (std::size_t c = 0; c < rec.checks.size(); ++c) {
      const CheckRecord& ch = rec.checks[c];
      for (std::size_t arm = 0; arm < k; ++arm)
        log << rec.replication << ",ok," << fmt(res.check_times[c]) << ',' << fmt(ch.snapped_time) << ','
            << arm + 1 << ',' << fmt(ch.eta_true[arm]) << ',' << fmt(ch.eta_hat[arm]) << ','
            << fmt(ch.lower[arm]) << ',' << fmt(ch.upper[arm]) << ',' << (ch.covered[arm] ? 1 : 0)
            << ',' << rec.bootstrap_failures << ",\n";
    }
  }
  io::write_file_atomic((dir / "replications.csv").string(), log.str());

  json snaps = json::array();
  for (std::size_t c = 0; c < res.check_times.size(); ++c)
    snaps.push_back({{"t", res.check_times[c]},
                     {"snapped", res.snapped_times[c]},
                     {"distance", std::abs(res.snapped_times[c] - res.check_times[c])}});
  write_json(dir / "manifest.json",
             {{"command", "coverage"},
              {"version", kVersion},
              {"model", label},
              {"scenario", scenario_to_json(cc.scenario)},
              {"replications", cc.replications},
              {"bootstrap_replicates", cc.bootstrap.replicates},
              {"level", cc.bootstrap.level},
              {"seed", cc.seed},
              {"kernel", a.kernel},
              {"bandwidth", given(cmd, "--bandwidth") ? json(a.bandwidth) : json(nullptr)},
              {"freeze_bandwidths", a.freeze},
              {"check_times", snaps},
              {"failures", res.failures},
              {"files", {"coverage.csv", "replications.csv"}}});
  return 0;
}

// ----------------------------------------------------------------- metrics

// (arm, time) -> value from a CSV with a time column, an optional arm column
// and the first present column among `names`.
std::map<std::pair<int, double>, double> read_series(const std::string& path,
                                                     std::initializer_list<const char*> names) {
  const io::CsvTable t = io::read_csv_file(path);
  const std::size_t time_col = t.column("time");
  const auto arm_col = t.find_column("arm");
  std::optional<std::size_t> value_col;
  for (const char* n : names)
    if ((value_col = t.find_column(n))) break;
  if (!value_col) throw MalformedInput("'" + path + "' has no column " + *names.begin());
  std::map<std::pair<int, double>, double> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto time = io::parse_double(row[time_col]);
    const auto value = io::parse_double(row[*value_col]);
    const auto arm = arm_col ? io::parse_double(row[*arm_col]) : std::optional<double>(1.0);
    if (!time || !value || !arm)
      throw MalformedInput("'" + path + "' row " + std::to_string(r + 2) + ": unparseable number");
    out[{int(*arm), *time}] = *value;
  }
  return out;
}

int cmd_metrics(const CLI::App*, const Args& a) {
  const auto truth = read_series(a.truth, {"eta_true", "eta"});
  const auto est = read_series(a.estimate, {"eta_hat", "eta"});
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_arm;
  for (const auto& [key, value] : est) {
    auto it = truth.find(key);
    if (it == truth.end()) {
      // tolerate print rounding in hand-made files
      it = truth.lower_bound({key.first, key.second - 1e-9});
      if (it == truth.end() || it->first.first != key.first || std::abs(it->first.second - key.second) > 1e-9)
        throw InvalidArgument("grid mismatch: estimate time " + fmt(key.second) + " (arm " +
                              std::to_string(key.first) + ") is not in the truth file");
    }
    by_arm[key.first].first.push_back(it->second);
    by_arm[key.first].second.push_back(value);
  }
  if (by_arm.empty()) throw InvalidArgument("estimate file has no rows");
  json arms = json::array();
  for (const auto& [arm, series] : by_arm) {
    const ErrorMetrics m = made_wase(Eigen::Map<const Vector>(series.first.data(), series.first.size()),
                                     Eigen::Map<const Vector>(series.second.data(), series.second.size()));
    arms.push_back({{"arm", arm}, {"made", m.made}, {"wase", m.wase}, {"points", series.first.size()}});
  }
  json out;
  if (arms.size() == 1) {
    out = {{"made", arms[0]["made"]}, {"wase", arms[0]["wase"]}};
  } else {
    out = {{"arms", arms}};
  }
  std::cout << out.dump() << "\n";
  const fs::path dir = out_dir(a);
  json file = out;
  file["truth"] = a.truth;
  file["estimate"] = a.estimate;
  if (arms.size() == 1) file["points"] = arms[0]["points"];
  write_json(dir / "metrics.json", file);
  return 0;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const MalformedInput*>(&e)) return 3;
  if (dynamic_cast<const TooFewTimePoints*>(&e)) return 4;
  if (dynamic_cast<const TooManyFailures*>(&e)) return 5;
  if (dynamic_cast<const DegenerateNeighborhood*>(&e)) return 6;
  if (dynamic_cast<const ZeroRange*>(&e)) return 7;
  if (dynamic_cast<const InvalidArgument*>(&e)) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying mediation analysis for intensive longitudinal data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Args a;

  auto scenario_flags = [&](CLI::App* c) {
    c->add_option("--model", a.model, "Built-in model")->check(CLI::IsMember({"i", "ii"}));
    c->add_option("--scenario", a.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
    c->add_option("--n", a.n, "Number of subjects")->check(CLI::PositiveNumber);
    c->add_option("--lag-mode", a.lag_mode, "Lagged mediator generation")
        ->check(CLI::IsMember({"true_lag", "previous_grid"}));
  };
  auto estimation_flags = [&](CLI::App* c) {
    c->add_option("--kernel", a.kernel, "Smoothing kernel")->check(CLI::IsMember({"epanechnikov", "gaussian"}));
    c->add_option("--bandwidth", a.bandwidth, "Bandwidth for every series (default: rule of thumb)");
    c->add_option("--boot", a.boot, "Bootstrap replicates");
    c->add_option("--level", a.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    c->add_flag("--freeze-bandwidths", a.freeze, "Reuse the original bandwidths in every replicate");
    c->add_option("--workers", a.workers, "Worker threads (default: TVMED_WORKERS, then all cores)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic panel and its true curves");
  scenario_flags(sim);
  sim->add_option("--seed", a.seed, "Scenario seed");
  sim->add_option("--dt", a.dt, "Lag offset");
  sim->add_option("--out", a.out, "Output directory");

  CLI::App* fit = app.add_subcommand("fit", "Estimate mediation curves from a panel CSV");
  fit->add_option("--in", a.in, "Panel CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", a.out, "Output directory");
  fit->add_option("--id-col", a.id_col, "Subject id column");
  fit->add_option("--time-col", a.time_col, "Time column");
  fit->add_option("--arm-cols", a.arm_cols, "Arm indicator columns")->delimiter(',');
  fit->add_option("--mediator-col", a.mediator_col, "Mediator column");
  fit->add_option("--outcome-col", a.outcome_col, "Outcome column");
  fit->add_option("--dt", a.dt, "Lag offset (default: half the smallest grid gap)");
  fit->add_option("--seed", a.seed, "Bootstrap seed");
  fit->add_option("--eval-points", a.eval_points, "Uniform evaluation grid size (default: raw times)");
  fit->add_flag("--no-bootstrap", a.no_bootstrap, "Point estimates only");
  fit->add_option("--raw-out", a.raw_out, "Write per-time raw estimates to this CSV");
  fit->add_option("--bootstrap-dump", a.bootstrap_dump, "Write every replicate curve to this CSV");
  fit->add_flag("--summary", a.summary, "Print a panel summary as JSON and exit");
  estimation_flags(fit);

  CLI::App* cov = app.add_subcommand("coverage", "Monte Carlo coverage of the bootstrap band");
  scenario_flags(cov);
  cov->add_option("--reps", a.reps, "Simulation replications")->check(CLI::PositiveNumber);
  cov->add_option("--seed", a.seed, "Experiment seed");
  cov->add_option("--dt", a.dt, "Lag offset");
  cov->add_option("--check-times", a.check_times, "Times at which coverage is recorded")->delimiter(',');
  cov->add_option("--out", a.out, "Output directory");
  estimation_flags(cov);

  CLI::App* met = app.add_subcommand("metrics", "MADE and WASE of an estimate against the truth");
  met->add_option("--truth", a.truth, "Truth CSV (time[,arm],eta_true)")->required()->check(CLI::ExistingFile);
  met->add_option("--estimate", a.estimate, "Estimate CSV (time[,arm],eta_hat)")
      ->required()
      ->check(CLI::ExistingFile);
  met->add_option("--out", a.out, "Directory for metrics.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim, a);
    if (fit->parsed()) return cmd_fit(fit, a);
    if (cov->parsed()) return cmd_coverage(cov, a);
    if (met->parsed()) return cmd_metrics(met, a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 2;
}
