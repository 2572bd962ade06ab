#include <doctest.h>

#include "oracles.hpp"
#include "tvmed/bootstrap.hpp"
#include "tvmed/simulation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

using namespace tvmed;

namespace {

Panel small_panel(std::size_t n, std::uint64_t seed = 1) {
  SimScenario sc = builtin_scenario(BuiltinModel::ModelI);
  sc.n_subjects = n;
  sc.n_times = 20;
  sc.seed = seed;
  return generate_panel(sc).panel;
}

std::vector<double> one_to(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

}  // namespace

TEST_CASE("resampling is deterministic and keeps whole series") {
  const Panel p = small_panel(30);
  Rng r1(5, 3), r2(5, 3);
  const Panel a = resample_panel(p, r1);
  const Panel b = resample_panel(p, r2);
  REQUIRE(a.n_subjects() == 30);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(a.subject(i).id == b.subject(i).id);
    const std::string& id = a.subject(i).id;
    const auto hash = id.find('#');
    REQUIRE(hash != std::string::npos);
    CHECK(id.substr(hash + 1) == std::to_string(i));
    const auto it = std::find_if(p.subjects().begin(), p.subjects().end(),
                                 [&](const SubjectRecord& s) { return s.id == id.substr(0, hash); });
    REQUIRE(it != p.subjects().end());
    CHECK(it->mediator == a.subject(i).mediator);
    CHECK(it->outcome == a.subject(i).outcome);
    CHECK(it->arm == a.subject(i).arm);
  }
}

TEST_CASE("resampling a single subject returns that subject") {
  SubjectRecord s{"only", {1}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
  const Panel p({0, 1, 2}, 1, {s});
  Rng rng(1);
  const Panel r = resample_panel(p, rng);
  CHECK(r.n_subjects() == 1);
  CHECK(r.subject(0).id == "only#0");
}

TEST_CASE("each subject is drawn once per resample on average") {
  const Panel p = small_panel(100);
  std::map<std::string, double> counts;
  const int draws = 10000;
  Rng rng(42);
  for (int d = 0; d < draws; ++d) {
    const Panel r = resample_panel(p, rng);
    for (const auto& s : r.subjects()) counts[s.id.substr(0, s.id.find('#'))] += 1.0;
  }
  // count per draw is Binomial(100, 1/100): mean 1, variance 0.99
  const double se = std::sqrt(0.99 / draws);
  int outside = 0;
  for (const auto& s : p.subjects())
    if (std::abs(counts[s.id] / draws - 1.0) > 3.0 * se) ++outside;
  CHECK(outside <= 2);
}

TEST_CASE("percentile order statistics") {
  const auto v = one_to(100);
  CHECK(percentile_lower(v, 0.025) == 3.0);
  CHECK(percentile_upper(v, 0.975) == 98.0);
  CHECK(percentile_lower(v, 0.05) == 5.0);  // 0.05 * 100 stays 5 despite rounding
  CHECK(percentile_upper(v, 0.95) == 96.0);
  CHECK(percentile_lower(v, 0.0) == 1.0);
  CHECK(percentile_upper(v, 1.0) == 100.0);
  CHECK(percentile(v, 0.5) == 50.0);
  const auto w = one_to(1000);
  CHECK(percentile_lower(w, 0.025) == 25.0);
  CHECK(percentile_upper(w, 0.975) == 976.0);
  CHECK_THROWS_AS(percentile_lower({}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(percentile_lower(v, 1.5), InvalidArgument);
}

TEST_CASE("percentiles sit within one order statistic of type-7 quantiles") {
  Rng rng(8);
  std::vector<double> x(1000);
  for (double& v : x) v = rng.normal();
  std::sort(x.begin(), x.end());
  for (double q : {0.005, 0.025, 0.1, 0.5, 0.9, 0.975, 0.995}) {
    const double ref = oracle::quantile_type7(x, q);
    const auto pos = std::lower_bound(x.begin(), x.end(), ref) - x.begin();
    const auto lo = std::lower_bound(x.begin(), x.end(), percentile_lower(x, q)) - x.begin();
    const auto hi = std::lower_bound(x.begin(), x.end(), percentile_upper(x, q)) - x.begin();
    CHECK(std::abs(lo - pos) <= 1);
    CHECK(std::abs(hi - pos) <= 2);
  }
}

TEST_CASE("configuration validation") {
  BootstrapConfig c;
  c.replicates = 39;
  c.level = 0.95;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.replicates = 40;
  CHECK_NOTHROW(c.validate());
  c.level = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.level = 0.99;
  c.replicates = 199;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("failure threshold") {
  BootstrapDistribution dist;
  dist.eval_grid = Vector::LinSpaced(3, 0, 1);
  dist.eta.assign(1, Matrix::Zero(100, 3));
  for (Eigen::Index r = 0; r < 100; ++r) dist.eta[0].row(r).setConstant(double(r));
  dist.failed.assign(100, false);
  for (int r = 0; r < 10; ++r) dist.failed[r] = true;
  MediationBand band;
  band.eval_grid = dist.eval_grid;
  band.eta = Matrix::Zero(3, 1);
  CHECK_NOTHROW(attach_percentile_bounds(band, dist, 0.9, 0.1));
  // 90 survivors 10..99: lower = 5th (ceil 4.5) = 14, upper = 86th (floor 85.5 + 1) = 95
  CHECK((*band.lower)(0, 0) == 14.0);
  CHECK((*band.upper)(0, 0) == 95.0);
  dist.failed[10] = true;
  CHECK_THROWS_AS(attach_percentile_bounds(band, dist, 0.9, 0.1), TooManyFailures);
  dist.failed.assign(100, true);
  CHECK_THROWS_AS(attach_percentile_bounds(band, dist, 0.9, 1.0), TooManyFailures);
}

TEST_CASE("replicates are reproducible fits of resampled panels") {
  const Panel p = small_panel(60);
  for (bool freeze : {false, true}) {
    BootstrapConfig c;
    c.replicates = 40;
    c.seed = 17;
    c.freeze_bandwidths = freeze;
    const BootstrapResult res = bootstrap_band(p, c);
    REQUIRE(res.distribution.failures() == 0);
    FitOptions opt;
    opt.dt = res.fit.curves.dt;
    opt.eval_grid = res.fit.curves.eval_grid;
    if (freeze) opt.smoother.fixed = res.fit.curves.bandwidths;
    for (std::size_t r : {0u, 7u, 39u}) {
      Rng rng(17, r);
      const Fit again = fit_mediation(resample_panel(p, rng), opt);
      CHECK((again.band.eta.col(0).transpose() - res.distribution.eta[0].row(Eigen::Index(r)))
                .cwiseAbs()
                .maxCoeff() == 0.0);
      if (freeze) CHECK(again.curves.bandwidths.beta == res.fit.curves.bandwidths.beta);
    }
    CHECK(res.fit.band.has_bounds());
    CHECK(((*res.fit.band.lower).array() <= (*res.fit.band.upper).array()).all());
  }
}

TEST_CASE("worker count does not change the distribution") {
  const Panel p = small_panel(50, 3);
  BootstrapConfig c;
  c.replicates = 40;
  c.seed = 99;
  const BootstrapResult serial = bootstrap_band(p, c);
  c.workers = 4;
  const BootstrapResult threaded = bootstrap_band(p, c);
  CHECK(serial.distribution.eta[0] == threaded.distribution.eta[0]);
  CHECK(*serial.fit.band.lower == *threaded.fit.band.lower);
  CHECK(*serial.fit.band.upper == *threaded.fit.band.upper);
}

TEST_CASE("a wider level gives a band that contains the narrower one") {
  const Panel p = small_panel(60, 4);
  BootstrapConfig c;
  c.replicates = 200;
  c.seed = 5;
  c.level = 0.95;
  const BootstrapResult r95 = bootstrap_band(p, c);
  MediationBand wide = r95.fit.band;
  attach_percentile_bounds(wide, r95.distribution, 0.99, 0.1);
  CHECK(((*wide.lower).array() <= (*r95.fit.band.lower).array()).all());
  CHECK(((*wide.upper).array() >= (*r95.fit.band.upper).array()).all());
}

TEST_CASE("bands narrow as the sample grows") {
  auto mean_width = [](std::size_t n) {
    BootstrapConfig c;
    c.replicates = 60;
    c.seed = 11;
    const BootstrapResult r = bootstrap_band(small_panel(n, 6), c);
    return ((*r.fit.band.upper) - (*r.fit.band.lower)).mean();
  };
  const double w100 = mean_width(100);
  const double w500 = mean_width(500);
  MESSAGE("mean band width N=100 " << w100 << ", N=500 " << w500);
  CHECK(w500 < w100);
  CHECK(w500 < 0.7 * w100);  // sqrt(1/5) ~ 0.45 in theory
}
