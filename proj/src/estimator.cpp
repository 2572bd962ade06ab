#include "tvmed/estimator.hpp"

namespace tvmed {

StackedSystem build_stacked_system(const CompleteCaseSlice& centered) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index k = centered.arms.cols();
  StackedSystem sys;
  sys.response.resize(2 * n);
  sys.response << centered.mediator, centered.outcome;
  sys.design = Matrix::Zero(2 * n, 2 * k + 1);
  sys.design.topLeftCorner(n, k) = centered.arms;
  sys.design.block(n, k, n, k) = centered.arms;
  sys.design.col(2 * k).tail(n) = centered.lagged_mediator;
  return sys;
}

const char* to_string(SkipReason r) {
  switch (r) {
    case SkipReason::EmptySlice: return "EmptySlice";
    case SkipReason::RankDeficient: return "RankDeficient";
  }
  return "unknown";
}

Vector RawEstimates::stacked() const {
  const Eigen::Index k = a.cols();
  const Eigen::Index width = 2 * k + 1;
  Vector d(static_cast<Eigen::Index>(n_points()) * width);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n_points()); ++r) {
    d.segment(r * width, k) = a.row(r).transpose();
    d.segment(r * width + k, k) = c.row(r).transpose();
    d(r * width + 2 * k) = b(r);
  }
  return d;
}

RawEstimates estimate_all(const Panel& panel, double rank_tol) {
  const std::size_t k = panel.n_arms();
  const std::size_t t = panel.n_times();
  std::vector<Vector> solutions;
  RawEstimates raw;
  for (std::size_t j = 1; j < t; ++j) {
    auto slice = complete_cases(panel, j);
    if (slice.rows() == 0) {
      raw.skipped.push_back({j, panel.grid()[j], SkipReason::EmptySlice});
      continue;
    }
    const auto n = static_cast<std::size_t>(slice.rows());
    auto centered = center_slice(std::move(slice));
    try {
      solutions.push_back(solve_least_squares(build_stacked_system(centered.slice), rank_tol));
    } catch (const RankDeficient&) {
      raw.skipped.push_back({j, panel.grid()[j], SkipReason::RankDeficient});
      continue;
    }
    raw.time_index.push_back(j);
    raw.times.push_back(panel.grid()[j]);
    raw.n_used.push_back(n);
  }
  if (solutions.size() < 2)
    throw TooFewTimePoints("only " + std::to_string(solutions.size()) +
                           " estimable time points; at least 2 are required");
  const auto m = static_cast<Eigen::Index>(solutions.size());
  const auto kk = static_cast<Eigen::Index>(k);
  raw.a.resize(m, kk);
  raw.c.resize(m, kk);
  raw.b.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    raw.a.row(r) = solutions[r].head(kk).transpose();
    raw.c.row(r) = solutions[r].segment(kk, kk).transpose();
    raw.b(r) = solutions[r](2 * kk);
  }
  return raw;
}

}  // namespace tvmed
