#include "tvmed/smoother.hpp"

#include "tvmed/estimator.hpp"

#include <algorithm>

namespace tvmed {

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Gaussian: return "gaussian";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "gaussian") return KernelFamily::Gaussian;
  throw InvalidArgument("unknown kernel '" + name + "' (expected epanechnikov or gaussian)");
}

double rot_constant(KernelFamily f) {
  return f == KernelFamily::Gaussian ? kernel_constants::kGaussianRot
                                     : kernel_constants::kEpanechnikovRot;
}

double rot_bandwidth_unfloored(const Vector& times, const Vector& values, KernelFamily family) {
  const Eigen::Index n = times.size();
  if (n != values.size()) throw InvalidArgument("rot_bandwidth: times/values length mismatch");
  if (n < 5) throw InvalidArgument("rot_bandwidth: quartic pilot needs at least 5 points");
  const double lo = times.minCoeff();
  const double hi = times.maxCoeff();
  const double range = hi - lo;
  if (!(range > 0.0)) throw InvalidArgument("rot_bandwidth: times have zero range");

  // Pilot in standardized time u = (t - center)/scale for conditioning.
  const double center = 0.5 * (lo + hi);
  const double scale = 0.5 * range;
  const Vector u = (times.array() - center) / scale;
  Matrix design(n, 5);
  design.col(0).setOnes();
  for (int p = 1; p < 5; ++p) design.col(p) = design.col(p - 1).cwiseProduct(u);
  Vector coef;
  try {
    coef = solve_least_squares(design, values, 1e-12);
  } catch (const RankDeficient&) {
    throw InvalidArgument("rot_bandwidth: fewer than 5 distinct times");
  }
  const Vector resid = values - design * coef;
  const double sigma2 = resid.squaredNorm() / double(n - 5);

  // m''(t) = (2 c2 + 6 c3 u + 12 c4 u^2) / scale^2
  const Vector curv =
      ((2.0 * coef(2) + 6.0 * coef(3) * u.array() + 12.0 * coef(4) * u.array().square()) /
       (scale * scale))
          .matrix();
  const double curvature = curv.squaredNorm();
  // Curvature indistinguishable from rounding of the fitted values counts as zero.
  const double value_scale = values.cwiseAbs().maxCoeff() + 1e-300;
  if (std::sqrt(curvature / double(n)) * scale * scale <= 1e-9 * value_scale)
    return range / 4.0;
  return rot_constant(family) * std::pow(sigma2 * range / curvature, 0.2);
}

double rot_bandwidth(const Vector& times, const Vector& values, KernelFamily family) {
  const double raw = rot_bandwidth_unfloored(times, values, family);
  std::vector<double> sorted(times.data(), times.data() + times.size());
  std::sort(sorted.begin(), sorted.end());
  double max_gap = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
  return std::max(raw, 2.0 * max_gap);
}

Vector smooth_series(const Vector& times, const Vector& values, const KernelSpec& kernel,
                     const Vector& eval_grid) {
  if (times.size() != values.size())
    throw InvalidArgument("smooth_series: times/values length mismatch");
  if (times.size() < 2) throw InvalidArgument("smooth_series: need at least 2 points");
  const double lo = times.minCoeff() - kernel.bandwidth;
  const double hi = times.maxCoeff() + kernel.bandwidth;
  Vector out(eval_grid.size());
  for (Eigen::Index e = 0; e < eval_grid.size(); ++e) {
    const double t = eval_grid(e);
    if (t < lo || t > hi)
      throw InvalidArgument("smooth_series: evaluation point " + std::to_string(t) +
                            " is more than one bandwidth outside the data");
    out(e) = local_linear_weights(times, t, kernel).dot(values);
  }
  return out;
}

}  // namespace tvmed
