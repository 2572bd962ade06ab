#pragma once

// Local-linear kernel smoothing on irregular grids.

#include "tvmed/types.hpp"

#include <cmath>
#include <string>

namespace tvmed {

enum class KernelFamily { Epanechnikov, Gaussian };

const char* to_string(KernelFamily f);
KernelFamily parse_kernel_family(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::Epanechnikov;
  double bandwidth = 1.0;
};

namespace kernel_constants {
// Rule-of-thumb constants C_{nu,p}(K) for local-linear fits (p = 1, nu = 0),
// Fan & Gijbels (1996), "Local Polynomial Modelling and Its Applications",
// Table 3.2. Closed form: [int K^2 / (int u^2 K)^2]^(1/5).
inline constexpr double kEpanechnikovRot = 1.719;
inline constexpr double kGaussianRot = 0.776;
}  // namespace kernel_constants

double rot_constant(KernelFamily f);

template <typename S>
inline S kernel_value(KernelFamily family, S u) {
  using std::abs;
  using std::exp;
  switch (family) {
    case KernelFamily::Epanechnikov:
      return abs(u) < S(1) ? S(0.75) * (S(1) - u * u) : S(0);
    case KernelFamily::Gaussian:
      return S(0.3989422804014327) * exp(S(-0.5) * u * u);
  }
  return S(0);
}

/// Equivalent-kernel weights of a local-linear fit evaluated at `target`:
///   w_l = K_h(t_l - t) [S_2 - (t_l - t) S_1] / (S_0 S_2 - S_1^2).
/// They reproduce constants and linear functions exactly. Throws
/// DegenerateNeighborhood when fewer than two sources carry kernel mass or
/// the local design is numerically singular.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> local_linear_weights(
    const Eigen::MatrixBase<Derived>& sources, typename Derived::Scalar target,
    const KernelSpec& kernel) {
  typedef typename Derived::Scalar S;
  typedef Eigen::Matrix<S, Eigen::Dynamic, 1> Vec;
  const S h = S(kernel.bandwidth);
  if (!(h > S(0))) throw InvalidArgument("bandwidth must be positive");
  const Vec d = sources.derived().array() - target;
  Vec k(d.size());
  Eigen::Index support = 0;
  for (Eigen::Index l = 0; l < d.size(); ++l) {
    k(l) = kernel_value(kernel.family, S(d(l) / h));
    if (k(l) > S(0)) ++support;
  }
  if (support < 2)
    throw DegenerateNeighborhood(double(target), "fewer than two points inside the kernel window at t=" +
                                                     std::to_string(double(target)));
  const S s0 = k.sum();
  const S s1 = k.dot(d);
  const S s2 = (k.array() * d.array().square()).sum();
  const S det = s0 * s2 - s1 * s1;
  if (!(det > S(1e-12) * s0 * s2))
    throw DegenerateNeighborhood(double(target),
                                 "singular local design at t=" + std::to_string(double(target)));
  return (k.array() * (s2 - d.array() * s1)).matrix() / det;
}

/// Rows are local_linear_weights at each evaluation point.
template <typename DerivedS, typename DerivedE>
Eigen::Matrix<typename DerivedS::Scalar, Eigen::Dynamic, Eigen::Dynamic> local_linear_weight_matrix(
    const Eigen::MatrixBase<DerivedS>& sources, const Eigen::MatrixBase<DerivedE>& eval,
    const KernelSpec& kernel) {
  typedef typename DerivedS::Scalar S;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> w(eval.size(), sources.size());
  for (Eigen::Index e = 0; e < eval.size(); ++e)
    w.row(e) = local_linear_weights(sources, S(eval(e)), kernel).transpose();
  return w;
}

/// Plug-in bandwidth from a global quartic pilot fit:
///   h = C(K) [ sigma^2 (t_max - t_min) / sum_j m''(t_j)^2 ]^(1/5)
/// with sigma^2 the pilot residual mean square on n-5 degrees of freedom.
/// Exactly linear data has no curvature; the result then falls back to
/// (t_max - t_min)/4. The result is never below twice the largest gap between
/// consecutive sources, so every evaluation point within half a gap of the
/// data keeps two points in its window.
double rot_bandwidth(const Vector& times, const Vector& values, KernelFamily family);

/// The raw rule-of-thumb value without the gap floor (pilot curvature
/// fallback still applies).
double rot_bandwidth_unfloored(const Vector& times, const Vector& values, KernelFamily family);

/// Weighted sums of `values` at each evaluation point. Evaluation points must
/// lie within one bandwidth of the source range.
Vector smooth_series(const Vector& times, const Vector& values, const KernelSpec& kernel,
                     const Vector& eval_grid);

}  // namespace tvmed
