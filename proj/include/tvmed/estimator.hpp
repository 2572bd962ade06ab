#pragma once

// Step one of the two-step fit: per-time stacked least squares.

#include "tvmed/panel.hpp"
#include "tvmed/types.hpp"

#include <Eigen/QR>

#include <string>
#include <vector>

namespace tvmed {

inline constexpr double kDefaultRankTol = 1e-10;

/// Mediator block stacked over outcome block. Column layout for K arms:
/// [a_1..a_K | c_1..c_K | b]. Mediator rows are (x_i | 0 | 0), outcome rows
/// are (0 | x_i | m_{i,j-1}).
struct StackedSystem {
  Vector response;  // 2 n_j
  Matrix design;    // 2 n_j x (2K + 1)
};

StackedSystem build_stacked_system(const CompleteCaseSlice& centered);

/// Least-squares minimizer of |response - design * delta| via column-pivoted
/// Householder QR. A pivot counts toward the rank when it exceeds
/// rank_tol times the largest pivot (the largest column norm). Throws
/// RankDeficient when the numerical rank is below the column count.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> solve_least_squares(
    const Eigen::MatrixBase<DerivedA>& design, const Eigen::MatrixBase<DerivedB>& response,
    typename DerivedA::Scalar rank_tol = kDefaultRankTol) {
  typedef typename DerivedA::Scalar S;
  typedef Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> Mat;
  if (design.rows() != response.rows())
    throw InvalidArgument("solve_least_squares: row count mismatch");
  const Eigen::Index cols = design.cols();
  if (design.rows() < cols) throw RankDeficient(design.rows(), cols);
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  qr.setThreshold(rank_tol);
  if (qr.rank() < cols) throw RankDeficient(qr.rank(), cols);
  return qr.solve(response.derived());
}

inline Vector solve_least_squares(const StackedSystem& system,
                                  double rank_tol = kDefaultRankTol) {
  return solve_least_squares(system.design, system.response, rank_tol);
}

enum class SkipReason { EmptySlice, RankDeficient };
const char* to_string(SkipReason r);

struct SkippedPoint {
  std::size_t time_index;
  double time;
  SkipReason reason;
};

/// Raw per-time coefficients d(t_j). Row r of `a`, `c`, `b` belongs to
/// `times[r]`; the arrays never contain skipped points.
struct RawEstimates {
  std::vector<std::size_t> time_index;  // grid positions
  std::vector<double> times;
  Matrix a;  // n_points x K
  Matrix c;  // n_points x K
  Vector b;
  std::vector<std::size_t> n_used;
  std::vector<SkippedPoint> skipped;

  std::size_t n_points() const { return times.size(); }
  std::size_t n_arms() const { return static_cast<std::size_t>(a.cols()); }
  Vector times_vector() const { return Eigen::Map<const Vector>(times.data(), times.size()); }
  /// The stacked vector d = (a_1..a_K, c_1..c_K, b) per time, concatenated.
  Vector stacked() const;
};

/// Runs complete_cases, center_slice, build and solve at every grid position
/// 1..T-1. Throws TooFewTimePoints when fewer than two points are estimable.
RawEstimates estimate_all(const Panel& panel, double rank_tol = kDefaultRankTol);

}  // namespace tvmed
