#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace wattcolor::detail {

struct BoundedLsq {
  Eigen::VectorXd x;
  double ssr = 0.0;
};

// min ||A x - b||^2 subject to x_j >= lower[j] wherever lower[j] is set.
// Exact for a handful of bounds: every active set is enumerated, the
// equality-constrained problem solved, and the best feasible candidate
// kept. Returns nullopt when no candidate has full column rank.
inline std::optional<BoundedLsq> bounded_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                       const std::vector<std::optional<double>>& lower) {
  const auto n = static_cast<int>(A.cols());
  std::vector<int> bounded;
  for (int j = 0; j < n; ++j) {
    if (lower[j]) bounded.push_back(j);
  }
  std::optional<BoundedLsq> best;
  const unsigned subsets = 1u << bounded.size();
  for (unsigned mask = 0; mask < subsets; ++mask) {
    std::vector<bool> fixed(n, false);
    for (std::size_t k = 0; k < bounded.size(); ++k) {
      if (mask & (1u << k)) fixed[bounded[k]] = true;
    }
    std::vector<int> free_cols;
    Eigen::VectorXd rhs = b;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (fixed[j]) {
        x[j] = *lower[j];
        rhs -= A.col(j) * x[j];
      } else {
        free_cols.push_back(j);
      }
    }
    if (!free_cols.empty()) {
      Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(free_cols.size()));
      for (std::size_t k = 0; k < free_cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = A.col(free_cols[k]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
      if (qr.rank() < sub.cols()) continue;
      const Eigen::VectorXd sol = qr.solve(rhs);
      bool feasible = true;
      for (std::size_t k = 0; k < free_cols.size(); ++k) {
        const int j = free_cols[k];
        x[j] = sol[static_cast<Eigen::Index>(k)];
        if (lower[j] && x[j] < *lower[j]) feasible = false;
      }
      if (!feasible) continue;
    }
    const double ssr = (A * x - b).squaredNorm();
    if (!best || ssr < best->ssr) best = BoundedLsq{x, ssr};
  }
  return best;
}

}  // namespace wattcolor::detail
