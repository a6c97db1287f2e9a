#pragma once

// Cross-correlation matrices, the Marchenko-Pastur null model and the
// market / group / random mode decomposition.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mesonet/panel.hpp"

namespace mesonet {

/// Symmetric, unit-diagonal, entries in [-1, 1].
struct CorrelationMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
  std::size_t window_length = 0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// Equal-time Pearson correlation with population (1/T) moments.
/// Throws Error(degenerate) naming the first zero-variance ticker.
CorrelationMatrix correlation_matrix(const ReturnPanel& panel);

struct MpBounds {
  double q = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Q = T/N and (1 -/+ 1/sqrt(Q))^2. Requires T > N.
MpBounds mp_bounds(std::size_t n, std::size_t t);
MpBounds mp_bounds_for_ratio(double q);

/// Marchenko-Pastur density; exactly 0 outside [lambda_min, lambda_max].
double mp_density(double lambda, const MpBounds& bounds);
/// Cumulative distribution of mp_density.
double mp_cdf(double lambda, const MpBounds& bounds);

struct ModeDecomposition {
  Eigen::VectorXd eigenvalues;   ///< descending
  Eigen::MatrixXd eigenvectors;  ///< column k pairs with eigenvalues[k]
  std::size_t n_group = 0;
  Eigen::MatrixXd market;
  Eigen::MatrixXd group;
  Eigen::MatrixXd random;
};

/// Eigendecomposition of C split into lambda_0 a_0 a_0^T, the next n_group
/// modes, and the remainder. Each eigenvector is signed so that its
/// largest-magnitude component is positive.
ModeDecomposition decompose(const CorrelationMatrix& c, std::size_t n_group = 5);

/// Inverse participation ratio sum_i a_ki^4 for every eigenvector.
std::vector<double> ipr(const ModeDecomposition& decomposition);
double ipr(const Eigen::VectorXd& vector);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> density;  ///< integrates to 1 over [lo, hi]
  std::vector<std::size_t> counts;
  std::size_t samples = 0;
  double mean = 0.0;

  double bin_width() const { return density.empty() ? 0.0 : (hi - lo) / density.size(); }
  double bin_center(std::size_t k) const { return lo + (k + 0.5) * bin_width(); }
};

/// Density histogram of values over [lo, hi]; values on the upper edge fall
/// in the last bin.
Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo,
                         double hi);

/// Histogram of the N(N-1)/2 upper-triangle coefficients over [-1, 1].
Histogram coefficient_distribution(const CorrelationMatrix& c, std::size_t bins);

}  // namespace mesonet
