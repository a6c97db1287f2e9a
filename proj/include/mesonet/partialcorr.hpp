#pragma once

// Partial correlations controlling for an exogenous market index and for a
// third stock, plus the influence quantities built from them.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mesonet/panel.hpp"
#include "mesonet/spectral.hpp"

namespace mesonet {

/// (C_xy - C_xM C_yM) / sqrt((1 - C_xM^2)(1 - C_yM^2)).
/// Throws Error(degenerate) when 1 - C^2 < 1e-12 for either conditioning term
/// or when the result overshoots [-1, 1] by more than 1e-12.
double partial_given_market(double c_xy, double c_xm, double c_ym);

/// Same formula one level up: conditions C_{x,y|M} on z.
double partial_given_market_and_z(double pc_xy, double pc_xz, double pc_yz);

/// Full-tensor row layout: d(x, y | z) at ((x * n) + y) * n + z.
struct InfluenceTensor {
  std::size_t n = 0;
  std::vector<double> values;  ///< NaN where indices are not distinct

  double at(std::size_t x, std::size_t y, std::size_t z) const {
    return values[(x * n + y) * n + z];
  }
};

struct PartialCorrelationSet {
  /// Correlation over the stocks followed by the market index (last row).
  CorrelationMatrix base;
  std::string market;
  std::vector<std::string> stocks;
  /// C_{x,y|M}, unit diagonal.
  Eigen::MatrixXd given_market;
  /// d(x|z): rows x, columns z; NaN on the diagonal.
  Eigen::MatrixXd average_influence;
  /// Mean and maximum of C_{x,y|M,z} over z not in {x, y}; NaN on the diagonal.
  Eigen::MatrixXd given_market_z_mean;
  Eigen::MatrixXd given_market_z_max;
  std::optional<InfluenceTensor> tensor;

  std::size_t size() const { return stocks.size(); }
};

/// Builds every market-controlled quantity for the panel. The market ticker
/// is removed from the stock set. Needs at least 3 stocks.
PartialCorrelationSet partial_correlations(const ReturnPanel& panel, const std::string& market,
                                           bool full_tensor = false);

/// d(x, y | z) = C_{x,y|M} - C_{x,y|M,z}; indices must be distinct.
double influence(std::size_t x, std::size_t y, std::size_t z, const PartialCorrelationSet& pc);

/// d(x|z) for every x != z, in index order (N - 1 values). Each is the mean of
/// d(x, y | z) over y not in {x, z}, summed in ascending y.
std::vector<double> average_influence(std::size_t z, const PartialCorrelationSet& pc);

}  // namespace mesonet
