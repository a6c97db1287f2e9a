#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/netgeo.hpp"

namespace mesonet {

void DistanceMatrix::validate() const {
  const auto n = values.rows();
  if (values.cols() != n || static_cast<std::size_t>(n) != tickers.size()) {
    throw Error(ErrorCode::invalid_argument, "distance matrix shape does not match tickers");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "distance matrix has non-finite entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("distance matrix diagonal entry {} is nonzero", i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (values(i, j) != values(j, i) || values(i, j) < 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("distance matrix entry ({}, {}) is negative or asymmetric", i,
                                j));
      }
    }
  }
}

DistanceMatrix to_distance(const CorrelationMatrix& c) {
  DistanceMatrix d;
  d.tickers = c.tickers;
  const auto n = c.values.rows();
  d.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.values(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::sqrt(std::max(0.0, 2.0 * (1.0 - c.values(i, j))));
      d.values(i, j) = v;
      d.values(j, i) = v;
    }
  }
  return d;
}

}  // namespace mesonet
