#include "mesonet/partialcorr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mesonet/error.hpp"

namespace mesonet {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kOvershoot = 1e-12;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double conditioned(double c_xy, double c_xm, double c_ym, const char* what) {
  const double rest_x = 1.0 - c_xm * c_xm;
  const double rest_y = 1.0 - c_ym * c_ym;
  if (rest_x < kDegenerate || rest_y < kDegenerate) {
    throw Error(ErrorCode::degenerate,
                fmt::format("{}: conditioning variable is (nearly) collinear with a series "
                            "(1 - C^2 = {:.3e})",
                            what, std::min(rest_x, rest_y)));
  }
  const double value = (c_xy - c_xm * c_ym) / std::sqrt(rest_x * rest_y);
  if (std::abs(value) > 1.0) {
    if (std::abs(value) - 1.0 > kOvershoot) {
      throw Error(ErrorCode::numerical,
                  fmt::format("{}: partial correlation {} outside [-1, 1]; inputs are not a "
                              "valid correlation triple",
                              what, value));
    }
    return std::clamp(value, -1.0, 1.0);
  }
  return value;
}

}  // namespace

double partial_given_market(double c_xy, double c_xm, double c_ym) {
  return conditioned(c_xy, c_xm, c_ym, "partial correlation given market");
}

double partial_given_market_and_z(double pc_xy, double pc_xz, double pc_yz) {
  return conditioned(pc_xy, pc_xz, pc_yz, "partial correlation given market and z");
}

PartialCorrelationSet partial_correlations(const ReturnPanel& panel, const std::string& market,
                                           bool full_tensor) {
  const std::size_t m_row = panel.index_of(market);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < panel.num_series(); ++i) {
    if (i != m_row) order.push_back(i);
  }
  const std::size_t n = order.size();
  if (n < 3) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("partial correlation analysis needs at least 3 stocks besides the "
                            "market, got {}",
                            n));
  }
  order.push_back(m_row);

  PartialCorrelationSet pc;
  pc.market = market;
  pc.base = correlation_matrix(panel.select(order));
  pc.stocks.assign(pc.base.tickers.begin(), pc.base.tickers.end() - 1);

  const auto ni = static_cast<Eigen::Index>(n);
  const auto& c = pc.base.values;
  pc.given_market.resize(ni, ni);
  for (Eigen::Index x = 0; x < ni; ++x) {
    pc.given_market(x, x) = 1.0;
    for (Eigen::Index y = x + 1; y < ni; ++y) {
      const double v = partial_given_market(c(x, y), c(x, ni), c(y, ni));
      pc.given_market(x, y) = v;
      pc.given_market(y, x) = v;
    }
  }

  // Second-order partials share the symmetric (x, y) slot for every z.
  const auto& g = pc.given_market;
  pc.average_influence = Eigen::MatrixXd::Constant(ni, ni, kNaN);
  pc.given_market_z_mean = Eigen::MatrixXd::Constant(ni, ni, kNaN);
  pc.given_market_z_max = Eigen::MatrixXd::Constant(ni, ni, kNaN);
  if (full_tensor) {
    pc.tensor = InfluenceTensor{n, std::vector<double>(n * n * n, kNaN)};
  }
  for (Eigen::Index x = 0; x < ni; ++x) {
    for (Eigen::Index y = x + 1; y < ni; ++y) {
      double sum = 0.0;
      double best = -std::numeric_limits<double>::infinity();
      for (Eigen::Index z = 0; z < ni; ++z) {
        if (z == x || z == y) continue;
        const double second = partial_given_market_and_z(g(x, y), g(x, z), g(y, z));
        const double d = g(x, y) - second;
        sum += second;
        best = std::max(best, second);
        if (pc.tensor) {
          const auto ux = static_cast<std::size_t>(x);
          const auto uy = static_cast<std::size_t>(y);
          const auto uz = static_cast<std::size_t>(z);
          pc.tensor->values[(ux * n + uy) * n + uz] = d;
          pc.tensor->values[(uy * n + ux) * n + uz] = d;
        }
      }
      const double mean = sum / static_cast<double>(n - 2);
      pc.given_market_z_mean(x, y) = pc.given_market_z_mean(y, x) = mean;
      pc.given_market_z_max(x, y) = pc.given_market_z_max(y, x) = best;
    }
  }
  for (std::size_t z = 0; z < n; ++z) {
    const auto values = average_influence(z, pc);
    std::size_t k = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if (x == z) continue;
      pc.average_influence(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z)) =
          values[k++];
    }
  }
  return pc;
}

double influence(std::size_t x, std::size_t y, std::size_t z, const PartialCorrelationSet& pc) {
  const std::size_t n = pc.size();
  if (x >= n || y >= n || z >= n) {
    throw Error(ErrorCode::invalid_argument, "influence index out of range");
  }
  if (x == y || x == z || y == z) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("influence needs distinct indices, got ({}, {}, {})", x, y, z));
  }
  const auto& g = pc.given_market;
  const auto xi = static_cast<Eigen::Index>(x);
  const auto yi = static_cast<Eigen::Index>(y);
  const auto zi = static_cast<Eigen::Index>(z);
  return g(xi, yi) - partial_given_market_and_z(g(xi, yi), g(xi, zi), g(yi, zi));
}

std::vector<double> average_influence(std::size_t z, const PartialCorrelationSet& pc) {
  const std::size_t n = pc.size();
  if (n < 3) throw Error(ErrorCode::insufficient_data, "average influence needs N >= 3");
  if (z >= n) throw Error(ErrorCode::invalid_argument, "average influence index out of range");
  std::vector<double> out;
  out.reserve(n - 1);
  for (std::size_t x = 0; x < n; ++x) {
    if (x == z) continue;
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x || y == z) continue;
      sum += influence(x, y, z, pc);
    }
    out.push_back(sum / static_cast<double>(n - 2));
  }
  return out;
}

}  // namespace mesonet
