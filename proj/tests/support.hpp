#pragma once

// Random inputs for tests, drawn from the standard library directly so that
// expectations never depend on the synthetic-market generator under test.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mesonet/panel.hpp"

namespace testing {

inline mesonet::ReturnPanel gaussian_panel(std::size_t n, std::size_t t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  mesonet::ReturnPanel p;
  p.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (Eigen::Index i = 0; i < p.returns.rows(); ++i) {
    for (Eigen::Index k = 0; k < p.returns.cols(); ++k) p.returns(i, k) = normal(rng);
  }
  const auto start = *mesonet::parse_date("2020-01-01");
  for (std::size_t i = 0; i < n; ++i) p.tickers.push_back(fmt::format("T{:02d}", i));
  for (std::size_t k = 0; k < t; ++k) p.dates.push_back(start + std::chrono::days(k));
  return p;
}

/// One common factor with loading `beta` on every series.
inline mesonet::ReturnPanel factor_panel(std::size_t n, std::size_t t, double beta,
                                         std::uint64_t seed) {
  auto p = gaussian_panel(n, t, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < p.returns.cols(); ++k) {
    const double f = normal(rng);
    for (Eigen::Index i = 0; i < p.returns.rows(); ++i) p.returns(i, k) += beta * f;
  }
  return p;
}

inline Eigen::MatrixXd random_points(std::size_t n, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(i, k) = u(rng);
  return x;
}

inline Eigen::MatrixXd pairwise(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd d(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
  return d;
}

inline std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("N{}", i));
  return out;
}

}  // namespace testing
