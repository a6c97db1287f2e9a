#include <cmath>

#include "doctest.h"
#include "mesonet/error.hpp"
#include "mesonet/partialcorr.hpp"
#include "oracles/stats.hpp"
#include "support.hpp"

using namespace mesonet;

namespace {

/// Stocks T00..T(n-1) plus a market row "M" that drives them all.
ReturnPanel with_market(std::size_t n, std::size_t t, std::uint64_t seed) {
  auto p = testing::factor_panel(n + 1, t, 0.8, seed);
  p.tickers.back() = "M";
  return p;
}

}  // namespace

TEST_CASE("first-order formula") {
  CHECK(partial_given_market(0.5, 0.0, 0.0) == 0.5);
  CHECK(partial_given_market(0.5, 0.5, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK(partial_given_market(0.3, 0.6, -0.2) ==
        doctest::Approx((0.3 + 0.12) / std::sqrt(0.64 * 0.96)));
  CHECK_THROWS_AS(partial_given_market(0.5, 1.0, 0.2), Error);
  try {
    partial_given_market(0.2, 0.9, -0.9);
    FAIL("expected invalid triple");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numerical);
  }
  try {
    partial_given_market(0.9, 1.0 - 1e-14, 0.5);
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
}

TEST_CASE("market-controlled correlations match residual regression") {
  const auto p = with_market(8, 200, 31);
  const auto pc = partial_correlations(p, "M");
  REQUIRE(pc.size() == 8);
  const auto m = oracle::row(p.returns, 8);
  for (Eigen::Index x = 0; x < 8; ++x) {
    CHECK(pc.given_market(x, x) == 1.0);
    for (Eigen::Index y = x + 1; y < 8; ++y) {
      const double ref =
          oracle::partial_by_regression(oracle::row(p.returns, x), oracle::row(p.returns, y), {m});
      CHECK(pc.given_market(x, y) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(pc.given_market(x, y) == pc.given_market(y, x));
    }
  }
}

TEST_CASE("second-order partials match regression on market and z") {
  const auto p = with_market(6, 250, 32);
  const auto pc = partial_correlations(p, "M", true);
  const auto m = oracle::row(p.returns, 6);
  for (std::size_t x = 0; x < 6; ++x) {
    for (std::size_t y = 0; y < 6; ++y) {
      for (std::size_t z = 0; z < 6; ++z) {
        if (x == y || y == z || x == z) continue;
        const double second = oracle::partial_by_regression(
            oracle::row(p.returns, static_cast<Eigen::Index>(x)),
            oracle::row(p.returns, static_cast<Eigen::Index>(y)),
            {m, oracle::row(p.returns, static_cast<Eigen::Index>(z))});
        const double d = pc.given_market(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) - second;
        CHECK(influence(x, y, z, pc) == doctest::Approx(d).epsilon(1e-10));
        CHECK(pc.tensor->at(x, y, z) == influence(x, y, z, pc));
      }
    }
  }
  CHECK(std::isnan(pc.tensor->at(0, 0, 1)));
}

TEST_CASE("average influence is the mean over y in index order") {
  const auto p = with_market(10, 200, 33);
  const auto pc = partial_correlations(p, "M");
  for (std::size_t z = 0; z < 10; ++z) {
    const auto avg = average_influence(z, pc);
    REQUIRE(avg.size() == 9);
    std::size_t k = 0;
    for (std::size_t x = 0; x < 10; ++x) {
      if (x == z) {
        CHECK(std::isnan(pc.average_influence(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z))));
        continue;
      }
      double sum = 0.0;
      for (std::size_t y = 0; y < 10; ++y) {
        if (y != x && y != z) sum += influence(x, y, z, pc);
      }
      CHECK(avg[k] == sum / 8.0);
      CHECK(pc.average_influence(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z)) == avg[k]);
      ++k;
    }
  }
}

TEST_CASE("z aggregates summarise the second-order partials") {
  const auto p = with_market(5, 180, 34);
  const auto pc = partial_correlations(p, "M");
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 5; ++y) {
      const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
      if (x == y) {
        CHECK(std::isnan(pc.given_market_z_mean(xi, yi)));
        continue;
      }
      double sum = 0.0, best = -2.0;
      for (std::size_t z = 0; z < 5; ++z) {
        if (z == x || z == y) continue;
        const double second = pc.given_market(xi, yi) - influence(x, y, z, pc);
        sum += second;
        best = std::max(best, second);
      }
      CHECK(pc.given_market_z_mean(xi, yi) == doctest::Approx(sum / 3.0).epsilon(1e-14));
      CHECK(pc.given_market_z_max(xi, yi) == doctest::Approx(best).epsilon(1e-14));
    }
  }
}

TEST_CASE("market handling") {
  const auto p = with_market(4, 100, 35);
  const auto pc = partial_correlations(p, "M");
  CHECK(pc.market == "M");
  CHECK(std::find(pc.stocks.begin(), pc.stocks.end(), "M") == pc.stocks.end());
  CHECK(pc.base.tickers.back() == "M");
  CHECK_FALSE(pc.tensor.has_value());

  try {
    partial_correlations(p, "NOPE");
    FAIL("expected unknown ticker");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_ticker);
  }
  const auto small = with_market(2, 100, 36);
  CHECK_THROWS_AS(partial_correlations(small, "M"), Error);
  CHECK_THROWS_AS(influence(0, 0, 1, pc), Error);
  CHECK_THROWS_AS(influence(0, 1, 9, pc), Error);
}

TEST_CASE("a stock that is a copy of the market is degenerate") {
  auto p = with_market(4, 100, 37);
  p.returns.row(1) = p.returns.row(4);
  try {
    partial_correlations(p, "M");
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
  }
}
