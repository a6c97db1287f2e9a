#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mesonet/error.hpp"
#include "mesonet/spectral.hpp"
#include "oracles/stats.hpp"
#include "support.hpp"

using namespace mesonet;

TEST_CASE("correlation matches a direct Pearson computation") {
  const auto p = testing::factor_panel(12, 150, 0.7, 5);
  const auto c = correlation_matrix(p);
  REQUIRE(c.size() == 12);
  CHECK(c.window_length == 150);
  CHECK(c.tickers == p.tickers);
  for (Eigen::Index i = 0; i < 12; ++i) {
    CHECK(c.values(i, i) == 1.0);
    for (Eigen::Index j = 0; j < 12; ++j) {
      CHECK(c.values(i, j) == c.values(j, i));
      CHECK(std::abs(c.values(i, j)) <= 1.0);
      if (i != j) {
        CHECK(c.values(i, j) ==
              doctest::Approx(oracle::pearson(oracle::row(p.returns, i), oracle::row(p.returns, j)))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("correlation is invariant to affine rescaling of a series") {
  auto p = testing::gaussian_panel(4, 80, 6);
  const auto before = correlation_matrix(p).values;
  p.returns.row(2) = p.returns.row(2).array() * 3.5 + 0.25;
  const auto after = correlation_matrix(p).values;
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("windowed correlation equals correlating the same rows directly") {
  const auto p = testing::gaussian_panel(5, 300, 7);
  const auto w = window(p, p.dates[40], 100);
  ReturnPanel direct = p;
  direct.returns = p.returns.middleCols(40, 100);
  direct.dates.assign(p.dates.begin() + 40, p.dates.begin() + 140);
  CHECK(correlation_matrix(w).values == correlation_matrix(direct).values);
}

TEST_CASE("degenerate series are reported by ticker") {
  auto p = testing::gaussian_panel(3, 30, 8);
  p.returns.row(1).setConstant(0.01);
  try {
    correlation_matrix(p);
    FAIL("expected degenerate error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate);
    CHECK(std::string(e.what()).find("T01") != std::string::npos);
  }
}

TEST_CASE("MP bounds") {
  const auto b = mp_bounds_for_ratio(5.0);
  CHECK(b.lambda_min == doctest::Approx(0.3056).epsilon(1e-4));
  CHECK(std::abs(b.lambda_min - 0.3056) <= 1e-4);
  CHECK(std::abs(b.lambda_max - 2.0944) <= 1e-4);
  const auto b10 = mp_bounds(50, 500);
  CHECK(b10.q == 10.0);
  CHECK(b10.lambda_max == doctest::Approx(std::pow(1.0 + 1.0 / std::sqrt(10.0), 2)));
  CHECK_THROWS_AS(mp_bounds(100, 100), Error);
  CHECK_THROWS_AS(mp_bounds(100, 50), Error);
}

TEST_CASE("MP density is a probability density and its CDF agrees with quadrature") {
  for (const double q : {1.5, 5.0, 20.0}) {
    const auto b = mp_bounds_for_ratio(q);
    CHECK(mp_density(b.lambda_min - 1e-9, b) == 0.0);
    CHECK(mp_density(b.lambda_max + 1e-9, b) == 0.0);
    CHECK(mp_cdf(b.lambda_min - 1.0, b) == 0.0);
    CHECK(mp_cdf(b.lambda_max + 1.0, b) == 1.0);
    const auto f = [&](double x) { return mp_density(x, b); };
    CHECK(oracle::adaptive_simpson(f, b.lambda_min, b.lambda_max, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-6));
    for (int k = 1; k < 10; ++k) {
      const double x = b.lambda_min + (b.lambda_max - b.lambda_min) * k / 10.0;
      CAPTURE(q);
      CAPTURE(x);
      CHECK(mp_cdf(x, b) == doctest::Approx(oracle::adaptive_simpson(f, b.lambda_min, x, 1e-12))
                                .epsilon(1e-6));
    }
    double prev = 0.0;
    for (int k = 0; k <= 50; ++k) {
      const double v = mp_cdf(b.lambda_min + (b.lambda_max - b.lambda_min) * k / 50.0, b);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("decomposition reconstructs the correlation matrix") {
  const auto c = correlation_matrix(testing::factor_panel(20, 200, 0.6, 11));
  const auto d = decompose(c, 5);
  CHECK(d.n_group == 5);
  CHECK(((d.market + d.group + d.random) - c.values).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(d.eigenvalues.sum() - 20.0) <= 1e-8);
  for (Eigen::Index k = 1; k < d.eigenvalues.size(); ++k) {
    CHECK(d.eigenvalues(k - 1) >= d.eigenvalues(k));
  }
  for (Eigen::Index k = 0; k < d.eigenvectors.cols(); ++k) {
    const auto v = d.eigenvectors.col(k);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    CHECK(v(at) > 0.0);
    CHECK((c.values * v - d.eigenvalues(k) * v).norm() < 1e-10);
  }
  CHECK((d.market - d.eigenvalues(0) * d.eigenvectors.col(0) * d.eigenvectors.col(0).transpose())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("decomposition limits") {
  const auto c = correlation_matrix(testing::gaussian_panel(4, 50, 3));
  CHECK_NOTHROW(decompose(c, 3));
  CHECK_THROWS_AS(decompose(c, 4), Error);
  const auto d = decompose(c, 0);
  CHECK(d.group.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inverse participation ratio") {
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(16, 0.25);
  CHECK(ipr(flat) == doctest::Approx(1.0 / 16.0));
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(16);
  spike(3) = 1.0;
  CHECK(ipr(spike) == 1.0);
  const auto d = decompose(correlation_matrix(testing::factor_panel(30, 300, 1.0, 4)), 5);
  const auto values = ipr(d);
  CHECK(values.size() == 30);
  for (const double v : values) {
    CHECK(v >= 1.0 / 30.0 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("histograms integrate to one") {
  const auto c = correlation_matrix(testing::gaussian_panel(25, 100, 12));
  const auto h = coefficient_distribution(c, 40);
  CHECK(h.samples == 25 * 24 / 2);
  CHECK(h.lo == -1.0);
  CHECK(h.hi == 1.0);
  double area = 0.0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < h.density.size(); ++k) {
    area += h.density[k] * h.bin_width();
    total += h.counts[k];
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total == h.samples);

  const auto edge = make_histogram({0.0, 0.5, 1.0}, 2, 0.0, 1.0);
  CHECK(edge.counts == std::vector<std::size_t>{1, 2});
  CHECK(edge.mean == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_histogram({0.0}, 0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(make_histogram({0.0}, 3, 1.0, 1.0), Error);
}
