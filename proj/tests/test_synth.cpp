#include <cmath>
#include <set>

#include "doctest.h"
#include "mesonet/error.hpp"
#include "mesonet/netgeo.hpp"
#include "mesonet/spectral.hpp"
#include "mesonet/synth.hpp"

using namespace mesonet;

namespace {

double mean_off_diagonal(const Eigen::MatrixXd& c) {
  const auto n = c.rows();
  return (c.sum() - c.trace()) / static_cast<double>(n * (n - 1));
}

std::size_t above(const Eigen::VectorXd& values, double threshold) {
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) k += values(i) > threshold ? 1 : 0;
  return k;
}

}  // namespace

TEST_CASE("generation is deterministic and seed dependent") {
  FactorModelSpec spec;
  spec.n_stocks = 12;
  spec.n_days = 100;
  spec.beta_min = 0.2;
  spec.beta_max = 0.9;
  spec.sectors = {{6, 0.5}, {6, 0.4}};
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.stocks.returns == b.stocks.returns);
  CHECK(a.market == b.market);
  CHECK(a.betas == b.betas);
  spec.seed = 43;
  CHECK(generate(spec).stocks.returns != a.stocks.returns);

  CHECK_NOTHROW(a.stocks.validate());
  CHECK(a.stocks.tickers.front() == "S000");
  CHECK(a.stocks.length() == 100);
  CHECK(a.sector_of[5] == 0);
  CHECK(a.sector_of[6] == 1);
  for (const double beta : a.betas) {
    CHECK(beta >= 0.2);
    CHECK(beta <= 0.9);
  }
  const auto w = a.with_market();
  CHECK(w.tickers.back() == "MKT");
  for (std::size_t t = 0; t < 100; ++t) CHECK(w.returns(12, static_cast<Eigen::Index>(t)) == a.market[t]);
}

TEST_CASE("the construction formula holds exactly without noise contributions") {
  FactorModelSpec spec;
  spec.n_stocks = 3;
  spec.n_days = 5;
  spec.beta_min = 1.0;
  spec.beta_max = 1.0;
  spec.idiosyncratic_sigma = 1e-300;
  const auto m = generate(spec);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(m.stocks.returns(0, static_cast<Eigen::Index>(t)) == doctest::Approx(m.market[t]));
  }
}

TEST_CASE("Gaussian stream") {
  GaussianStream g(1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double v = g.next();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.01);
  GaussianStream u(2);
  for (int k = 0; k < 1000; ++k) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("pure noise panel looks like the null model") {
  FactorModelSpec spec;
  spec.n_stocks = 40;
  spec.n_days = 400;
  const auto c = correlation_matrix(generate(spec).stocks);
  CHECK(std::abs(mean_off_diagonal(c.values)) < 0.01);
  const auto d = decompose(c, 5);
  const auto b = mp_bounds(40, 400);
  CHECK(above(d.eigenvalues, b.lambda_max + 0.1) == 0);
}

TEST_CASE("one market factor produces exactly one large eigenvalue") {
  FactorModelSpec spec;
  spec.n_stocks = 50;
  spec.n_days = 500;
  spec.beta_min = 0.8;
  spec.beta_max = 1.2;
  const auto c = correlation_matrix(generate(spec).stocks);
  const auto d = decompose(c, 5);
  const auto b = mp_bounds(50, 500);
  CHECK(above(d.eigenvalues, b.lambda_max) == 1);
}

TEST_CASE("sector factors produce group modes and clean clusters") {
  FactorModelSpec spec;
  spec.n_stocks = 30;
  spec.n_days = 500;
  spec.beta_min = -1.0;
  spec.beta_max = 1.0;
  spec.sectors = {{10, 1.0}, {10, 1.0}, {10, 1.0}};
  // Beta dispersion within sectors is what separates the market from the sector span.
  const auto m = generate(spec);
  const auto c = correlation_matrix(m.stocks);
  const auto d = decompose(c, 5);
  CHECK(above(d.eigenvalues, mp_bounds(30, 500).lambda_max) >= 4);

  const auto dendro = ward_dendrogram(to_distance(c));
  // 27 merges are needed to collapse each sector into one cluster.
  std::vector<std::size_t> sector_of_cluster(m.sector_of);
  for (std::size_t k = 0; k < 27; ++k) {
    const auto& merge = dendro.merges[k];
    CHECK(sector_of_cluster[merge.a] == sector_of_cluster[merge.b]);
    sector_of_cluster.push_back(sector_of_cluster[merge.a]);
  }
}

TEST_CASE("noise level drives off-diagonal correlation down") {
  double previous = 1.0;
  for (const double sigma : {0.5, 1.0, 3.0}) {
    FactorModelSpec spec;
    spec.n_stocks = 20;
    spec.n_days = 300;
    spec.beta_min = 0.8;
    spec.beta_max = 1.0;
    spec.idiosyncratic_sigma = sigma;
    const double mean = mean_off_diagonal(correlation_matrix(generate(spec).stocks).values);
    CHECK(mean < previous);
    previous = mean;
  }
}

TEST_CASE("spec validation") {
  FactorModelSpec spec;
  spec.sectors = {{10, 0.5}};
  CHECK_THROWS_AS(spec.validate(), Error);  // sizes must sum to n_stocks
  spec.sectors = {};
  spec.idiosyncratic_sigma = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.idiosyncratic_sigma = 1.0;
  spec.beta_min = 1.0;
  spec.beta_max = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.beta_max = 1.0;
  spec.n_stocks = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("sector index preset") {
  const auto p = sector_index_preset(7);
  CHECK(p.indices.num_series() == 13);
  CHECK(p.indices.length() == 500);
  CHECK(p.indices.tickers.front() == "A_ALL");
  CHECK(std::set<std::size_t>(p.sector_of.begin(), p.sector_of.end()).size() == 3);
  CHECK(sector_index_preset(7).indices.returns == p.indices.returns);
  CHECK_NOTHROW(p.indices.validate());
}

TEST_CASE("prices skip weekends and round-trip to returns") {
  FactorModelSpec spec;
  spec.n_stocks = 2;
  spec.n_days = 20;
  const auto m = generate(spec);
  const auto prices = to_prices(m.stocks, *parse_date("2015-01-02"));  // a Friday
  CHECK(prices.num_dates() == 21);
  CHECK(format_date(prices.common_dates[1]) == "2015-01-05");
  for (const Date day : prices.common_dates) {
    const std::chrono::weekday wd{day};
    CHECK(wd != std::chrono::Saturday);
    CHECK(wd != std::chrono::Sunday);
  }
  const auto back = log_returns(prices);
  CHECK((back.returns - m.stocks.returns).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(prices.series[0].prices[0] == 100.0);
}
