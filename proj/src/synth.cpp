#include "mesonet/synth.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mesonet/error.hpp"

namespace mesonet {

void FactorModelSpec::validate() const {
  if (n_stocks < 1 || n_days < 2) {
    throw Error(ErrorCode::invalid_argument, "synthetic market needs >= 1 stock and >= 2 days");
  }
  if (!(idiosyncratic_sigma > 0.0) || !std::isfinite(idiosyncratic_sigma)) {
    throw Error(ErrorCode::invalid_argument, "idiosyncratic sigma must be positive");
  }
  if (!std::isfinite(beta_min) || !std::isfinite(beta_max) || beta_min > beta_max) {
    throw Error(ErrorCode::invalid_argument, "beta range must be a finite interval");
  }
  if (!sectors.empty()) {
    std::size_t total = 0;
    for (const auto& s : sectors) {
      if (!std::isfinite(s.loading)) {
        throw Error(ErrorCode::invalid_argument, "sector loadings must be finite");
      }
      total += s.size;
    }
    if (total != n_stocks) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("sector sizes sum to {} but n_stocks is {}", total, n_stocks));
    }
  }
  for (const auto& l : links) {
    if (l.a >= sectors.size() || l.b >= sectors.size() || l.a == l.b ||
        !std::isfinite(l.loading)) {
      throw Error(ErrorCode::invalid_argument, "sector link must join two distinct sectors");
    }
  }
}

std::string_view generator_description() {
  return "mt19937_64 (std, seed via constructor), uniforms (x >> 11) * 2^-53, "
         "Box-Muller pairs cos first then sin";
}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ReturnPanel SyntheticMarket::with_market(const std::string& name) const {
  ReturnPanel out = stocks;
  out.tickers.push_back(name);
  out.returns.conservativeResize(out.returns.rows() + 1, Eigen::NoChange);
  for (std::size_t t = 0; t < market.size(); ++t) {
    out.returns(out.returns.rows() - 1, static_cast<Eigen::Index>(t)) = market[t];
  }
  return out;
}

SyntheticMarket generate(const FactorModelSpec& spec) {
  spec.validate();
  GaussianStream rng(spec.seed);
  const std::size_t n = spec.n_stocks;
  const std::size_t days = spec.n_days;

  SyntheticMarket m;
  m.sector_of.assign(n, kNoSector);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < spec.sectors.size(); ++s) {
    for (std::size_t k = 0; k < spec.sectors[s].size; ++k) m.sector_of[cursor++] = s;
  }
  m.betas.resize(n);
  for (auto& b : m.betas) b = spec.beta_min + (spec.beta_max - spec.beta_min) * rng.uniform();

  m.stocks.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(days));
  m.market.resize(days);
  std::vector<double> sector_factor(spec.sectors.size());
  std::vector<double> link_factor(spec.links.size());
  for (std::size_t t = 0; t < days; ++t) {
    m.market[t] = rng.next();
    for (auto& g : sector_factor) g = rng.next();
    for (auto& h : link_factor) h = rng.next();
    for (std::size_t i = 0; i < n; ++i) {
      double r = m.betas[i] * m.market[t];
      const std::size_t s = m.sector_of[i];
      if (s != kNoSector) {
        r += spec.sectors[s].loading * sector_factor[s];
        for (std::size_t l = 0; l < spec.links.size(); ++l) {
          if (spec.links[l].a == s || spec.links[l].b == s) {
            r += spec.links[l].loading * link_factor[l];
          }
        }
      }
      r += spec.idiosyncratic_sigma * rng.next();
      m.stocks.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = r;
    }
  }

  const Date start = *parse_date("2015-01-01");
  m.stocks.tickers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) m.stocks.tickers.push_back(fmt::format("S{:03d}", i));
  m.stocks.dates.resize(days);
  // Return dates match the price dates emitted by to_prices (first price is day 0).
  const PricePanel calendar = to_prices(m.stocks.select({0}), start);
  m.stocks.dates.assign(calendar.common_dates.begin() + 1, calendar.common_dates.end());
  return m;
}

IndexPanel build_indices(const SyntheticMarket& market,
                         const std::vector<IndexDefinition>& definitions) {
  IndexPanel out;
  const auto days = market.stocks.returns.cols();
  out.indices.dates = market.stocks.dates;
  out.indices.returns.resize(static_cast<Eigen::Index>(definitions.size()), days);
  for (std::size_t k = 0; k < definitions.size(); ++k) {
    const auto& def = definitions[k];
    if (def.constituents.empty()) {
      throw Error(ErrorCode::invalid_argument, fmt::format("index {} has no constituents",
                                                           def.name));
    }
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(days);
    for (const std::size_t i : def.constituents) {
      if (i >= market.stocks.num_series()) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("index {} references stock {} out of range", def.name, i));
      }
      sum += market.stocks.returns.row(static_cast<Eigen::Index>(i));
    }
    out.indices.returns.row(static_cast<Eigen::Index>(k)) =
        sum / static_cast<double>(def.constituents.size());
    out.indices.tickers.push_back(def.name);
    out.sector_of.push_back(def.sector);
  }
  return out;
}

IndexPanel sector_index_preset(std::uint64_t seed, std::size_t n_days) {
  FactorModelSpec spec;
  spec.n_stocks = 60;
  spec.n_days = n_days;
  spec.beta_min = 0.5;
  spec.beta_max = 1.0;
  spec.sectors = {{20, 0.8}, {20, 0.8}, {20, 0.8}};
  spec.links = {{0, 1, 0.5}};
  spec.idiosyncratic_sigma = 1.0;
  spec.seed = seed;
  const SyntheticMarket market = generate(spec);

  const char* names[] = {"A", "B", "C"};
  std::vector<IndexDefinition> defs;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t first = s * 20;
    IndexDefinition broad{fmt::format("{}_ALL", names[s]), s, {}};
    for (std::size_t i = 0; i < 20; ++i) broad.constituents.push_back(first + i);
    defs.push_back(broad);
    const std::size_t subs = s == 2 ? 4 : 3;
    for (std::size_t k = 0; k < subs; ++k) {
      IndexDefinition sub{fmt::format("{}_{}", names[s], k + 1), s, {}};
      for (std::size_t i = 0; i < 5; ++i) sub.constituents.push_back(first + k * 5 + i);
      defs.push_back(sub);
    }
  }
  return build_indices(market, defs);
}

PricePanel to_prices(const ReturnPanel& returns, Date start, double start_price) {
  PricePanel panel;
  const std::size_t days = returns.length() + 1;
  Date d = start;
  const auto is_weekend = [](Date day) {
    const std::chrono::weekday wd{day};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
  };
  while (is_weekend(d)) d += std::chrono::days{1};
  for (std::size_t t = 0; t < days; ++t) {
    panel.common_dates.push_back(d);
    do {
      d += std::chrono::days{1};
    } while (is_weekend(d));
  }
  for (std::size_t i = 0; i < returns.num_series(); ++i) {
    PriceSeries s;
    s.ticker = returns.tickers[i];
    s.dates = panel.common_dates;
    s.prices.resize(days);
    s.prices[0] = start_price;
    for (std::size_t t = 1; t < days; ++t) {
      s.prices[t] = s.prices[t - 1] *
                    std::exp(returns.returns(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(t - 1)));
    }
    panel.series.push_back(std::move(s));
  }
  return panel;
}

}  // namespace mesonet
