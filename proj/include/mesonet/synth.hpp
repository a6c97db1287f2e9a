#pragma once

// Seeded factor-model markets used as ground truth for the analysis code.
//
// r_i(t) = beta_i f(t) + gamma_s g_s(t) + sum_links lambda h_link(t) + sigma e_i(t)
//
// with independent standard Gaussian factors f (market), g_s (sector s),
// h (links shared by two sectors) and noise e.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mesonet/panel.hpp"

namespace mesonet {

struct SectorSpec {
  std::size_t size = 0;
  double loading = 0.0;
};

/// Extra factor loaded by every stock of sectors a and b.
struct SectorLink {
  std::size_t a = 0;
  std::size_t b = 0;
  double loading = 0.0;
};

struct FactorModelSpec {
  std::size_t n_stocks = 50;
  std::size_t n_days = 500;
  double beta_min = 0.0;
  double beta_max = 0.0;
  /// Empty means no sector structure; otherwise sizes sum to n_stocks.
  std::vector<SectorSpec> sectors;
  std::vector<SectorLink> links;
  double idiosyncratic_sigma = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

inline constexpr std::size_t kNoSector = std::numeric_limits<std::size_t>::max();

struct SyntheticMarket {
  ReturnPanel stocks;
  std::vector<double> market;            ///< f(t)
  std::vector<std::size_t> sector_of;    ///< kNoSector when unsectored
  std::vector<double> betas;

  /// Stock panel with the market factor appended as ticker `name`.
  ReturnPanel with_market(const std::string& name = "MKT") const;
};

/// Deterministic: the same spec yields a bit-identical market.
SyntheticMarket generate(const FactorModelSpec& spec);

/// Name of the generator recorded in run metadata.
std::string_view generator_description();

/// Standard normal draws from mt19937_64 via Box-Muller on 53-bit uniforms.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();  ///< in [0, 1)
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Equal-weight index over a set of stocks.
struct IndexDefinition {
  std::string name;
  std::size_t sector = kNoSector;
  std::vector<std::size_t> constituents;
};

struct IndexPanel {
  ReturnPanel indices;
  std::vector<std::size_t> sector_of;
};

IndexPanel build_indices(const SyntheticMarket& market,
                         const std::vector<IndexDefinition>& definitions);

/// Three sectors of 20 stocks, A and B sharing a link factor. Each sector
/// has one broad index over all 20 stocks and disjoint sub-indices of 5
/// (4 indices in A, 4 in B, 5 in C: 13 in total).
IndexPanel sector_index_preset(std::uint64_t seed, std::size_t n_days = 500);

/// Prices P(0) = start_price, P(t) = P(t-1) exp(r(t)), one business day
/// apart from `start` (weekends skipped).
PricePanel to_prices(const ReturnPanel& returns, Date start, double start_price = 100.0);

}  // namespace mesonet
