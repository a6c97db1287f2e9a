#pragma once

// Price ingestion, date alignment and return panels.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mesonet {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

/// One ticker's adjusted closing prices. Dates strictly increase, prices > 0.
struct PriceSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> prices;

  std::size_t size() const { return prices.size(); }
  /// Throws Error(invalid_argument) when the invariants do not hold.
  void validate() const;
};

/// Series sharing one date index.
struct PricePanel {
  std::vector<PriceSeries> series;
  std::vector<Date> common_dates;

  std::size_t num_series() const { return series.size(); }
  std::size_t num_dates() const { return common_dates.size(); }
};

/// Log returns, one row per ticker. Column t is the return ending on dates[t].
struct ReturnPanel {
  std::vector<std::string> tickers;
  Eigen::MatrixXd returns;
  std::vector<Date> dates;

  std::size_t num_series() const { return static_cast<std::size_t>(returns.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(returns.cols()); }

  /// Row index of a ticker; throws Error(unknown_ticker).
  std::size_t index_of(std::string_view ticker) const;
  /// Copy restricted to the given rows, order preserved.
  ReturnPanel select(const std::vector<std::size_t>& rows) const;
  void validate() const;
};

enum class Alignment { intersect, forward_fill };

std::optional<Alignment> parse_alignment(std::string_view text);
std::string_view alignment_name(Alignment alignment);

/// Reads one price CSV in long (date,ticker,adj_close) or wide
/// (date,<ticker>...) layout. Empty wide cells are missing observations.
std::vector<PriceSeries> read_price_csv(std::istream& in, const std::string& source);
std::vector<PriceSeries> read_price_file(const std::filesystem::path& path);

/// Aligns series onto a shared date index. Series order follows the input.
///
/// `intersect` keeps dates present in every series. `forward_fill` keeps the
/// union of dates from the first date on which every series has a price and
/// carries the last observed price across gaps.
PricePanel align(std::vector<PriceSeries> series, Alignment alignment);

PricePanel load_panel(const std::vector<std::filesystem::path>& files, Alignment alignment);

ReturnPanel log_returns(const PricePanel& panel);

enum class Normalization {
  max_denominator,  ///< (P - P_min) / P_max
  range,            ///< (P - P_min) / (P_max - P_min)
  none,
};

std::optional<Normalization> parse_normalization(std::string_view text);
std::string_view normalization_name(Normalization mode);

std::vector<double> normalize_levels(const PriceSeries& series,
                                     Normalization mode = Normalization::max_denominator);

/// Contiguous block of `length` return observations beginning on `start`.
ReturnPanel window(const ReturnPanel& panel, Date start, std::size_t length);
/// The trailing `length` observations.
ReturnPanel trailing_window(const ReturnPanel& panel, std::size_t length);

/// Optional start date and length. A missing length runs to the end of the
/// panel; a missing start takes the trailing `length` days.
struct WindowSpec {
  std::optional<Date> start;
  std::optional<std::size_t> length;
};

ReturnPanel apply_window(const ReturnPanel& panel, const WindowSpec& spec);

}  // namespace mesonet
