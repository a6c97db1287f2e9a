#include "mesonet/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "mesonet/error.hpp"

namespace mesonet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double parse_price(std::string_view text, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::parse, fmt::format("{}: unparseable price '{}'", where, text));
  }
  if (value <= 0.0) {
    throw Error(ErrorCode::parse, fmt::format("{}: non-positive price {}", where, text));
  }
  return value;
}

Date require_date(std::string_view text, const std::string& where) {
  const auto date = parse_date(text);
  if (!date) {
    throw Error(ErrorCode::parse, fmt::format("{}: unparseable date '{}'", where, text));
  }
  return *date;
}

struct Observation {
  Date date;
  double price;
};

PriceSeries build_series(const std::string& ticker, std::vector<Observation> obs,
                         const std::string& source) {
  std::stable_sort(obs.begin(), obs.end(),
                   [](const Observation& a, const Observation& b) { return a.date < b.date; });
  PriceSeries series;
  series.ticker = ticker;
  series.dates.reserve(obs.size());
  series.prices.reserve(obs.size());
  for (const auto& o : obs) {
    if (!series.dates.empty() && series.dates.back() == o.date) {
      throw Error(ErrorCode::parse, fmt::format("{}: duplicate date {} for ticker {}", source,
                                                format_date(o.date), ticker));
    }
    series.dates.push_back(o.date);
    series.prices.push_back(o.price);
  }
  return series;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

void PriceSeries::validate() const {
  if (dates.size() != prices.size()) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("series {}: {} dates but {} prices", ticker, dates.size(),
                            prices.size()));
  }
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("series {}: non-positive price on {}", ticker,
                              format_date(dates[i])));
    }
    if (i > 0 && !(dates[i - 1] < dates[i])) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("series {}: dates not strictly increasing at {}", ticker,
                              format_date(dates[i])));
    }
  }
}

std::size_t ReturnPanel::index_of(std::string_view ticker) const {
  const auto it = std::find(tickers.begin(), tickers.end(), ticker);
  if (it == tickers.end()) {
    throw Error(ErrorCode::unknown_ticker, fmt::format("ticker '{}' not in panel", ticker));
  }
  return static_cast<std::size_t>(it - tickers.begin());
}

ReturnPanel ReturnPanel::select(const std::vector<std::size_t>& rows) const {
  ReturnPanel out;
  out.dates = dates;
  out.returns.resize(static_cast<Eigen::Index>(rows.size()), returns.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.tickers.push_back(tickers.at(rows[r]));
    out.returns.row(static_cast<Eigen::Index>(r)) =
        returns.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

void ReturnPanel::validate() const {
  if (tickers.size() != num_series() || dates.size() != length()) {
    throw Error(ErrorCode::invalid_argument, "return panel shape mismatch");
  }
  if (!returns.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "return panel contains non-finite values");
  }
}

std::optional<Alignment> parse_alignment(std::string_view text) {
  if (text == "intersect") return Alignment::intersect;
  if (text == "forward_fill" || text == "forward-fill") return Alignment::forward_fill;
  return std::nullopt;
}

std::string_view alignment_name(Alignment alignment) {
  return alignment == Alignment::intersect ? "intersect" : "forward_fill";
}

std::vector<PriceSeries> read_price_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::vector<std::string_view> header;
  std::string header_line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) {
    throw Error(ErrorCode::parse, fmt::format("{}: empty file", source));
  }
  header = split_fields(header_line);
  if (header.size() < 2 || lower(header[0]) != "date") {
    throw Error(ErrorCode::parse,
                fmt::format("{}: header must start with 'date' and name at least one column",
                            source));
  }

  const bool long_format = header.size() == 3 && lower(header[1]) == "ticker" &&
                           (lower(header[2]) == "adj_close" || lower(header[2]) == "price");

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Observation>> by_ticker;
  if (!long_format) {
    for (std::size_t c = 1; c < header.size(); ++c) {
      std::string ticker(header[c]);
      if (ticker.empty()) {
        throw Error(ErrorCode::parse, fmt::format("{}: empty ticker in header", source));
      }
      if (by_ticker.count(ticker)) {
        throw Error(ErrorCode::parse, fmt::format("{}: duplicate ticker {}", source, ticker));
      }
      order.push_back(ticker);
      by_ticker[ticker];
    }
  }

  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::parse, fmt::format("{}: expected {} fields, found {}", where,
                                                header.size(), fields.size()));
    }
    const Date date = require_date(fields[0], where);
    ++rows;
    if (long_format) {
      std::string ticker(fields[1]);
      if (ticker.empty()) throw Error(ErrorCode::parse, fmt::format("{}: empty ticker", where));
      auto [it, inserted] = by_ticker.try_emplace(ticker);
      if (inserted) order.push_back(ticker);
      it->second.push_back({date, parse_price(fields[2], where)});
    } else {
      for (std::size_t c = 1; c < fields.size(); ++c) {
        if (fields[c].empty()) continue;
        by_ticker[order[c - 1]].push_back({date, parse_price(fields[c], where)});
      }
    }
  }
  if (rows == 0) {
    throw Error(ErrorCode::parse, fmt::format("{}: empty file (header only)", source));
  }

  std::vector<PriceSeries> out;
  out.reserve(order.size());
  for (const auto& ticker : order) {
    auto series = build_series(ticker, std::move(by_ticker[ticker]), source);
    if (series.size() == 0) {
      throw Error(ErrorCode::parse, fmt::format("{}: ticker {} has no prices", source, ticker));
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<PriceSeries> read_price_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, fmt::format("cannot open {}", path.string()));
  }
  return read_price_csv(in, path.string());
}

PricePanel align(std::vector<PriceSeries> series, Alignment alignment) {
  if (series.size() < 2) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("panel needs at least 2 series, got {}", series.size()));
  }
  std::set<std::string> seen;
  for (const auto& s : series) {
    s.validate();
    if (!seen.insert(s.ticker).second) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("ticker {} appears in more than one input", s.ticker));
    }
  }

  PricePanel panel;
  if (alignment == Alignment::intersect) {
    std::vector<Date> common = series.front().dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
      std::vector<Date> next;
      std::set_intersection(common.begin(), common.end(), series[k].dates.begin(),
                            series[k].dates.end(), std::back_inserter(next));
      common = std::move(next);
    }
    panel.common_dates = std::move(common);
    for (auto& s : series) {
      PriceSeries aligned;
      aligned.ticker = s.ticker;
      aligned.dates = panel.common_dates;
      aligned.prices.reserve(panel.common_dates.size());
      std::size_t cursor = 0;
      for (const Date d : panel.common_dates) {
        while (s.dates[cursor] < d) ++cursor;
        aligned.prices.push_back(s.prices[cursor]);
      }
      panel.series.push_back(std::move(aligned));
    }
  } else {
    std::set<Date> all;
    Date first_full = series.front().dates.front();
    for (const auto& s : series) {
      all.insert(s.dates.begin(), s.dates.end());
      first_full = std::max(first_full, s.dates.front());
    }
    for (const Date d : all) {
      if (d >= first_full) panel.common_dates.push_back(d);
    }
    for (auto& s : series) {
      PriceSeries aligned;
      aligned.ticker = s.ticker;
      aligned.dates = panel.common_dates;
      aligned.prices.reserve(panel.common_dates.size());
      std::size_t cursor = 0;
      double last = 0.0;
      for (const Date d : panel.common_dates) {
        while (cursor < s.dates.size() && s.dates[cursor] <= d) {
          last = s.prices[cursor];
          ++cursor;
        }
        aligned.prices.push_back(last);
      }
      panel.series.push_back(std::move(aligned));
    }
  }

  if (panel.common_dates.size() < 2) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("fewer than 2 common dates after {} alignment ({} found)",
                            alignment_name(alignment), panel.common_dates.size()));
  }
  return panel;
}

PricePanel load_panel(const std::vector<std::filesystem::path>& files, Alignment alignment) {
  std::vector<PriceSeries> all;
  for (const auto& file : files) {
    auto series = read_price_file(file);
    std::move(series.begin(), series.end(), std::back_inserter(all));
  }
  return align(std::move(all), alignment);
}

ReturnPanel log_returns(const PricePanel& panel) {
  const std::size_t n = panel.num_series();
  const std::size_t t_len = panel.num_dates();
  if (n == 0 || t_len < 2) {
    throw Error(ErrorCode::insufficient_data, "log returns need at least 2 dates");
  }
  ReturnPanel out;
  out.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t_len - 1));
  out.dates.assign(panel.common_dates.begin() + 1, panel.common_dates.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prices = panel.series[i].prices;
    out.tickers.push_back(panel.series[i].ticker);
    for (std::size_t t = 0; t + 1 < t_len; ++t) {
      out.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          std::log(prices[t + 1]) - std::log(prices[t]);
    }
  }
  return out;
}

std::optional<Normalization> parse_normalization(std::string_view text) {
  if (text == "max") return Normalization::max_denominator;
  if (text == "range") return Normalization::range;
  if (text == "none") return Normalization::none;
  return std::nullopt;
}

std::string_view normalization_name(Normalization mode) {
  switch (mode) {
    case Normalization::max_denominator: return "max";
    case Normalization::range: return "range";
    case Normalization::none: return "none";
  }
  return "max";
}

std::vector<double> normalize_levels(const PriceSeries& series, Normalization mode) {
  if (series.prices.empty()) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("series {} is empty", series.ticker));
  }
  const auto [lo_it, hi_it] = std::minmax_element(series.prices.begin(), series.prices.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(lo > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("series {} has non-positive prices", series.ticker));
  }
  std::vector<double> out(series.prices.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double p = series.prices[t];
    switch (mode) {
      case Normalization::max_denominator:
        out[t] = (p - lo) / hi;
        break;
      case Normalization::range:
        out[t] = hi > lo ? (p - lo) / (hi - lo) : 0.0;
        break;
      case Normalization::none:
        out[t] = p;
        break;
    }
  }
  return out;
}

ReturnPanel window(const ReturnPanel& panel, Date start, std::size_t length) {
  const auto it = std::find(panel.dates.begin(), panel.dates.end(), start);
  if (it == panel.dates.end()) {
    throw Error(ErrorCode::window_out_of_range,
                fmt::format("window start {} is not a return date in the panel",
                            format_date(start)));
  }
  const std::size_t offset = static_cast<std::size_t>(it - panel.dates.begin());
  if (length == 0 || offset + length > panel.length()) {
    throw Error(ErrorCode::window_out_of_range,
                fmt::format("window of {} days from {} exceeds the {} available", length,
                            format_date(start), panel.length() - offset));
  }
  ReturnPanel out;
  out.tickers = panel.tickers;
  out.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(offset),
                   panel.dates.begin() + static_cast<std::ptrdiff_t>(offset + length));
  out.returns = panel.returns.middleCols(static_cast<Eigen::Index>(offset),
                                         static_cast<Eigen::Index>(length));
  return out;
}

ReturnPanel trailing_window(const ReturnPanel& panel, std::size_t length) {
  if (length == 0 || length > panel.length()) {
    throw Error(ErrorCode::window_out_of_range,
                fmt::format("window of {} days exceeds the {} available", length,
                            panel.length()));
  }
  return window(panel, panel.dates[panel.length() - length], length);
}

ReturnPanel apply_window(const ReturnPanel& panel, const WindowSpec& spec) {
  if (spec.start) {
    const auto it = std::find(panel.dates.begin(), panel.dates.end(), *spec.start);
    if (it == panel.dates.end()) {
      throw Error(ErrorCode::window_out_of_range,
                  fmt::format("window start {} is not a return date in the panel",
                              format_date(*spec.start)));
    }
    const auto remaining = static_cast<std::size_t>(panel.dates.end() - it);
    return window(panel, *spec.start, spec.length.value_or(remaining));
  }
  if (spec.length) return trailing_window(panel, *spec.length);
  return panel;
}

}  // namespace mesonet
