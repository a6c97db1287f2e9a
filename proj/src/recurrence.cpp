#include "mesonet/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/parallel.hpp"
#include "mesonet/simd/kernels.hpp"

namespace mesonet {

std::optional<EpsMode> parse_eps_mode(std::string_view text) {
  if (text == "relative") return EpsMode::relative;
  if (text == "absolute") return EpsMode::absolute;
  return std::nullopt;
}

std::string_view eps_mode_name(EpsMode mode) {
  return mode == EpsMode::relative ? "relative" : "absolute";
}

void EmbeddingConfig::validate() const {
  if (dimension < 1) throw Error(ErrorCode::invalid_argument, "embedding dimension must be >= 1");
  if (delay < 1) throw Error(ErrorCode::invalid_argument, "delay must be >= 1");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::invalid_argument, "threshold eps must be a positive finite value");
  }
}

Embedding::Embedding(std::size_t dims, std::size_t points, std::vector<double> coords)
    : dims_(dims), points_(points), coords_(std::move(coords)) {
  if (coords_.size() != dims_ * points_) {
    throw Error(ErrorCode::invalid_argument, "embedding coordinate buffer has the wrong size");
  }
}

std::vector<double> Embedding::point(std::size_t i) const {
  std::vector<double> out(dims_);
  for (std::size_t k = 0; k < dims_; ++k) out[k] = coord(k, i);
  return out;
}

Embedding embed(std::span<const double> series, std::size_t dimension, std::size_t delay) {
  if (dimension < 1 || delay < 1) {
    throw Error(ErrorCode::invalid_argument, "embedding needs dimension >= 1 and delay >= 1");
  }
  const std::size_t span = (dimension - 1) * delay;
  if (series.size() < span + 1) {
    throw Error(ErrorCode::insufficient_data,
                fmt::format("series of length {} too short for m={}, delay={} (need {})",
                            series.size(), dimension, delay, span + 1));
  }
  const std::size_t n = series.size() - span;
  std::vector<double> coords(dimension * n);
  for (std::size_t k = 0; k < dimension; ++k) {
    std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(k * delay), n,
                coords.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return Embedding(dimension, n, std::move(coords));
}

namespace {

// Fills rows [begin, end) of an n x n buffer with pairwise distances.
void distance_rows(const Embedding& points, std::size_t begin, std::size_t end,
                   double* rows) {
  const std::size_t n = points.size();
  for (std::size_t i = begin; i < end; ++i) {
    double* row = rows + (i - begin) * n;
    simd::squared_distances(points.data(), n, points.dims(), i, 0, n, row);
    for (std::size_t j = 0; j < n; ++j) row[j] = std::sqrt(row[j]);
  }
}

}  // namespace

Eigen::MatrixXd distance_plot(const Embedding& points) {
  const std::size_t n = points.size();
  // Row-major buffer, then copy into Eigen's column-major layout; the matrix
  // is symmetric so the transpose is free.
  std::vector<double> buffer(n * n);
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end) {
    distance_rows(points, begin, end, buffer.data() + begin * n);
  });
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::copy(buffer.begin(), buffer.end(), out.data());
  return out;
}

double phase_space_diameter(const Embedding& points) {
  const std::size_t n = points.size();
  std::vector<double> row_max(n, 0.0);
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(n);
    for (std::size_t i = begin; i < end; ++i) {
      simd::squared_distances(points.data(), n, points.dims(), i, i, n, row.data());
      row_max[i] = *std::max_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n - i));
    }
  });
  return std::sqrt(*std::max_element(row_max.begin(), row_max.end()));
}

double resolve_threshold(const Embedding& points, double eps, EpsMode mode) {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "threshold eps must be positive");
  if (mode == EpsMode::absolute) return eps;
  const double diameter = phase_space_diameter(points);
  return diameter > 0.0 ? eps * diameter : eps;
}

double calibrate_threshold(const Embedding& points, double target_rr) {
  if (!(target_rr > 0.0) || target_rr > 1.0) {
    throw Error(ErrorCode::invalid_argument, "target recurrence rate must lie in (0, 1]");
  }
  const std::size_t n = points.size();
  if (n < 2) return 1.0;
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  std::vector<double> row(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    simd::squared_distances(points.data(), n, points.dims(), i, i + 1, n, row.data());
    for (std::size_t j = 0; j < n - i - 1; ++j) upper.push_back(std::sqrt(row[j]));
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double needed = std::ceil((target_rr * nn - static_cast<double>(n)) / 2.0);
  if (needed <= 0.0) {
    const double smallest = *std::min_element(upper.begin(), upper.end());
    return smallest > 0.0 ? smallest / 2.0 : std::numeric_limits<double>::min();
  }
  const std::size_t k = std::min(upper.size(), static_cast<std::size_t>(needed));
  std::nth_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   upper.end());
  const double eps = upper[k - 1];
  return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

RecurrenceMatrix::RecurrenceMatrix(std::size_t n, std::vector<std::uint8_t> bits,
                                   EmbeddingConfig config)
    : n_(n), bits_(std::move(bits)), config_(config) {
  if (bits_.size() != n_ * n_) {
    throw Error(ErrorCode::invalid_argument, "recurrence bit buffer has the wrong size");
  }
}

std::size_t RecurrenceMatrix::count() const {
  std::size_t total = 0;
  for (const auto b : bits_) total += b;
  return total;
}

RecurrenceMatrix recurrence_matrix(const Embedding& points, double eps, std::size_t theiler) {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "threshold eps must be positive");
  const std::size_t n = points.size();
  std::vector<std::uint8_t> bits(n * n);
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(n);
    for (std::size_t i = begin; i < end; ++i) {
      simd::squared_distances(points.data(), n, points.dims(), i, 0, n, row.data());
      for (std::size_t j = 0; j < n; ++j) {
        bits[i * n + j] = std::sqrt(row[j]) <= eps ? 1 : 0;
      }
    }
  });
  EmbeddingConfig config;
  config.dimension = points.dims();
  config.threshold = eps;
  config.eps_mode = EpsMode::absolute;
  config.theiler_window = theiler;
  return RecurrenceMatrix(n, std::move(bits), config);
}

namespace {

void record(std::vector<std::size_t>& histogram, std::size_t length, std::size_t weight) {
  if (length == 0) return;
  if (histogram.size() <= length) histogram.resize(length + 1, 0);
  histogram[length] += weight;
}

struct LineSummary {
  double points_on_lines = 0.0;  // sum over l >= min of l * P(l)
  double line_count = 0.0;       // sum over l >= min of P(l)
  std::size_t longest = 0;
  double entropy = 0.0;
};

LineSummary summarize(const std::vector<std::size_t>& histogram, std::size_t min_length) {
  LineSummary s;
  for (std::size_t l = min_length; l < histogram.size(); ++l) {
    if (histogram[l] == 0) continue;
    s.points_on_lines += static_cast<double>(l) * static_cast<double>(histogram[l]);
    s.line_count += static_cast<double>(histogram[l]);
    s.longest = l;
  }
  if (s.line_count > 0.0) {
    for (std::size_t l = min_length; l < histogram.size(); ++l) {
      if (histogram[l] == 0) continue;
      const double p = static_cast<double>(histogram[l]) / s.line_count;
      s.entropy -= p * std::log(p);
    }
    if (s.entropy <= 0.0) s.entropy = 0.0;
  }
  return s;
}

}  // namespace

RqaReport rqa(const RecurrenceMatrix& rm, std::size_t l_min, std::size_t v_min) {
  if (l_min < 2 || v_min < 2) {
    throw Error(ErrorCode::invalid_argument, "l_min and v_min must be >= 2");
  }
  const std::size_t n = rm.size();
  const std::size_t theiler = rm.config().theiler_window;
  RqaReport report;
  report.l_min = l_min;
  report.v_min = v_min;
  if (n == 0) return report;

  const double total = static_cast<double>(rm.count());
  report.rr = total / (static_cast<double>(n) * static_cast<double>(n));

  // Diagonals strictly above the excluded band; the matrix is symmetric so
  // each upper line has a mirror image below the line of identity.
  double diagonal_points = 0.0;
  for (std::size_t offset = theiler + 1; offset < n; ++offset) {
    std::size_t run = 0;
    for (std::size_t i = 0; i + offset < n; ++i) {
      if (rm.at(i, i + offset)) {
        ++run;
        diagonal_points += 2.0;
      } else {
        record(report.diagonal_histogram, run, 2);
        run = 0;
      }
    }
    record(report.diagonal_histogram, run, 2);
  }

  // Vertical lines run down each column; a Theiler band breaks them.
  double vertical_points = 0.0;
  const auto excluded = [theiler](std::size_t i, std::size_t j) {
    if (theiler == 0) return false;
    const std::size_t gap = i > j ? i - j : j - i;
    return gap <= theiler;
  };
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!excluded(i, j) && rm.at(i, j)) {
        ++run;
        vertical_points += 1.0;
      } else {
        record(report.vertical_histogram, run, 1);
        run = 0;
      }
    }
    record(report.vertical_histogram, run, 1);
  }

  const LineSummary diag = summarize(report.diagonal_histogram, l_min);
  if (diag.line_count > 0.0) {
    report.det = diag.points_on_lines / diagonal_points;
    report.mean_diag = diag.points_on_lines / diag.line_count;
    report.lmax = diag.longest;
    report.entr = diag.entropy;
  } else {
    report.no_diagonal_lines = true;
  }

  const LineSummary vert = summarize(report.vertical_histogram, v_min);
  if (vert.line_count > 0.0) {
    report.lam = vert.points_on_lines / vertical_points;
    report.tt = vert.points_on_lines / vert.line_count;
  } else {
    report.no_vertical_lines = true;
  }
  return report;
}

}  // namespace mesonet
