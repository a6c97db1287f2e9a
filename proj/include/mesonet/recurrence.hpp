#pragma once

// Delay embedding, recurrence plots and recurrence quantification.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mesonet {

enum class EpsMode {
  relative,  ///< threshold is a fraction of the maximum phase-space diameter
  absolute,
};

std::optional<EpsMode> parse_eps_mode(std::string_view text);
std::string_view eps_mode_name(EpsMode mode);

struct EmbeddingConfig {
  std::size_t dimension = 1;
  std::size_t delay = 1;
  double threshold = 0.1;
  EpsMode eps_mode = EpsMode::relative;
  std::size_t theiler_window = 0;

  void validate() const;
};

/// Delay vectors y(i) = [x(i), x(i+delay), ..., x(i+(m-1)delay)], stored
/// structure-of-arrays so the distance kernels can stream one axis at a time.
class Embedding {
 public:
  Embedding(std::size_t dims, std::size_t points, std::vector<double> coords);

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return points_; }
  double coord(std::size_t axis, std::size_t point) const {
    return coords_[axis * points_ + point];
  }
  const double* data() const { return coords_.data(); }
  std::vector<double> point(std::size_t i) const;

 private:
  std::size_t dims_;
  std::size_t points_;
  std::vector<double> coords_;
};

/// Throws Error(insufficient_data) when series.size() < (m-1)*delay + 1.
Embedding embed(std::span<const double> series, std::size_t dimension, std::size_t delay);

/// Full pairwise Euclidean distance matrix of the embedded points.
Eigen::MatrixXd distance_plot(const Embedding& points);

/// Largest pairwise distance between embedded points.
double phase_space_diameter(const Embedding& points);

/// Threshold in absolute units: relative thresholds scale by the diameter.
/// A zero-diameter (constant) embedding keeps the raw threshold.
double resolve_threshold(const Embedding& points, double eps, EpsMode mode);

/// Absolute threshold whose recurrence rate (including the line of identity)
/// is the smallest achievable value >= target_rr.
double calibrate_threshold(const Embedding& points, double target_rr);

class RecurrenceMatrix {
 public:
  RecurrenceMatrix(std::size_t n, std::vector<std::uint8_t> bits, EmbeddingConfig config);

  std::size_t size() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
  const EmbeddingConfig& config() const { return config_; }
  std::size_t count() const;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
  EmbeddingConfig config_;
};

/// R(i,j) = 1 iff |y(i) - y(j)| <= eps (eps absolute, > 0). The stored matrix
/// is the raw recurrence; `theiler` is recorded and applied by rqa().
RecurrenceMatrix recurrence_matrix(const Embedding& points, double eps,
                                   std::size_t theiler = 0);

struct RqaReport {
  double rr = 0.0;
  double det = 0.0;
  double mean_diag = 0.0;
  std::size_t lmax = 0;
  double entr = 0.0;
  double lam = 0.0;
  double tt = 0.0;
  std::size_t l_min = 2;
  std::size_t v_min = 2;
  /// Only set when no diagonal (vertical) line reaches l_min (v_min); the
  /// corresponding measures are then reported as 0.
  bool no_diagonal_lines = false;
  bool no_vertical_lines = false;
  /// histogram[l] = number of lines of length l, both triangles counted.
  std::vector<std::size_t> diagonal_histogram;
  std::vector<std::size_t> vertical_histogram;
};

/// Recurrence quantification. The line of identity is excluded from diagonal
/// statistics; entries with 0 < |i-j| <= theiler are excluded from both
/// diagonal and vertical statistics when a Theiler window is set.
RqaReport rqa(const RecurrenceMatrix& rm, std::size_t l_min = 2, std::size_t v_min = 2);

}  // namespace mesonet
