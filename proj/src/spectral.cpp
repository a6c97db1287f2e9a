#include "mesonet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/parallel.hpp"
#include "mesonet/simd/kernels.hpp"

namespace mesonet {

CorrelationMatrix correlation_matrix(const ReturnPanel& panel) {
  const std::size_t n = panel.num_series();
  const std::size_t t_len = panel.length();
  if (t_len < 2) {
    throw Error(ErrorCode::insufficient_data, "correlation needs a window of at least 2 days");
  }
  if (n == 0) throw Error(ErrorCode::insufficient_data, "correlation needs at least 1 series");

  // Standardized samples laid out time-major (z[t * n + i]) for the kernel.
  std::vector<double> z(t_len * n);
  const double inv_t = 1.0 / static_cast<double>(t_len);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = panel.returns.row(static_cast<Eigen::Index>(i));
    const double mean = row.sum() * inv_t;
    double var = 0.0;
    double scale = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) {
      const double d = row(static_cast<Eigen::Index>(t)) - mean;
      var += d * d;
      scale = std::max(scale, std::abs(row(static_cast<Eigen::Index>(t))));
    }
    var *= inv_t;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-14 * std::max(scale, 1e-300))) {
      throw Error(ErrorCode::degenerate,
                  fmt::format("series {} has zero variance over the window",
                              panel.tickers[i]));
    }
    for (std::size_t t = 0; t < t_len; ++t) {
      z[t * n + i] = (row(static_cast<Eigen::Index>(t)) - mean) / sd;
    }
  }

  CorrelationMatrix c;
  c.tickers = panel.tickers;
  c.window_length = t_len;
  c.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> upper(n * n, 0.0);
  parallel_for_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      simd::cross_products(z.data(), n, t_len, i, i, n, upper.data() + i * n + i);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::clamp(upper[i * n + j] * inv_t, -1.0, 1.0);
      c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      c.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return c;
}

MpBounds mp_bounds_for_ratio(double q) {
  if (!(q > 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("Marchenko-Pastur bounds need Q = T/N > 1, got {}", q));
  }
  const double r = 1.0 / std::sqrt(q);
  MpBounds b;
  b.q = q;
  b.lambda_min = (1.0 - r) * (1.0 - r);
  b.lambda_max = (1.0 + r) * (1.0 + r);
  return b;
}

MpBounds mp_bounds(std::size_t n, std::size_t t) {
  if (n == 0 || t <= n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("Marchenko-Pastur bounds need T > N (T={}, N={})", t, n));
  }
  return mp_bounds_for_ratio(static_cast<double>(t) / static_cast<double>(n));
}

double mp_density(double lambda, const MpBounds& b) {
  if (!(lambda > b.lambda_min) || !(lambda < b.lambda_max)) return 0.0;
  return b.q / (2.0 * std::numbers::pi) *
         std::sqrt((b.lambda_max - lambda) * (lambda - b.lambda_min)) / lambda;
}

double mp_cdf(double lambda, const MpBounds& b) {
  if (lambda <= b.lambda_min) return 0.0;
  if (lambda >= b.lambda_max) return 1.0;
  // lambda = c - r cos(theta) turns the square-root endpoints into a smooth
  // integrand: F = Q/(2 pi) * int_0^theta r^2 sin^2 / (c - r cos).
  const double center = 0.5 * (b.lambda_max + b.lambda_min);
  const double radius = 0.5 * (b.lambda_max - b.lambda_min);
  const double upper = std::acos(std::clamp((center - lambda) / radius, -1.0, 1.0));
  const auto f = [&](double theta) {
    const double s = std::sin(theta);
    return radius * radius * s * s / (center - radius * std::cos(theta));
  };
  constexpr int panels = 2048;  // composite Simpson, even count
  const double h = upper / panels;
  double acc = f(0.0) + f(upper);
  for (int k = 1; k < panels; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f(k * h);
  const double value = b.q / (2.0 * std::numbers::pi) * acc * h / 3.0;
  return std::clamp(value, 0.0, 1.0);
}

ModeDecomposition decompose(const CorrelationMatrix& c, std::size_t n_group) {
  const std::size_t n = c.size();
  if (n == 0) throw Error(ErrorCode::insufficient_data, "empty correlation matrix");
  if (n_group > n - 1) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("n_group must be <= N-1 = {}, got {}", n - 1, n_group));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.values);
  if (solver.info() != Eigen::Success) {
    // Residual of whatever the solver produced, for diagnostics.
    const Eigen::MatrixXd residual = c.values * solver.eigenvectors() -
                                     solver.eigenvectors() * solver.eigenvalues().asDiagonal();
    throw Error(ErrorCode::numerical,
                fmt::format("symmetric eigensolver did not converge (residual norm {:.3e})",
                            residual.norm()));
  }

  // Eigen returns eigenvalues ascending.
  ModeDecomposition d;
  d.n_group = n_group;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index k = 0; k < d.eigenvectors.cols(); ++k) {
    Eigen::Index arg = 0;
    d.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (d.eigenvectors(arg, k) < 0.0) d.eigenvectors.col(k) *= -1.0;
  }

  const auto n_idx = static_cast<Eigen::Index>(n);
  d.market = Eigen::MatrixXd::Zero(n_idx, n_idx);
  d.group = Eigen::MatrixXd::Zero(n_idx, n_idx);
  d.random = Eigen::MatrixXd::Zero(n_idx, n_idx);
  for (Eigen::Index k = 0; k < n_idx; ++k) {
    const Eigen::VectorXd a = d.eigenvectors.col(k);
    const Eigen::MatrixXd term = d.eigenvalues(k) * (a * a.transpose());
    if (k == 0) {
      d.market += term;
    } else if (static_cast<std::size_t>(k) <= n_group) {
      d.group += term;
    } else {
      d.random += term;
    }
  }
  return d;
}

double ipr(const Eigen::VectorXd& v) {
  return v.array().square().square().sum();
}

std::vector<double> ipr(const ModeDecomposition& d) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(d.eigenvectors.cols()));
  for (Eigen::Index k = 0; k < d.eigenvectors.cols(); ++k) {
    out.push_back(ipr(Eigen::VectorXd(d.eigenvectors.col(k))));
  }
  return out;
}

Histogram make_histogram(const std::vector<double>& values, std::size_t bins, double lo,
                         double hi) {
  if (bins < 1) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");
  if (!(hi > lo)) throw Error(ErrorCode::invalid_argument, "histogram range is empty");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  h.density.assign(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  double sum = 0.0;
  for (const double v : values) {
    if (v < lo || v > hi) continue;
    auto k = static_cast<std::size_t>((v - lo) / width);
    if (k >= bins) k = bins - 1;
    ++h.counts[k];
    ++h.samples;
    sum += v;
  }
  if (h.samples > 0) {
    h.mean = sum / static_cast<double>(h.samples);
    for (std::size_t k = 0; k < bins; ++k) {
      h.density[k] = static_cast<double>(h.counts[k]) / (static_cast<double>(h.samples) * width);
    }
  }
  return h;
}

Histogram coefficient_distribution(const CorrelationMatrix& c, std::size_t bins) {
  std::vector<double> values;
  const auto n = static_cast<Eigen::Index>(c.size());
  values.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) values.push_back(c.values(i, j));
  }
  return make_histogram(values, bins, -1.0, 1.0);
}

}  // namespace mesonet
