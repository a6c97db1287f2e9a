#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/netgeo.hpp"

namespace mesonet {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
  const auto n = x.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

void center(Eigen::MatrixXd& x) {
  if (x.rows() == 0) return;
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
}

// Guttman transform for unit weights: X <- (1/N) B(X) X.
Eigen::MatrixXd guttman(const Eigen::MatrixXd& x, const Eigen::MatrixXd& target) {
  const auto n = x.rows();
  const Eigen::MatrixXd current = pairwise_distances(x);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || current(i, j) <= 0.0) continue;
      b(i, j) = -target(i, j) / current(i, j);
    }
    b(i, i) = -b.row(i).sum();
  }
  return b * x / static_cast<double>(n);
}

}  // namespace

double raw_stress(const Eigen::MatrixXd& coordinates, const Eigen::MatrixXd& distances) {
  const auto n = coordinates.rows();
  double stress = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = (coordinates.row(i) - coordinates.row(j)).norm() - distances(i, j);
      stress += r * r;
    }
  }
  return stress;
}

MdsEmbedding mds(const DistanceMatrix& d, const MdsOptions& options) {
  const std::size_t n = d.size();
  if (options.dims < 1 || options.dims >= n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("MDS needs 1 <= dims < N (dims={}, N={})", options.dims, n));
  }
  const auto ni = static_cast<Eigen::Index>(n);
  const auto dims = static_cast<Eigen::Index>(options.dims);

  const Eigen::MatrixXd sq = d.values.array().square().matrix();
  const Eigen::VectorXd row_mean = sq.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd b(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);
    }
  }
  b = 0.5 * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "eigensolver failed on the double-centered matrix");
  }
  MdsEmbedding out;
  out.tickers = d.tickers;
  out.eigen_spectrum = solver.eigenvalues().reverse();
  Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, out.eigen_spectrum.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  std::size_t positive = 0;
  for (Eigen::Index k = 0; k < ni; ++k) {
    const double lambda = out.eigen_spectrum(k);
    if (lambda > tol) ++positive;
    if (lambda < -tol) out.negative_mass += -lambda;
  }
  out.effective_dims = std::min<std::size_t>(positive, options.dims);
  if (out.effective_dims < options.dims) {
    out.warnings.push_back(fmt::format(
        "only {} positive eigenvalue(s); embedding reduced from {} to {} dimension(s)",
        positive, options.dims, out.effective_dims));
  }
  if (out.negative_mass > 0.0) {
    out.warnings.push_back(fmt::format(
        "distances are not Euclidean; negative eigenvalue mass {:.6g} truncated",
        out.negative_mass));
  }

  out.coordinates = Eigen::MatrixXd::Zero(ni, dims);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(out.effective_dims); ++k) {
    Eigen::VectorXd v = vectors.col(k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.coordinates.col(k) = v * std::sqrt(out.eigen_spectrum(k));
  }
  center(out.coordinates);
  out.stress = raw_stress(out.coordinates, d.values);

  if (options.refine && out.stress > 0.0) {
    out.refined = true;
    double previous = out.stress;
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
      Eigen::MatrixXd next = guttman(out.coordinates, d.values);
      center(next);
      const double stress = raw_stress(next, d.values);
      ++out.iterations;
      if (stress <= previous) {
        out.coordinates = std::move(next);
        out.stress = stress;
      }
      if (stress <= 0.0 || previous <= 0.0 ||
          (previous - stress) / previous < options.relative_tolerance) {
        break;
      }
      previous = stress;
    }
  }
  return out;
}

}  // namespace mesonet
