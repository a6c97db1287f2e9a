#pragma once

// Correlation-network geometry: the distance transform, multidimensional
// scaling, Ward dendrograms and minimum spanning trees.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mesonet/panel.hpp"
#include "mesonet/spectral.hpp"

namespace mesonet {

/// Symmetric, zero diagonal, entries in [0, 2] when built from correlations.
struct DistanceMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  /// Checks shape, symmetry, zero diagonal and finiteness.
  void validate() const;
};

/// d_ij = sqrt(2 (1 - C_ij)).
DistanceMatrix to_distance(const CorrelationMatrix& c);

// --- multidimensional scaling ----------------------------------------------

struct MdsEmbedding {
  std::vector<std::string> tickers;
  /// N x dims, centroid at the origin. Columns past effective_dims are zero.
  Eigen::MatrixXd coordinates;
  std::size_t effective_dims = 0;
  /// Raw stress sum_{i<j} (|x_i - x_j| - d_ij)^2 of the final configuration.
  double stress = 0.0;
  /// Eigenvalues of -1/2 J D^2 J, descending.
  Eigen::VectorXd eigen_spectrum;
  /// Sum of |negative eigenvalues| dropped from the double-centered matrix.
  double negative_mass = 0.0;
  bool refined = false;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
};

struct MdsOptions {
  std::size_t dims = 2;
  bool refine = false;
  std::size_t max_iterations = 500;
  double relative_tolerance = 1e-9;
};

/// Classical (Torgerson) scaling, optionally refined by stress majorization.
MdsEmbedding mds(const DistanceMatrix& d, const MdsOptions& options = {});

/// Raw stress of a configuration (rows are points).
double raw_stress(const Eigen::MatrixXd& coordinates, const Eigen::MatrixXd& distances);

// --- Ward dendrogram -------------------------------------------------------

/// Leaves are clusters 0..N-1; the k-th merge creates cluster N+k.
struct Merge {
  std::size_t a = 0;  ///< smaller cluster id
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<std::string> tickers;
  std::vector<Merge> merges;
  std::vector<std::size_t> leaf_order;

  std::size_t leaves() const { return merges.size() + 1; }
  /// Flat labels 0..k-1 after undoing the last k-1 merges. Labels are
  /// numbered by the lowest leaf index in each cluster.
  std::vector<std::size_t> cut(std::size_t clusters) const;
};

/// Agglomerative clustering with the Lance-Williams Ward update applied to
/// d_ij directly. Ties go to the lexicographically smallest (id, id) pair.
Dendrogram ward_dendrogram(const DistanceMatrix& d);

// --- minimum spanning tree -------------------------------------------------

enum class MstAlgorithm { kruskal, prim };

std::optional<MstAlgorithm> parse_mst_algorithm(std::string_view text);
std::string_view mst_algorithm_name(MstAlgorithm algorithm);

struct Edge {
  std::size_t i = 0;  ///< i < j
  std::size_t j = 0;
  double weight = 0.0;
};

struct SpanningTree {
  std::vector<std::string> tickers;
  std::size_t nodes = 0;
  /// Sorted by (i, j); total_weight sums them in that order.
  std::vector<Edge> edges;
  double total_weight = 0.0;

  /// Adjacency lists, neighbours ascending.
  std::vector<std::vector<std::size_t>> adjacency() const;
  /// Hop counts from `source` to every node.
  std::vector<std::size_t> hops_from(std::size_t source) const;
};

/// Both algorithms order edges by (weight, i, j), so they return the same
/// unique tree.
SpanningTree mst(const DistanceMatrix& d, MstAlgorithm algorithm = MstAlgorithm::kruskal);

/// Sum of edge weights in (i, j) order.
double tree_weight(std::vector<Edge> edges);

// --- sectoral pipeline -----------------------------------------------------

struct SectorAnalysis {
  CorrelationMatrix correlation;
  DistanceMatrix distance;
  MdsEmbedding embedding;
  Dendrogram dendrogram;
  SpanningTree tree;
};

/// One correlation feeds MDS, the Ward dendrogram and the MST.
SectorAnalysis sector_pipeline(const ReturnPanel& panel, const WindowSpec& window = {},
                               const MdsOptions& mds_options = {},
                               MstAlgorithm algorithm = MstAlgorithm::kruskal);

}  // namespace mesonet
