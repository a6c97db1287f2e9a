#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/netgeo.hpp"

namespace mesonet {

Dendrogram ward_dendrogram(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) throw Error(ErrorCode::insufficient_data, "dendrogram needs at least 2 items");
  d.validate();

  Eigen::MatrixXd dist = d.values;
  std::vector<std::size_t> id(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::iota(id.begin(), id.end(), 0);

  Dendrogram out;
  out.tickers = d.tickers;
  out.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_p = 0;
    std::size_t best_q = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_ids{n * 2, n * 2};
    for (std::size_t p = 0; p < n; ++p) {
      if (!active[p]) continue;
      for (std::size_t q = p + 1; q < n; ++q) {
        if (!active[q]) continue;
        const double v = dist(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
        const std::pair<std::size_t, std::size_t> ids{std::min(id[p], id[q]),
                                                      std::max(id[p], id[q])};
        if (v < best || (v == best && ids < best_ids)) {
          best = v;
          best_ids = ids;
          best_p = p;
          best_q = q;
        }
      }
    }

    const auto pi = static_cast<Eigen::Index>(best_p);
    const auto qi = static_cast<Eigen::Index>(best_q);
    const double sp = static_cast<double>(size[best_p]);
    const double sq = static_cast<double>(size[best_q]);
    const double dpq2 = best * best;
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r] || r == best_p || r == best_q) continue;
      const auto ri = static_cast<Eigen::Index>(r);
      const double sr = static_cast<double>(size[r]);
      const double drp = dist(ri, pi);
      const double drq = dist(ri, qi);
      const double merged = ((sr + sp) * drp * drp + (sr + sq) * drq * drq - sr * dpq2) /
                            (sr + sp + sq);
      const double v = std::sqrt(std::max(0.0, merged));
      dist(ri, pi) = v;
      dist(pi, ri) = v;
    }

    out.merges.push_back({best_ids.first, best_ids.second, best, size[best_p] + size[best_q]});
    size[best_p] += size[best_q];
    id[best_p] = n + step;
    active[best_q] = false;
  }

  // Leaf order: depth-first, smaller child id first.
  std::vector<std::size_t> stack{2 * n - 2};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (node < n) {
      out.leaf_order.push_back(node);
      continue;
    }
    const Merge& m = out.merges[node - n];
    stack.push_back(m.b);
    stack.push_back(m.a);
  }
  return out;
}

std::vector<std::size_t> Dendrogram::cut(std::size_t clusters) const {
  const std::size_t n = leaves();
  if (clusters < 1 || clusters > n) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("cannot cut {} leaves into {} clusters", n, clusters));
  }
  // Union-find over cluster ids; apply the first n - clusters merges.
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < n - clusters; ++k) {
    parent[find(merges[k].a)] = n + k;
    parent[find(merges[k].b)] = n + k;
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(2 * n - 1, n);
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const std::size_t root = find(leaf);
    if (root_label[root] == n) root_label[root] = next++;
    labels[leaf] = root_label[root];
  }
  return labels;
}

}  // namespace mesonet
