#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include <fmt/format.h>

#include "mesonet/error.hpp"
#include "mesonet/netgeo.hpp"

namespace mesonet {

std::optional<MstAlgorithm> parse_mst_algorithm(std::string_view text) {
  if (text == "kruskal") return MstAlgorithm::kruskal;
  if (text == "prim") return MstAlgorithm::prim;
  return std::nullopt;
}

std::string_view mst_algorithm_name(MstAlgorithm algorithm) {
  return algorithm == MstAlgorithm::kruskal ? "kruskal" : "prim";
}

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return std::tie(a.weight, a.i, a.j) < std::tie(b.weight, b.i, b.j);
}

Edge make_edge(const Eigen::MatrixXd& w, std::size_t u, std::size_t v) {
  const std::size_t i = std::min(u, v);
  const std::size_t j = std::max(u, v);
  return {i, j, w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))};
}

std::vector<Edge> kruskal(const Eigen::MatrixXd& w, std::size_t n) {
  std::vector<Edge> all;
  all.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.push_back(make_edge(w, i, j));
  }
  std::sort(all.begin(), all.end(), edge_less);

  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> rank(n, 0);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Edge> tree;
  tree.reserve(n - 1);
  for (const Edge& e : all) {
    std::size_t a = find(e.i);
    std::size_t b = find(e.j);
    if (a == b) continue;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    tree.push_back(e);
    if (tree.size() + 1 == n) break;
  }
  return tree;
}

std::vector<Edge> prim(const Eigen::MatrixXd& w, std::size_t n) {
  std::vector<bool> in_tree(n, false);
  std::vector<Edge> best(n);
  std::vector<bool> has_best(n, false);
  std::vector<Edge> tree;
  tree.reserve(n - 1);
  in_tree[0] = true;
  for (std::size_t v = 1; v < n; ++v) {
    best[v] = make_edge(w, 0, v);
    has_best[v] = true;
  }
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v] || !has_best[v]) continue;
      if (pick == n || edge_less(best[v], best[pick])) pick = v;
    }
    in_tree[pick] = true;
    tree.push_back(best[pick]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const Edge candidate = make_edge(w, pick, v);
      if (!has_best[v] || edge_less(candidate, best[v])) {
        best[v] = candidate;
        has_best[v] = true;
      }
    }
  }
  return tree;
}

}  // namespace

double tree_weight(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  double total = 0.0;
  for (const Edge& e : edges) total += e.weight;
  return total;
}

SpanningTree mst(const DistanceMatrix& d, MstAlgorithm algorithm) {
  const std::size_t n = d.size();
  if (n < 2) throw Error(ErrorCode::insufficient_data, "spanning tree needs at least 2 nodes");
  if (d.values.cols() != d.values.rows() || !d.values.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "spanning tree needs a finite square matrix");
  }
  SpanningTree tree;
  tree.tickers = d.tickers;
  tree.nodes = n;
  tree.edges = algorithm == MstAlgorithm::kruskal ? kruskal(d.values, n) : prim(d.values, n);
  std::sort(tree.edges.begin(), tree.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  tree.total_weight = tree_weight(tree.edges);
  return tree;
}

std::vector<std::vector<std::size_t>> SpanningTree::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(nodes);
  for (const Edge& e : edges) {
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

std::vector<std::size_t> SpanningTree::hops_from(std::size_t source) const {
  const auto adj = adjacency();
  constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> hops(nodes, unreachable);
  std::queue<std::size_t> frontier;
  hops[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (const std::size_t v : adj[u]) {
      if (hops[v] != unreachable) continue;
      hops[v] = hops[u] + 1;
      frontier.push(v);
    }
  }
  return hops;
}

}  // namespace mesonet
