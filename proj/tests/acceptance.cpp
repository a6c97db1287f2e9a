// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mesonet/netgeo.hpp"
#include "mesonet/partialcorr.hpp"
#include "mesonet/recurrence.hpp"
#include "mesonet/spectral.hpp"
#include "mesonet/synth.hpp"
#include "oracles/geometry.hpp"
#include "oracles/stats.hpp"
#include "support.hpp"

using namespace mesonet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = seconds <= budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::cout << fmt::format("[{}] {:>2} {}: {}; {:.2f}s (budget {:.0f}s{})\n", pass ? "PASS" : "FAIL",
                           id, name, o.detail, seconds, budget_seconds,
                           in_time ? "" : ", over budget");
}

FactorModelSpec spec_for(std::size_t n, std::size_t t, double beta_lo, double beta_hi,
                         std::uint64_t seed) {
  FactorModelSpec s;
  s.n_stocks = n;
  s.n_days = t;
  s.beta_min = beta_lo;
  s.beta_max = beta_hi;
  s.seed = seed;
  return s;
}

// 1 ------------------------------------------------------------------------
Outcome mp_bounds_check() {
  const auto b = mp_bounds_for_ratio(5.0);
  const double e1 = std::abs(b.lambda_min - 0.3056);
  const double e2 = std::abs(b.lambda_max - 2.0944);
  return {e1 <= 1e-4 && e2 <= 1e-4,
          fmt::format("lambda_min={:.6f} lambda_max={:.6f} (targets 0.3056, 2.0944, tol 1e-4)",
                      b.lambda_min, b.lambda_max)};
}

// 2 ------------------------------------------------------------------------
Outcome mp_null_model() {
  const auto market = generate(spec_for(100, 500, 0.0, 0.0, 20240601));
  const auto c = correlation_matrix(market.stocks);
  const auto d = decompose(c, 5);
  const auto b = mp_bounds(100, 500);
  std::vector<double> values(d.eigenvalues.data(), d.eigenvalues.data() + d.eigenvalues.size());
  std::sort(values.begin(), values.end());
  std::size_t inside = 0;
  for (const double v : values) {
    if (v >= b.lambda_min - 0.05 && v <= b.lambda_max + 0.05) ++inside;
  }
  double ks = 0.0;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = mp_cdf(values[i], b);
    ks = std::max({ks, (i + 1) / n - f, f - i / n});
  }
  return {inside >= 97 && ks <= 0.08,
          fmt::format("{} of 100 eigenvalues inside the widened support (need >= 97), KS={:.4f} "
                      "(need <= 0.08)",
                      inside, ks)};
}

// 3 ------------------------------------------------------------------------
Outcome mode_decomposition() {
  double worst_rec = 0.0;
  double worst_trace = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const std::size_t n = 10 + k % 31;
    const std::size_t t = n + 20 + (k * 7) % 200;
    auto spec = spec_for(n, t, 0.0, 1.5 * static_cast<double>(k % 3), 1000 + k);
    const auto c = correlation_matrix(generate(spec).stocks);
    const auto d = decompose(c, std::min<std::size_t>(5, n - 1));
    worst_rec = std::max(worst_rec, ((d.market + d.group + d.random) - c.values).cwiseAbs().maxCoeff());
    worst_trace = std::max(worst_trace, std::abs(d.eigenvalues.sum() - static_cast<double>(n)));
  }
  return {worst_rec <= 1e-10 && worst_trace <= 1e-8,
          fmt::format("max reconstruction error {:.3e} (tol 1e-10), max |sum(lambda)-N| {:.3e} "
                      "(tol 1e-8) over 100 panels",
                      worst_rec, worst_trace)};
}

// 4 ------------------------------------------------------------------------
Outcome market_mode() {
  const auto c = correlation_matrix(generate(spec_for(50, 500, 1.0, 1.5, 77)).stocks);
  const auto d = decompose(c, 5);
  const auto b = mp_bounds(50, 500);
  const double top = d.eigenvalues(0);
  const double participation = ipr(Eigen::VectorXd(d.eigenvectors.col(0)));
  return {top > 3.0 * b.lambda_max && participation < 3.0 / 50.0,
          fmt::format("lambda_0={:.3f} vs 3*lambda_max={:.3f}; IPR={:.5f} vs 3/N={:.5f}", top,
                      3.0 * b.lambda_max, participation, 3.0 / 50.0)};
}

// 5 ------------------------------------------------------------------------
Outcome partial_correlation() {
  double worst_first = 0.0;
  double worst_second = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto spec = spec_for(10, 200, 0.3, 1.2, 5000 + k);
    if (k % 2) spec.sectors = {{5, 0.6}, {5, 0.4}};
    const auto panel = generate(spec).with_market("M");
    const auto pc = partial_correlations(panel, "M");
    const auto m = oracle::row(panel.returns, 10);
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < 10; ++i) rows.push_back(oracle::row(panel.returns, i));
    for (std::size_t x = 0; x < 10; ++x) {
      for (std::size_t y = x + 1; y < 10; ++y) {
        const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
        worst_first = std::max(worst_first, std::abs(pc.given_market(xi, yi) -
                                                     oracle::partial_by_regression(rows[x], rows[y], {m})));
        if (k % 10) continue;  // second order on every tenth panel keeps the run short
        for (std::size_t z = 0; z < 10; ++z) {
          if (z == x || z == y) continue;
          const double second = oracle::partial_by_regression(rows[x], rows[y], {m, rows[z]});
          worst_second = std::max(worst_second,
                                  std::abs((pc.given_market(xi, yi) - influence(x, y, z, pc)) - second));
        }
      }
    }
  }

  // Exhaustive triple loop for the averaged influence on one N = 10 panel.
  const auto panel = generate(spec_for(10, 200, 0.5, 1.0, 6060)).with_market("M");
  const auto pc = partial_correlations(panel, "M");
  const auto& g = pc.given_market;
  double worst_avg = 0.0;
  for (Eigen::Index z = 0; z < 10; ++z) {
    for (Eigen::Index x = 0; x < 10; ++x) {
      if (x == z) continue;
      double sum = 0.0;
      for (Eigen::Index y = 0; y < 10; ++y) {
        if (y == x || y == z) continue;
        sum += g(x, y) - oracle::conditioned(g(x, y), g(x, z), g(y, z));
      }
      worst_avg = std::max(worst_avg, std::abs(pc.average_influence(x, z) - sum / 8.0));
    }
  }
  return {worst_first <= 1e-10 && worst_second <= 1e-10 && worst_avg <= 1e-12,
          fmt::format("formula vs regression: first order {:.3e}, second order {:.3e} (tol 1e-10); "
                      "average influence vs triple loop {:.3e} (tol 1e-12)",
                      worst_first, worst_second, worst_avg)};
}

// 6 ------------------------------------------------------------------------
Outcome mst_optimality() {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 7);
    DistanceMatrix d;
    d.tickers = testing::names(n);
    d.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.values.rows(); ++i)
      for (Eigen::Index j = i + 1; j < d.values.rows(); ++j) d.values(i, j) = d.values(j, i) = u(rng);
    const double best = oracle::brute_force_mst_weight(d.values);
    if (mst(d, MstAlgorithm::kruskal).total_weight != best) ++mismatches;
    if (mst(d, MstAlgorithm::prim).total_weight != best) ++mismatches;
  }
  return {mismatches == 0,
          fmt::format("{} mismatches against exhaustive Pruefer enumeration over 100 matrices (N <= 8, "
                      "exact equality)",
                      mismatches)};
}

// 7 ------------------------------------------------------------------------
Outcome mds_recovery() {
  double worst_dist = 0.0;
  double worst_rms = 0.0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = 3 + k % 18;
    const auto x = testing::random_points(n, 2, 7000 + k);
    DistanceMatrix d;
    d.tickers = testing::names(n);
    d.values = testing::pairwise(x);
    const auto e = mds(d);
    worst_dist = std::max(worst_dist, (testing::pairwise(e.coordinates) - d.values).cwiseAbs().maxCoeff());
    worst_rms = std::max(worst_rms, oracle::procrustes_rms(e.coordinates, x));
  }
  return {worst_dist <= 1e-8 && worst_rms <= 1e-6,
          fmt::format("max distance error {:.3e} (tol 1e-8), max Procrustes RMS {:.3e} (tol 1e-6)",
                      worst_dist, worst_rms)};
}

// 8 ------------------------------------------------------------------------
std::set<std::size_t> members(const Dendrogram& d, std::size_t cluster) {
  const std::size_t n = d.leaves();
  if (cluster < n) return {cluster};
  auto a = members(d, d.merges[cluster - n].a);
  const auto b = members(d, d.merges[cluster - n].b);
  a.insert(b.begin(), b.end());
  return a;
}

Outcome ward_correctness() {
  int bad = 0;
  double worst_height = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto x = testing::random_points(n, 1 + k % 3, 8000 + k);
    DistanceMatrix d;
    d.tickers = testing::names(n);
    d.values = testing::pairwise(x);
    const auto dendro = ward_dendrogram(d);
    const auto ref = oracle::brute_force_ward(x);
    for (std::size_t s = 0; s < ref.size(); ++s) {
      const auto a = members(dendro, dendro.merges[s].a);
      const auto b = members(dendro, dendro.merges[s].b);
      const bool same = (a == ref[s].left && b == ref[s].right) || (a == ref[s].right && b == ref[s].left);
      if (!same) ++bad;
      worst_height = std::max(worst_height, std::abs(dendro.merges[s].height - ref[s].height));
    }
  }
  return {bad == 0 && worst_height <= 1e-9,
          fmt::format("{} merge mismatches over 20 instances (N <= 6); max height deviation {:.3e} "
                      "(tol 1e-9)",
                      bad, worst_height)};
}

// 9 ------------------------------------------------------------------------
Outcome rqa_corridor() {
  std::vector<double> sine(1000);
  for (std::size_t t = 0; t < sine.size(); ++t) sine[t] = std::sin(2.0 * std::numbers::pi * t / 16.0);
  std::vector<double> noise(1000);
  GaussianStream g(99);
  for (auto& v : noise) v = g.next();

  const auto det_at = [](const std::vector<double>& x) {
    const auto e = embed(x, 2, 1);
    return rqa(recurrence_matrix(e, calibrate_threshold(e, 0.05))).det;
  };
  const double det_sine = det_at(sine);
  const double det_noise = det_at(noise);

  // Random-walk index levels, normalised as the level series are in practice.
  auto market = generate(spec_for(1, 1000, 1.0, 1.0, 31));
  ReturnPanel index = market.stocks;
  for (std::size_t t = 0; t < market.market.size(); ++t) index.returns(0, static_cast<Eigen::Index>(t)) = 0.01 * market.market[t];
  const auto prices = to_prices(index, *parse_date("2010-01-01"));
  const auto levels = normalize_levels(prices.series[0]);
  std::vector<double> rr;
  for (const std::size_t m : {1, 2, 5, 11}) {
    const auto e = embed(levels, m, 1);
    rr.push_back(rqa(recurrence_matrix(e, resolve_threshold(e, 0.1, EpsMode::relative))).rr);
  }
  const bool decreasing = rr[0] > rr[1] && rr[1] > rr[2] && rr[2] > rr[3];
  return {det_sine >= 0.95 && det_noise <= det_sine - 0.2 && decreasing,
          fmt::format("DET sine={:.4f} (need >= 0.95), noise={:.4f} (need <= sine - 0.2); RR over "
                      "m=1,2,5,11: {:.4g} {:.4g} {:.4g} {:.4g} (need strictly decreasing)",
                      det_sine, det_noise, rr[0], rr[1], rr[2], rr[3])};
}

// 10 -----------------------------------------------------------------------
Outcome sector_recovery() {
  const auto preset = sector_index_preset(2016);
  WindowSpec w;
  w.length = 250;
  const auto a = sector_pipeline(preset.indices, w);
  const std::size_t n = preset.indices.num_series();
  std::size_t worst_hops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto hops = a.tree.hops_from(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (preset.sector_of[i] == preset.sector_of[j]) worst_hops = std::max(worst_hops, hops[j]);
    }
  }
  const auto labels = a.dendrogram.cut(3);
  std::size_t agree = 0;
  for (std::size_t cluster = 0; cluster < 3; ++cluster) {
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cluster) ++counts[preset.sector_of[i]];
    }
    std::size_t best = 0;
    for (const auto& [sector, c] : counts) best = std::max(best, c);
    agree += best;
  }
  const double purity = static_cast<double>(agree) / static_cast<double>(n);
  return {worst_hops <= 2 && purity >= 0.9,
          fmt::format("max within-sector MST hop distance {} (need <= 2); 3-cluster purity {:.3f} "
                      "(need >= 0.90)",
                      worst_hops, purity)};
}

// 11 -----------------------------------------------------------------------
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[fs::relative(entry.path(), dir).string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / fmt::format("mesonet_acceptance_{}", ::getpid());
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::string> commands = {
      "synth --seed 42 --stocks 30 --days 400 --beta-min 0.5 --beta-max 1.2 --sectors 10:0.7,10:0.7,10:0.7 --out synth",
      "synth --preset sector-indices --seed 7 --out indices",
      "rqa --input synth/panel.csv --ticker MKT --m 5 --eps 0.1 --out rqa",
      "corr --input synth/panel.csv --out corr",
      "modes --input synth/panel.csv --n-group 5 --out modes",
      "partial --input synth/panel.csv --market MKT --full-tensor --out partial",
      "distance --input synth/panel.csv --out distance",
      "mds --input synth/panel.csv --refine --manifest synth/sectors.csv --out mds",
      "dendro --input synth/panel.csv --out dendro",
      "mst --input synth/panel.csv --algorithm prim --out mst",
      "sector --input indices/panel.csv --manifest indices/sectors.csv --out sector",
  };
  std::map<std::string, std::string> first;
  std::vector<std::string> failed;
  std::size_t compared = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& c : commands) {
      const std::string cmd =
          fmt::format("cd '{}' && '{}' {} > /dev/null 2>> errors.txt", root.string(), MESONET_CLI, c);
      const int raw = std::system(cmd.c_str());
      if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) failed.push_back(c.substr(0, c.find(' ')));
    }
    fs::remove(root / "errors.txt");
    auto now = snapshot(root);
    if (pass == 0) {
      first = std::move(now);
    } else {
      for (const auto& [path, bytes] : first) {
        ++compared;
        const auto it = now.find(path);
        if (it == now.end() || it->second != bytes) failed.push_back(path);
      }
    }
    // The second run starts from the same inputs but fresh output folders.
    if (pass == 0) {
      for (const auto& entry : fs::directory_iterator(root)) {
        const auto name = entry.path().filename().string();
        if (name != "synth" && name != "indices") fs::remove_all(entry.path());
      }
    }
  }
  fs::remove_all(root);
  std::string detail = fmt::format("{} commands run twice, {} output files compared byte for byte",
                                   commands.size(), compared);
  if (!failed.empty()) {
    detail += "; differing or failing:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty() && compared > 40, detail};
}

}  // namespace

int main() {
  criterion(1, "Marchenko-Pastur bounds at Q=5", 1, mp_bounds_check);
  criterion(2, "Marchenko-Pastur null model", 5, mp_null_model);
  criterion(3, "Mode decomposition identity", 10, mode_decomposition);
  criterion(4, "Market-mode detection", 2, market_mode);
  criterion(5, "Partial correlation vs regression", 5, partial_correlation);
  criterion(6, "MST optimality", 10, mst_optimality);
  criterion(7, "MDS recovery", 5, mds_recovery);
  criterion(8, "Ward correctness", 5, ward_correctness);
  criterion(9, "RQA sanity corridor", 10, rqa_corridor);
  criterion(10, "Sector recovery", 5, sector_recovery);
  criterion(11, "CLI determinism", 30, cli_determinism);
  std::cout << fmt::format("{} of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
