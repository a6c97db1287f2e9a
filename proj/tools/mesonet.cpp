// mesonet: command-line front end for the market analysis pipeline.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "CLI11.hpp"
#include "mesonet/error.hpp"
#include "mesonet/io.hpp"
#include "mesonet/netgeo.hpp"
#include "mesonet/panel.hpp"
#include "mesonet/parallel.hpp"
#include "mesonet/partialcorr.hpp"
#include "mesonet/recurrence.hpp"
#include "mesonet/simd/kernels.hpp"
#include "mesonet/spectral.hpp"
#include "mesonet/synth.hpp"

namespace fs = std::filesystem;
using mesonet::Error;
using mesonet::ErrorCode;
using mesonet::io::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string config;
  std::vector<std::string> inputs;
  std::string out = ".";
  std::string align = "intersect";
  std::string market;
  std::string window_start;
  std::size_t window_days = 0;

  // recurrence
  std::string ticker;
  std::string series = "levels";
  std::string normalize = "max";
  std::size_t m = 1;
  std::size_t delay = 1;
  double eps = 0.1;
  std::string eps_mode = "relative";
  double target_rr = 0.0;
  std::size_t theiler = 0;
  std::size_t lmin = 2;
  std::size_t vmin = 2;

  // spectral / partial
  std::size_t n_group = 5;
  std::size_t bins = 50;
  bool full_tensor = false;

  // geometry
  std::size_t dims = 2;
  bool refine = false;
  std::string algorithm = "kruskal";
  std::string manifest;

  // synth
  std::uint64_t seed = 42;
  std::size_t stocks = 50;
  std::size_t days = 500;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::string sectors;
  double sigma = 1.0;
  double scale = 0.01;
  std::string market_name = "MKT";
  std::string preset = "none";
  std::string start = "2015-01-01";
};

struct Input {
  std::string label;
  std::string sha256;
  std::size_t bytes = 0;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io, "SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open {}", path));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class Run {
 public:
  Run(std::string command, const Options& o, CLI::App* sub)
      : command_(std::move(command)), o_(o), sub_(sub) {}

  const Options& opt() const { return o_; }
  bool given(const std::string& flag) const { return sub_->count(flag) > 0; }

  /// Every series from every input, in input order.
  std::vector<mesonet::PriceSeries> read_series() {
    std::vector<std::string> paths = o_.inputs;
    if (paths.empty()) paths.push_back("-");
    std::vector<mesonet::PriceSeries> all;
    for (const auto& path : paths) {
      const std::string data = slurp(path);
      inputs_.push_back({path == "-" ? "<stdin>" : path, sha256_hex(data), data.size()});
      std::istringstream in(data);
      auto series = mesonet::read_price_csv(in, path == "-" ? "<stdin>" : path);
      for (auto& s : series) all.push_back(std::move(s));
    }
    return all;
  }

  mesonet::PricePanel prices(bool allow_single = false) {
    auto series = read_series();
    if (allow_single && series.size() == 1) {
      series[0].validate();
      mesonet::PricePanel p;
      p.common_dates = series[0].dates;
      p.series = std::move(series);
      return p;
    }
    return mesonet::align(std::move(series), alignment());
  }

  mesonet::Alignment alignment() const {
    const auto a = mesonet::parse_alignment(o_.align);
    if (!a) throw Error(ErrorCode::invalid_argument, fmt::format("unknown alignment '{}'", o_.align));
    return *a;
  }

  mesonet::WindowSpec window_spec(std::size_t default_days = 0) const {
    mesonet::WindowSpec spec;
    if (!o_.window_start.empty()) {
      const auto d = mesonet::parse_date(o_.window_start);
      if (!d) {
        throw Error(ErrorCode::invalid_argument,
                    fmt::format("window start '{}' is not YYYY-MM-DD", o_.window_start));
      }
      spec.start = *d;
    }
    if (given("--window-days")) {
      if (o_.window_days == 0) throw Error(ErrorCode::invalid_argument, "window-days must be > 0");
      spec.length = o_.window_days;
    } else if (default_days > 0) {
      spec.length = default_days;
    }
    return spec;
  }

  /// Return panel restricted to the requested window.
  mesonet::ReturnPanel returns(std::size_t default_days = 0) {
    const auto panel = mesonet::apply_window(mesonet::log_returns(prices()), window_spec(default_days));
    record_window(panel);
    return panel;
  }

  void record_window(const mesonet::ReturnPanel& panel) {
    resolved_["window"] = {{"first", mesonet::format_date(panel.dates.front())},
                           {"last", mesonet::format_date(panel.dates.back())},
                           {"length", panel.length()},
                           {"series", panel.num_series()}};
  }

  json& resolved() { return resolved_; }

  fs::path out_dir() {
    const fs::path dir(o_.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    return dir;
  }

  void write(const std::string& name, const std::string& contents) {
    mesonet::io::write_text(out_dir() / name, contents);
    outputs_.push_back(name);
  }
  void write(const std::string& name, const json& value) {
    mesonet::io::write_json(out_dir() / name, value);
    outputs_.push_back(name);
  }

  void write_meta() {
    json meta;
    meta["tool"] = "mesonet";
    meta["version"] = kVersion;
    meta["command"] = command_;
    json params = json::object();
    for (const CLI::Option* opt : sub_->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || name == "h") continue;
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (opt->get_expected_max() > 1 || results.size() > 1) {
          params[name] = results;
        } else if (opt->get_type_size() == 0) {
          params[name] = true;
        } else {
          params[name] = results.empty() ? "" : results.front();
        }
      } else if (opt->get_type_size() == 0) {
        params[name] = false;
      } else {
        params[name] = opt->get_default_str();
      }
    }
    meta["parameters"] = params;
    json inputs = json::array();
    for (const auto& in : inputs_) {
      inputs.push_back({{"path", in.label}, {"sha256", in.sha256}, {"bytes", in.bytes}});
    }
    meta["inputs"] = inputs;
    meta["resolved"] = resolved_.is_null() ? json::object() : resolved_;
    meta["isa"] = std::string(mesonet::simd::isa_name(mesonet::simd::active_isa()));
    meta["generator"] = std::string(mesonet::generator_description());
    meta["outputs"] = outputs_;
    mesonet::io::write_json(out_dir() / "run_meta.json", meta);
  }

 private:
  std::string command_;
  const Options& o_;
  CLI::App* sub_;
  std::vector<Input> inputs_;
  std::vector<std::string> outputs_;
  json resolved_;
};

// ---------------------------------------------------------------------------

void cmd_rqa(Run& run) {
  const Options& o = run.opt();
  const auto panel = run.prices(true);
  std::size_t row = 0;
  if (!o.ticker.empty()) {
    const auto it = std::find_if(panel.series.begin(), panel.series.end(),
                                 [&](const auto& s) { return s.ticker == o.ticker; });
    if (it == panel.series.end()) {
      throw Error(ErrorCode::unknown_ticker, fmt::format("ticker '{}' not in panel", o.ticker));
    }
    row = static_cast<std::size_t>(it - panel.series.begin());
  }
  const auto& series = panel.series[row];

  std::vector<double> x;
  if (o.series == "levels") {
    const auto mode = mesonet::parse_normalization(o.normalize);
    if (!mode) throw Error(ErrorCode::invalid_argument, fmt::format("unknown normalization '{}'", o.normalize));
    x = mesonet::normalize_levels(series, *mode);
  } else if (o.series == "returns") {
    mesonet::PricePanel single;
    single.series = {series};
    single.common_dates = panel.common_dates;
    const auto r = mesonet::log_returns(single);
    x.assign(r.returns.data(), r.returns.data() + r.returns.size());
  } else {
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown series kind '{}'", o.series));
  }

  mesonet::EmbeddingConfig cfg;
  cfg.dimension = o.m;
  cfg.delay = o.delay;
  cfg.threshold = o.eps;
  cfg.theiler_window = o.theiler;
  const auto mode = mesonet::parse_eps_mode(o.eps_mode);
  if (!mode) throw Error(ErrorCode::invalid_argument, fmt::format("unknown eps mode '{}'", o.eps_mode));
  cfg.eps_mode = *mode;
  cfg.validate();

  const auto points = mesonet::embed(x, cfg.dimension, cfg.delay);
  double eps = 0.0;
  if (run.given("--target-rr")) {
    eps = mesonet::calibrate_threshold(points, o.target_rr);
  } else {
    eps = mesonet::resolve_threshold(points, cfg.threshold, cfg.eps_mode);
  }
  const auto rm = mesonet::recurrence_matrix(points, eps, cfg.theiler_window);
  const auto report = mesonet::rqa(rm, o.lmin, o.vmin);

  auto j = mesonet::io::rqa_json(report, cfg, points.size());
  j["config"]["eps_absolute"] = mesonet::io::round15(eps);
  j["config"]["ticker"] = series.ticker;
  j["config"]["series"] = o.series;
  run.resolved()["ticker"] = series.ticker;
  run.resolved()["eps_absolute"] = mesonet::io::round15(eps);
  run.resolved()["samples"] = x.size();
  run.write("rqa_report.json", j);
  run.write("recurrence.csv", mesonet::io::recurrence_coo_csv(rm));
  run.write("recurrence.pgm", mesonet::io::recurrence_pgm(rm));
}

void cmd_corr(Run& run) {
  const auto c = mesonet::correlation_matrix(run.returns());
  run.write("correlation.csv", mesonet::io::matrix_csv(c.tickers, c.values));
  run.write("coefficient_hist.json",
            mesonet::io::histogram_json(mesonet::coefficient_distribution(c, run.opt().bins)));
}

void cmd_modes(Run& run) {
  const auto panel = run.returns();
  const auto c = mesonet::correlation_matrix(panel);
  const auto d = mesonet::decompose(c, run.opt().n_group);
  std::optional<mesonet::MpBounds> bounds;
  if (panel.length() > panel.num_series()) bounds = mesonet::mp_bounds(panel.num_series(), panel.length());
  run.write("modes.json", mesonet::io::modes_json(d, mesonet::ipr(d), bounds ? &*bounds : nullptr));
  run.write("market_mode.csv", mesonet::io::matrix_csv(c.tickers, d.market));
  run.write("group_mode.csv", mesonet::io::matrix_csv(c.tickers, d.group));
  run.write("random_mode.csv", mesonet::io::matrix_csv(c.tickers, d.random));
}

void cmd_partial(Run& run) {
  const Options& o = run.opt();
  if (o.market.empty()) throw Error(ErrorCode::invalid_argument, "partial needs --market <ticker>");
  const auto pc = mesonet::partial_correlations(run.returns(), o.market, o.full_tensor);
  run.write("partial_given_market.csv", mesonet::io::matrix_csv(pc.stocks, pc.given_market));
  run.write("avg_influence.csv", mesonet::io::matrix_csv(pc.stocks, pc.average_influence));
  std::vector<double> values;
  for (Eigen::Index x = 0; x < pc.average_influence.rows(); ++x) {
    for (Eigen::Index z = 0; z < pc.average_influence.cols(); ++z) {
      if (x != z) values.push_back(pc.average_influence(x, z));
    }
  }
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  run.write("influence_hist.json",
            mesonet::io::histogram_json(mesonet::make_histogram(values, o.bins, lo, hi)));
  run.write("partial_given_market_z_mean.csv",
            mesonet::io::matrix_csv(pc.stocks, pc.given_market_z_mean));
  run.write("partial_given_market_z_max.csv",
            mesonet::io::matrix_csv(pc.stocks, pc.given_market_z_max));
  if (o.full_tensor) run.write("influence_tensor.csv", mesonet::io::influence_tensor_csv(pc));
  run.resolved()["market"] = pc.market;
}

mesonet::MdsOptions mds_options(const Options& o) {
  mesonet::MdsOptions m;
  m.dims = o.dims;
  m.refine = o.refine;
  return m;
}

mesonet::MstAlgorithm mst_algorithm(const Options& o) {
  const auto a = mesonet::parse_mst_algorithm(o.algorithm);
  if (!a) throw Error(ErrorCode::invalid_argument, fmt::format("unknown MST algorithm '{}'", o.algorithm));
  return *a;
}

std::optional<mesonet::io::Manifest> manifest(const Options& o) {
  if (o.manifest.empty()) return std::nullopt;
  return mesonet::io::read_manifest(o.manifest);
}

void write_mds(Run& run, const mesonet::MdsEmbedding& e) {
  const auto m = manifest(run.opt());
  run.write("mds.csv", mesonet::io::mds_csv(e));
  run.write("mds.svg", mesonet::io::mds_svg(e, m ? &*m : nullptr));
  run.write("mds.json", mesonet::io::mds_json(e));
}

void write_dendrogram(Run& run, const mesonet::Dendrogram& d) {
  run.write("dendrogram.newick", mesonet::io::dendrogram_newick(d));
  run.write("dendrogram.csv", mesonet::io::dendrogram_merges_csv(d));
}

void write_tree(Run& run, const mesonet::SpanningTree& t) {
  run.write("mst.dot", mesonet::io::mst_dot(t));
  run.write("mst.csv", mesonet::io::mst_edges_csv(t));
  run.resolved()["mst_total_weight"] = mesonet::io::round15(t.total_weight);
}

mesonet::DistanceMatrix distances(Run& run) {
  return mesonet::to_distance(mesonet::correlation_matrix(run.returns()));
}

void cmd_distance(Run& run) {
  const auto d = distances(run);
  run.write("distance.csv", mesonet::io::matrix_csv(d.tickers, d.values));
}

void cmd_mds(Run& run) { write_mds(run, mesonet::mds(distances(run), mds_options(run.opt()))); }

void cmd_dendro(Run& run) { write_dendrogram(run, mesonet::ward_dendrogram(distances(run))); }

void cmd_mst(Run& run) { write_tree(run, mesonet::mst(distances(run), mst_algorithm(run.opt()))); }

void cmd_sector(Run& run) {
  const Options& o = run.opt();
  const auto all = mesonet::log_returns(run.prices());
  auto spec = run.window_spec(250);
  auto options = mds_options(o);
  const auto a = mesonet::sector_pipeline(all, spec, options, mst_algorithm(o));
  run.record_window(mesonet::apply_window(all, spec));
  run.write("correlation.csv", mesonet::io::matrix_csv(a.correlation.tickers, a.correlation.values));
  run.write("distance.csv", mesonet::io::matrix_csv(a.distance.tickers, a.distance.values));
  write_mds(run, a.embedding);
  write_dendrogram(run, a.dendrogram);
  write_tree(run, a.tree);
}

std::vector<mesonet::SectorSpec> parse_sectors(const std::string& text) {
  std::vector<mesonet::SectorSpec> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
      std::size_t used = 0;
      const auto size = std::stoul(item.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("bad size");
      const double loading = std::stod(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("bad loading");
      out.push_back({size, loading});
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("sector entry '{}' is not size:loading", item));
    }
  }
  return out;
}

void cmd_synth(Run& run) {
  const Options& o = run.opt();
  const auto start = mesonet::parse_date(o.start);
  if (!start) throw Error(ErrorCode::invalid_argument, fmt::format("start '{}' is not YYYY-MM-DD", o.start));

  mesonet::ReturnPanel returns;
  std::vector<std::size_t> sector_of;
  std::vector<std::string> sector_names;
  if (o.preset == "sector-indices") {
    const auto p = mesonet::sector_index_preset(o.seed, o.days);
    returns = p.indices;
    sector_of = p.sector_of;
    sector_names = {"A", "B", "C"};
  } else if (o.preset == "none") {
    mesonet::FactorModelSpec spec;
    spec.n_stocks = o.stocks;
    spec.n_days = o.days;
    spec.beta_min = o.beta_min;
    spec.beta_max = o.beta_max;
    spec.sectors = parse_sectors(o.sectors);
    spec.idiosyncratic_sigma = o.sigma;
    spec.seed = o.seed;
    spec.validate();
    const auto m = mesonet::generate(spec);
    returns = m.with_market(o.market_name);
    sector_of = m.sector_of;
    sector_of.push_back(mesonet::kNoSector);
    for (std::size_t s = 0; s < spec.sectors.size(); ++s) sector_names.push_back(fmt::format("G{}", s + 1));
  } else {
    throw Error(ErrorCode::invalid_argument, fmt::format("unknown preset '{}'", o.preset));
  }
  if (!(o.scale > 0.0) || !std::isfinite(o.scale)) {
    throw Error(ErrorCode::invalid_argument, "scale must be positive");
  }
  returns.returns *= o.scale;
  const auto prices = mesonet::to_prices(returns, *start);

  std::string manifest = "ticker,sector,name\n";
  for (std::size_t i = 0; i < returns.tickers.size(); ++i) {
    const std::string sector = sector_of[i] == mesonet::kNoSector ? "" : sector_names[sector_of[i]];
    manifest += fmt::format("{},{},{}\n", returns.tickers[i], sector, returns.tickers[i]);
  }

  if (!run.given("--out")) {
    mesonet::io::write_wide_prices(std::cout, prices);
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::io, "failed writing to stdout");
    return;
  }
  std::ostringstream csv;
  mesonet::io::write_wide_prices(csv, prices);
  run.write("panel.csv", csv.str());
  run.write("sectors.csv", manifest);
  run.write_meta();
}

// ---------------------------------------------------------------------------

/// Appends `--key value` for every config-file key not already given as a
/// flag, so command-line flags win.
std::vector<std::string> inject_config(std::vector<std::string> args, CLI::App& app) {
  if (args.size() < 2) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[1]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, fmt::format("cannot open config {}", path));
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, fmt::format("config {} is not valid JSON: {}", path, e.what()));
  }
  if (!cfg.is_object()) throw Error(ErrorCode::config, fmt::format("config {} must be a JSON object", path));

  const auto on_command_line = [&](const std::string& flag) {
    for (std::size_t i = 2; i < args.size(); ++i) {
      if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  const auto scalar = [&](const std::string& key, const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return fmt::format("{:.17g}", v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    throw Error(ErrorCode::config, fmt::format("config key '{}' has an unsupported value", key));
  };

  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config") {
      throw Error(ErrorCode::config, fmt::format("config key '{}' is not an option of '{}'", key, args[1]));
    }
    if (on_command_line(flag)) continue;
    if (opt->get_type_size() == 0) {
      if (!value.is_boolean()) throw Error(ErrorCode::config, fmt::format("config key '{}' must be boolean", key));
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(scalar(key, v));
      }
      continue;
    }
    args.push_back(flag);
    args.push_back(scalar(key, value));
  }
  return args;
}

void add_common(CLI::App* s, Options& o) {
  s->add_option("--config", o.config, "JSON file of option values; flags override it");
  s->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void add_inputs(CLI::App* s, Options& o) {
  s->add_option("--input", o.inputs, "Price CSV (repeatable; '-' or none reads stdin)");
  s->add_option("--align", o.align, "Date alignment: intersect or forward_fill")->capture_default_str();
}

void add_window(CLI::App* s, Options& o) {
  s->add_option("--window-start", o.window_start, "First return date of the window (YYYY-MM-DD)");
  s->add_option("--window-days", o.window_days, "Window length in trading days");
}

void add_geometry(CLI::App* s, Options& o, bool with_mds, bool with_mst) {
  if (with_mds) {
    s->add_option("--dims", o.dims, "Embedding dimension")->capture_default_str();
    s->add_flag("--refine", o.refine, "Refine classical MDS by stress majorization");
    s->add_option("--manifest", o.manifest, "CSV with ticker,sector columns for SVG colours");
  }
  if (with_mst) s->add_option("--algorithm", o.algorithm, "kruskal or prim")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Correlation, recurrence and network analysis of market price panels"};
  app.name("mesonet");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* rqa = app.add_subcommand("rqa", "Recurrence quantification of one series");
  add_common(rqa, o);
  add_inputs(rqa, o);
  rqa->add_option("--ticker", o.ticker, "Series to analyse (default: first)");
  rqa->add_option("--series", o.series, "levels or returns")->capture_default_str();
  rqa->add_option("--normalize", o.normalize, "Level normalization: max, range or none")->capture_default_str();
  rqa->add_option("--m", o.m, "Embedding dimension")->capture_default_str();
  rqa->add_option("--delay", o.delay, "Embedding delay")->capture_default_str();
  rqa->add_option("--eps", o.eps, "Recurrence threshold")->capture_default_str();
  rqa->add_option("--eps-mode", o.eps_mode, "relative (fraction of diameter) or absolute")->capture_default_str();
  rqa->add_option("--target-rr", o.target_rr, "Calibrate the threshold to this recurrence rate");
  rqa->add_option("--theiler", o.theiler, "Theiler window")->capture_default_str();
  rqa->add_option("--lmin", o.lmin, "Minimum diagonal line length")->capture_default_str();
  rqa->add_option("--vmin", o.vmin, "Minimum vertical line length")->capture_default_str();

  auto* corr = app.add_subcommand("corr", "Equal-time correlation matrix");
  add_common(corr, o);
  add_inputs(corr, o);
  add_window(corr, o);
  corr->add_option("--bins", o.bins, "Coefficient histogram bins")->capture_default_str();

  auto* modes = app.add_subcommand("modes", "Market, group and random mode decomposition");
  add_common(modes, o);
  add_inputs(modes, o);
  add_window(modes, o);
  modes->add_option("--n-group", o.n_group, "Number of group modes")->capture_default_str();

  auto* partial = app.add_subcommand("partial", "Market-controlled partial correlations");
  add_common(partial, o);
  add_inputs(partial, o);
  add_window(partial, o);
  partial->add_option("--market", o.market, "Ticker of the market index");
  partial->add_option("--bins", o.bins, "Influence histogram bins")->capture_default_str();
  partial->add_flag("--full-tensor", o.full_tensor, "Also write every d(x,y|z)");

  auto* distance = app.add_subcommand("distance", "Correlation distance matrix");
  add_common(distance, o);
  add_inputs(distance, o);
  add_window(distance, o);

  auto* mds = app.add_subcommand("mds", "Multidimensional scaling of correlation distances");
  add_common(mds, o);
  add_inputs(mds, o);
  add_window(mds, o);
  add_geometry(mds, o, true, false);

  auto* dendro = app.add_subcommand("dendro", "Ward dendrogram of correlation distances");
  add_common(dendro, o);
  add_inputs(dendro, o);
  add_window(dendro, o);

  auto* mst = app.add_subcommand("mst", "Minimum spanning tree of correlation distances");
  add_common(mst, o);
  add_inputs(mst, o);
  add_window(mst, o);
  add_geometry(mst, o, false, true);

  auto* sector = app.add_subcommand("sector", "Full network pipeline over sector indices");
  add_common(sector, o);
  add_inputs(sector, o);
  add_window(sector, o);
  add_geometry(sector, o, true, true);

  auto* synth = app.add_subcommand("synth", "Generate a seeded factor-model price panel");
  add_common(synth, o);
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--stocks", o.stocks, "Number of stocks")->capture_default_str();
  synth->add_option("--days", o.days, "Number of return days")->capture_default_str();
  synth->add_option("--beta-min", o.beta_min, "Smallest market beta")->capture_default_str();
  synth->add_option("--beta-max", o.beta_max, "Largest market beta")->capture_default_str();
  synth->add_option("--sectors", o.sectors, "Sector blocks as size:loading,...");
  synth->add_option("--sigma", o.sigma, "Idiosyncratic noise scale")->capture_default_str();
  synth->add_option("--scale", o.scale, "Multiplier applied to returns before pricing")->capture_default_str();
  synth->add_option("--market-name", o.market_name, "Ticker of the market factor column")->capture_default_str();
  synth->add_option("--preset", o.preset, "none or sector-indices")->capture_default_str();
  synth->add_option("--start", o.start, "First price date")->capture_default_str();

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = inject_config(args, app);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      throw Error(ErrorCode::invalid_argument, e.what());
    }

    CLI::App* chosen = app.get_subcommands().front();
    Run run(chosen->get_name(), o, chosen);
    const std::string name = chosen->get_name();
    if (name == "synth") {
      cmd_synth(run);
      return 0;
    }
    if (name == "rqa") cmd_rqa(run);
    else if (name == "corr") cmd_corr(run);
    else if (name == "modes") cmd_modes(run);
    else if (name == "partial") cmd_partial(run);
    else if (name == "distance") cmd_distance(run);
    else if (name == "mds") cmd_mds(run);
    else if (name == "dendro") cmd_dendro(run);
    else if (name == "mst") cmd_mst(run);
    else if (name == "sector") cmd_sector(run);
    run.write_meta();
    return 0;
  } catch (const Error& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << mesonet::code_name(e.code()) << ": " << message << "\n";
    return mesonet::exit_status(e.code());
  } catch (const std::exception& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    std::cerr << "E_INTERNAL: " << message << "\n";
    return 1;
  }
}
