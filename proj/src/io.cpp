#include "mesonet/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mesonet/error.hpp"

namespace mesonet::io {

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.15g}", value);
}

double round15(double value) {
  if (!std::isfinite(value)) return value;
  return std::stod(fmt::format("{:.15g}", value)) + 0.0;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write {}", path.string()));
  out << contents;
  if (!out) throw Error(ErrorCode::io, fmt::format("write failed for {}", path.string()));
}

void write_json(const std::filesystem::path& path, const json& value) {
  write_text(path, value.dump(2) + "\n");
}

std::string matrix_csv(const std::vector<std::string>& tickers, const Eigen::MatrixXd& values) {
  std::string out = "ticker";
  for (const auto& t : tickers) out += "," + t;
  out += "\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out += tickers[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < values.cols(); ++j) out += "," + format_number(values(i, j));
    out += "\n";
  }
  return out;
}

void write_wide_prices(std::ostream& out, const PricePanel& panel) {
  out << "date";
  for (const auto& s : panel.series) out << "," << s.ticker;
  out << "\n";
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    out << format_date(panel.common_dates[t]);
    for (const auto& s : panel.series) out << "," << format_number(s.prices[t]);
    out << "\n";
  }
}

std::string recurrence_coo_csv(const RecurrenceMatrix& rm) {
  std::string out = "i,j\n";
  for (std::size_t i = 0; i < rm.size(); ++i) {
    for (std::size_t j = i; j < rm.size(); ++j) {
      if (rm.at(i, j)) out += fmt::format("{},{}\n", i, j);
    }
  }
  return out;
}

std::string recurrence_pgm(const RecurrenceMatrix& rm) {
  const std::size_t n = rm.size();
  std::string out = fmt::format("P5\n{} {}\n255\n", n, n);
  out.reserve(out.size() + n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.push_back(rm.at(i, j) ? '\0' : '\xff');
  }
  return out;
}

json rqa_json(const RqaReport& r, const EmbeddingConfig& config, std::size_t embedded_points) {
  json j;
  j["RR"] = round15(r.rr);
  j["DET"] = round15(r.det);
  j["L_mean"] = round15(r.mean_diag);
  j["LMAX"] = r.lmax;
  j["ENTR"] = round15(r.entr);
  j["LAM"] = round15(r.lam);
  j["TT"] = round15(r.tt);
  j["no_diagonal_lines"] = r.no_diagonal_lines;
  j["no_vertical_lines"] = r.no_vertical_lines;
  j["sentinel_note"] =
      "when no line reaches the minimum length, the dependent measures are reported as 0";
  j["config"] = {
      {"m", config.dimension},
      {"delay", config.delay},
      {"eps", round15(config.threshold)},
      {"eps_mode", std::string(eps_mode_name(config.eps_mode))},
      {"theiler", config.theiler_window},
      {"l_min", r.l_min},
      {"v_min", r.v_min},
      {"embedded_points", embedded_points},
  };
  j["diagonal_histogram"] = r.diagonal_histogram;
  j["vertical_histogram"] = r.vertical_histogram;
  return j;
}

json histogram_json(const Histogram& h) {
  json j;
  j["lo"] = round15(h.lo);
  j["hi"] = round15(h.hi);
  j["bins"] = h.density.size();
  j["samples"] = h.samples;
  j["mean"] = round15(h.mean);
  std::vector<double> centers;
  std::vector<double> density;
  for (std::size_t k = 0; k < h.density.size(); ++k) {
    centers.push_back(round15(h.bin_center(k)));
    density.push_back(round15(h.density[k]));
  }
  j["centers"] = centers;
  j["density"] = density;
  j["counts"] = h.counts;
  return j;
}

json modes_json(const ModeDecomposition& d, const std::vector<double>& iprs,
                const MpBounds* bounds) {
  json j;
  std::vector<double> values;
  for (Eigen::Index k = 0; k < d.eigenvalues.size(); ++k) values.push_back(round15(d.eigenvalues(k)));
  std::vector<double> rounded_ipr;
  for (const double v : iprs) rounded_ipr.push_back(round15(v));
  j["eigenvalues"] = values;
  j["ipr"] = rounded_ipr;
  j["n_group"] = d.n_group;
  if (bounds) {
    j["mp_bounds"] = {{"q", round15(bounds->q)},
                      {"lambda_min", round15(bounds->lambda_min)},
                      {"lambda_max", round15(bounds->lambda_max)}};
    std::size_t above = 0;
    for (const double v : values) above += v > bounds->lambda_max ? 1 : 0;
    j["eigenvalues_above_lambda_max"] = above;
  } else {
    j["mp_bounds"] = nullptr;
  }
  return j;
}

std::string influence_tensor_csv(const PartialCorrelationSet& pc) {
  std::string out = "x,y,z,d\n";
  if (!pc.tensor) return out;
  const std::size_t n = pc.tensor->n;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        out += fmt::format("{},{},{},{}\n", pc.stocks[x], pc.stocks[y], pc.stocks[z],
                           format_number(pc.tensor->at(x, y, z)));
      }
    }
  }
  return out;
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string newick_label(const std::string& s) {
  const bool plain = std::none_of(s.begin(), s.end(), [](char c) {
    return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == ' ' || c == '\'' ||
           c == '[' || c == ']';
  });
  if (plain) return s;
  std::string out = "'";
  for (const char c : s) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  return out + "'";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string mst_dot(const SpanningTree& tree) {
  std::string out = "graph mst {\n";
  for (std::size_t v = 0; v < tree.nodes; ++v) out += fmt::format("  {};\n", quoted(tree.tickers[v]));
  for (const Edge& e : tree.edges) {
    out += fmt::format("  {} -- {} [weight={}];\n", quoted(tree.tickers[e.i]),
                       quoted(tree.tickers[e.j]), format_number(e.weight));
  }
  out += "}\n";
  return out;
}

std::string mst_edges_csv(const SpanningTree& tree) {
  std::string out = "i,j,weight\n";
  for (const Edge& e : tree.edges) {
    out += fmt::format("{},{},{}\n", tree.tickers[e.i], tree.tickers[e.j],
                       format_number(e.weight));
  }
  return out;
}

std::string dendrogram_newick(const Dendrogram& dendrogram) {
  const std::size_t n = dendrogram.leaves();
  const auto height = [&](std::size_t node) {
    return node < n ? 0.0 : dendrogram.merges[node - n].height;
  };
  // Iterative post-order so deep trees do not exhaust the stack.
  std::vector<std::string> text(2 * n - 1);
  for (std::size_t leaf = 0; leaf < n; ++leaf) text[leaf] = newick_label(dendrogram.tickers[leaf]);
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const Merge& m = dendrogram.merges[k];
    const double h = m.height;
    text[n + k] = fmt::format("({}:{},{}:{})", text[m.a], format_number(h - height(m.a)),
                              text[m.b], format_number(h - height(m.b)));
    text[m.a].clear();
    text[m.b].clear();
  }
  return text[2 * n - 2] + ";\n";
}

std::string dendrogram_merges_csv(const Dendrogram& dendrogram) {
  std::string out = "step,cluster_a,cluster_b,height,size\n";
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const Merge& m = dendrogram.merges[k];
    out += fmt::format("{},{},{},{},{}\n", k, m.a, m.b, format_number(m.height), m.size);
  }
  return out;
}

std::string mds_csv(const MdsEmbedding& embedding) {
  static const char* axes[] = {"x", "y", "z"};
  std::string out = "ticker";
  const auto dims = embedding.coordinates.cols();
  for (Eigen::Index k = 0; k < dims; ++k) {
    out += k < 3 ? fmt::format(",{}", axes[k]) : fmt::format(",x{}", k + 1);
  }
  out += "\n";
  for (Eigen::Index i = 0; i < embedding.coordinates.rows(); ++i) {
    out += embedding.tickers[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < dims; ++k) {
      out += "," + format_number(embedding.coordinates(i, k));
    }
    out += "\n";
  }
  return out;
}

json mds_json(const MdsEmbedding& embedding) {
  json j;
  j["stress"] = round15(embedding.stress);
  j["dims"] = embedding.coordinates.cols();
  j["effective_dims"] = embedding.effective_dims;
  j["refined"] = embedding.refined;
  j["iterations"] = embedding.iterations;
  j["negative_eigen_mass"] = round15(embedding.negative_mass);
  std::vector<double> spectrum;
  for (Eigen::Index k = 0; k < embedding.eigen_spectrum.size(); ++k) {
    spectrum.push_back(round15(embedding.eigen_spectrum(k)));
  }
  j["eigen_spectrum"] = spectrum;
  j["warnings"] = embedding.warnings;
  return j;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open manifest {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse, fmt::format("{}: empty manifest", path.string()));
  }
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) {
      while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
      while (!field.empty() && field.front() == ' ') field.erase(0, 1);
      out.push_back(field);
    }
    return out;
  };
  const auto header = split(line);
  const auto column = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto ticker_col = column("ticker");
  if (ticker_col < 0) {
    throw Error(ErrorCode::parse, fmt::format("{}: manifest needs a 'ticker' column",
                                              path.string()));
  }
  const auto sector_col = column("sector");
  const auto name_col = column("name");
  Manifest m;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (static_cast<std::ptrdiff_t>(fields.size()) <= ticker_col) continue;
    const std::string& ticker = fields[static_cast<std::size_t>(ticker_col)];
    m.tickers.push_back(ticker);
    if (sector_col >= 0 && static_cast<std::ptrdiff_t>(fields.size()) > sector_col &&
        !fields[static_cast<std::size_t>(sector_col)].empty()) {
      m.sector[ticker] = fields[static_cast<std::size_t>(sector_col)];
    }
    if (name_col >= 0 && static_cast<std::ptrdiff_t>(fields.size()) > name_col) {
      m.name[ticker] = fields[static_cast<std::size_t>(name_col)];
    }
  }
  return m;
}

std::string mds_svg(const MdsEmbedding& embedding, const Manifest* manifest) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  constexpr double size = 640.0;
  constexpr double margin = 60.0;
  const auto& x = embedding.coordinates;
  const Eigen::Index n = x.rows();
  const auto coord = [&](Eigen::Index i, Eigen::Index k) {
    return k < x.cols() ? x(i, k) : 0.0;
  };
  double extent = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    extent = std::max({extent, std::abs(coord(i, 0)), std::abs(coord(i, 1))});
  }
  if (extent <= 0.0) extent = 1.0;
  const double scale = (size / 2.0 - margin) / extent;

  std::vector<std::string> classes;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\">\n"
      "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "  <line x1=\"{1}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"#ccc\"/>\n"
      "  <line x1=\"{2}\" y1=\"{1}\" x2=\"{2}\" y2=\"{3}\" stroke=\"#ccc\"/>\n",
      size, margin / 2.0, size / 2.0, size - margin / 2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string& ticker = embedding.tickers[static_cast<std::size_t>(i)];
    std::string colour = "#333333";
    std::string css_class = "point";
    if (manifest) {
      const auto it = manifest->sector.find(ticker);
      if (it != manifest->sector.end()) {
        auto pos = std::find(classes.begin(), classes.end(), it->second);
        if (pos == classes.end()) {
          classes.push_back(it->second);
          pos = classes.end() - 1;
        }
        colour = palette[static_cast<std::size_t>(pos - classes.begin()) % std::size(palette)];
        css_class = "point sector-" + xml_escape(it->second);
      }
    }
    // SVG y grows downward.
    const double px = size / 2.0 + scale * coord(i, 0);
    const double py = size / 2.0 - scale * coord(i, 1);
    out += fmt::format(
        "  <g class=\"{}\"><circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" font-family=\"sans-serif\">{}</text>"
        "</g>\n",
        css_class, px, py, colour, px + 6.0, py - 6.0, xml_escape(ticker));
  }
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out += fmt::format(
        "  <text x=\"10\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\" "
        "fill=\"{}\">{}</text>\n",
        16 + 14 * k, palette[k % std::size(palette)], xml_escape(classes[k]));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mesonet::io
