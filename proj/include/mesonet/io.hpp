#pragma once

// File exports shared by the CLI. Numbers are written with 15 significant
// digits so outputs diff cleanly across implementations.

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mesonet/netgeo.hpp"
#include "mesonet/panel.hpp"
#include "mesonet/partialcorr.hpp"
#include "mesonet/recurrence.hpp"
#include "mesonet/spectral.hpp"

namespace mesonet::io {

using nlohmann::json;

/// "%.15g"; NaN becomes an empty string.
std::string format_number(double value);
/// Value rounded to 15 significant digits (for JSON emission).
double round15(double value);

void write_text(const std::filesystem::path& path, const std::string& contents);
void write_json(const std::filesystem::path& path, const json& value);

/// Header `ticker,<t1>,...`, then one labelled row per ticker.
std::string matrix_csv(const std::vector<std::string>& tickers, const Eigen::MatrixXd& values);

/// Wide `date,<ticker>...` price table.
void write_wide_prices(std::ostream& out, const PricePanel& panel);

// recurrence
std::string recurrence_coo_csv(const RecurrenceMatrix& rm);
/// Binary PGM (P5): black pixel = recurrence; row i from the top.
std::string recurrence_pgm(const RecurrenceMatrix& rm);
json rqa_json(const RqaReport& report, const EmbeddingConfig& config,
              std::size_t embedded_points);

// spectral
json histogram_json(const Histogram& h);
json modes_json(const ModeDecomposition& d, const std::vector<double>& iprs,
                const MpBounds* bounds);

// partial correlations
/// Long table x,y,z,d for every distinct triple.
std::string influence_tensor_csv(const PartialCorrelationSet& pc);

// network geometry
std::string mst_dot(const SpanningTree& tree);
std::string mst_edges_csv(const SpanningTree& tree);
std::string dendrogram_newick(const Dendrogram& dendrogram);
std::string dendrogram_merges_csv(const Dendrogram& dendrogram);
std::string mds_csv(const MdsEmbedding& embedding);
json mds_json(const MdsEmbedding& embedding);

/// Ticker -> sector class. Reads CSV with a `ticker` column and an optional
/// `sector` column; rows without a sector are left out of the map.
struct Manifest {
  std::vector<std::string> tickers;
  std::map<std::string, std::string> sector;
  std::map<std::string, std::string> name;
};
Manifest read_manifest(const std::filesystem::path& path);

/// Scatter of the first two coordinates with ticker labels; points are
/// coloured by sector class when a manifest is supplied.
std::string mds_svg(const MdsEmbedding& embedding, const Manifest* manifest);

}  // namespace mesonet::io
