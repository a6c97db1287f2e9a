#include "mesonet/netgeo.hpp"

namespace mesonet {

SectorAnalysis sector_pipeline(const ReturnPanel& panel, const WindowSpec& window,
                               const MdsOptions& mds_options, MstAlgorithm algorithm) {
  SectorAnalysis out;
  out.correlation = correlation_matrix(apply_window(panel, window));
  out.distance = to_distance(out.correlation);
  MdsOptions options = mds_options;
  if (out.distance.size() >= 2 && options.dims >= out.distance.size()) {
    options.dims = out.distance.size() - 1;
  }
  out.embedding = mds(out.distance, options);
  if (options.dims != mds_options.dims) {
    out.embedding.warnings.push_back("embedding dimension capped at N-1");
  }
  out.dendrogram = ward_dendrogram(out.distance);
  out.tree = mst(out.distance, algorithm);
  return out;
}

}  // namespace mesonet
