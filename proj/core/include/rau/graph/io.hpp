#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rau/graph/ops.hpp"
#include "rau/graph/types.hpp"

namespace rau::graph {

/// One relation of a dataset directory before projection.
struct NamedIncidence {
  std::string name;
  IncidenceMatrix incidence;
  std::vector<std::string> entity_ids;  // index -> external id; may be empty
};

/// Reads a dataset directory:
///   features.csv        node_id,f0,...,f{d-1}   (defines node order)
///   labels.csv          node_id,label           (label 0, 1 or empty)
///   incidence_<r>.csv   node_id,entity_id
///   edges_<r>.csv       src,dst                 (pre-built relation)
/// Relations are ordered by name. Throws ValidationError on malformed input.
MultiRelationGraph load_dataset_dir(const std::filesystem::path& dir, const RelationBuildOptions& options = {});

/// Writes features.csv, labels.csv and one incidence_<name>.csv per relation.
void write_dataset_dir(const std::filesystem::path& dir, const Matrix& features, const std::vector<Label>& labels,
                       const std::vector<std::string>& node_ids, const std::vector<NamedIncidence>& relations);

/// node_index.csv: node_id,index
void write_node_index(const std::filesystem::path& path, const std::vector<std::string>& node_ids);

/// Binary cache ("RAUG", version 1) holding the projected graph.
void save_graph_bin(const std::filesystem::path& path, const MultiRelationGraph& g);
MultiRelationGraph load_graph_bin(const std::filesystem::path& path);

/// A dataset directory or a graph.bin cache.
MultiRelationGraph load_graph(const std::filesystem::path& path, const RelationBuildOptions& options = {});

}  // namespace rau::graph
