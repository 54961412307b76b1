#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mlrec/graph.hpp"

namespace mlrec {

// Schema file layout:
//   {"entity_types": ["person", ...],
//    "roles":  [{"id": "p-act", "type": "person"}, ...],
//    "layers": [{"id": "acts_in", "source": "p-act", "target": "f-act", "directed": false}, ...]}
RoleSchema parse_schema(std::string_view json_text);
RoleSchema load_schema(const std::filesystem::path& path);
std::string schema_to_json(const RoleSchema& schema);

struct GraphInput {
  EntitySet entities;
  RoleSchema schema;
  std::vector<IntraLayerBlock> blocks;
};

// Edge file: header `layer,source,target,weight`, one intralayer edge per
// row. Entities are created in order of first appearance and take the type of
// the role they appear in. Listing an undirected edge in both directions
// counts it twice. When `entities` is given, that list fixes the order
// instead and every edge endpoint must be in it.
GraphInput load_edges(const std::filesystem::path& path, const RoleSchema& schema,
                      const EntitySet* entities = nullptr);

SupraAdjacency load_graph(const std::filesystem::path& schema_path, const std::filesystem::path& edges_path);

// Reads a directory written by write_graph_artifacts (schema.json, edges.csv
// and, when present, entities.tsv).
SupraAdjacency load_graph_dir(const std::filesystem::path& dir);

// Writes schema.json, entities.tsv, edges.csv, nodes.tsv, supra.mtx and
// manifest.json. `extra` lands in the manifest as string fields.
void write_graph_artifacts(const std::filesystem::path& dir, const SupraAdjacency& graph,
                           const std::map<std::string, std::string>& extra = {});

void write_edges(const std::filesystem::path& path, const SupraAdjacency& graph);

// "a=b,c=d" -> {a: b, c: d}
std::map<std::string, std::string> parse_merge_spec(std::string_view text);

}  // namespace mlrec
