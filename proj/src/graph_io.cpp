#include "mlrec/graph_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw InputError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

RoleSchema parse_schema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("schema: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("schema: top level must be an object");
  RoleSchema schema;
  if (doc.contains("entity_types")) {
    for (const auto& t : doc.at("entity_types")) {
      if (!t.is_string()) throw InputError("schema: entity_types must be strings");
      schema.entity_types.push_back(t.get<std::string>());
    }
  }
  const json& roles = require(doc, "roles", "schema");
  if (!roles.is_array()) throw InputError("schema: 'roles' must be an array");
  for (std::size_t i = 0; i < roles.size(); ++i) {
    const std::string where = "schema roles[" + std::to_string(i) + "]";
    schema.roles.push_back({require_string(roles[i], "id", where), require_string(roles[i], "type", where)});
  }
  const json& layers = require(doc, "layers", "schema");
  if (!layers.is_array()) throw InputError("schema: 'layers' must be an array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string where = "schema layers[" + std::to_string(i) + "]";
    Layer layer{require_string(layers[i], "id", where), require_string(layers[i], "source", where),
                require_string(layers[i], "target", where), false};
    if (layers[i].contains("directed")) {
      if (!layers[i]["directed"].is_boolean()) throw InputError(where + ": 'directed' must be true or false");
      layer.directed = layers[i]["directed"].get<bool>();
    }
    schema.layers.push_back(std::move(layer));
  }
  schema.validate();
  return schema;
}

RoleSchema load_schema(const fs::path& path) {
  try {
    return parse_schema(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string schema_to_json(const RoleSchema& schema) {
  ordered_json doc;
  doc["entity_types"] = schema.entity_types;
  doc["roles"] = ordered_json::array();
  for (const auto& r : schema.roles) doc["roles"].push_back({{"id", r.id}, {"type", r.entity_type}});
  doc["layers"] = ordered_json::array();
  for (const auto& l : schema.layers) {
    doc["layers"].push_back({{"id", l.id}, {"source", l.source_role}, {"target", l.target_role}, {"directed", l.directed}});
  }
  return doc.dump(2) + "\n";
}

GraphInput load_edges(const fs::path& path, const RoleSchema& schema, const EntitySet* entities) {
  schema.validate();
  struct Raw {
    std::size_t layer;
    std::size_t source;
    std::size_t target;
    double weight;
  };
  GraphInput out;
  out.schema = schema;
  if (entities) out.entities = *entities;
  std::vector<Raw> raw;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

  auto entity_for = [&](const std::string& id, const std::string& type, std::size_t line) {
    if (auto e = out.entities.find(id)) {
      if (out.entities[*e].type != type) {
        throw InputError(path.string() + ":" + std::to_string(line) + ": entity '" + id + "' used as '" + type +
                         "' but already has type '" + out.entities[*e].type + "'");
      }
      return *e;
    }
    if (entities) {
      throw InputError(path.string() + ":" + std::to_string(line) + ": entity '" + id + "' is not in the entity list");
    }
    return out.entities.add(id, type);
  };

  std::vector<std::string> header;
  read_delimited(
      path, ',',
      [&](std::size_t line, const std::vector<std::string>& f) {
        const std::string where = path.string() + ":" + std::to_string(line);
        if (f.size() != 4) throw InputError(where + ": expected 4 fields, got " + std::to_string(f.size()));
        const auto layer = schema.layer_index(f[0]);
        if (!layer) throw InputError(where + ": unknown layer '" + f[0] + "'");
        const Layer& l = schema.layers[*layer];
        double w = 0.0;
        try {
          w = parse_double(f[3]);
        } catch (const InputError& e) {
          throw InputError(where + ": " + e.what());
        }
        if (!(w > 0.0) || !std::isfinite(w)) throw InputError(where + ": weight must be positive and finite");
        const std::size_t s = entity_for(f[1], schema.role(l.source_role).entity_type, line);
        const std::size_t t = entity_for(f[2], schema.role(l.target_role).entity_type, line);
        if (!seen.emplace(*layer, s, t).second) {
          throw InputError(where + ": duplicate edge " + f[1] + " -> " + f[2] + " in layer '" + f[0] + "'");
        }
        raw.push_back({*layer, s, t, w});
      },
      &header);
  if (header.size() != 4 || header[0] != "layer" || header[1] != "source" || header[2] != "target" ||
      header[3] != "weight") {
    throw InputError(path.string() + ": header must be layer,source,target,weight");
  }

  std::vector<std::vector<Triplet>> triplets(schema.layers.size());
  for (const auto& r : raw) {
    triplets[r.layer].push_back({out.entities.local_index(r.target), out.entities.local_index(r.source), r.weight});
  }
  for (std::size_t l = 0; l < schema.layers.size(); ++l) {
    const Layer& layer = schema.layers[l];
    const std::size_t rows = out.entities.count(schema.role(layer.target_role).entity_type);
    const std::size_t cols = out.entities.count(schema.role(layer.source_role).entity_type);
    out.blocks.push_back({layer.id, CscMatrix::from_triplets(rows, cols, std::move(triplets[l]))});
  }
  return out;
}

SupraAdjacency load_graph(const fs::path& schema_path, const fs::path& edges_path) {
  GraphInput in = load_edges(edges_path, load_schema(schema_path));
  return build_supra_adjacency(std::move(in.entities), std::move(in.schema), std::move(in.blocks));
}

namespace {

EntitySet load_entities(const fs::path& path) {
  EntitySet entities;
  std::vector<std::string> header;
  read_delimited(
      path, '\t',
      [&](std::size_t line, const std::vector<std::string>& f) {
        if (f.size() != 2) throw InputError(path.string() + ":" + std::to_string(line) + ": expected id and type");
        entities.add(f[0], f[1]);
      },
      &header);
  return entities;
}

}  // namespace

SupraAdjacency load_graph_dir(const fs::path& dir) {
  const RoleSchema schema = load_schema(dir / "schema.json");
  const fs::path entity_path = dir / "entities.tsv";
  GraphInput in;
  if (fs::exists(entity_path)) {
    const EntitySet entities = load_entities(entity_path);
    in = load_edges(dir / "edges.csv", schema, &entities);
  } else {
    in = load_edges(dir / "edges.csv", schema);
  }
  return build_supra_adjacency(std::move(in.entities), std::move(in.schema), std::move(in.blocks));
}

void write_edges(const fs::path& path, const SupraAdjacency& graph) {
  const EntitySet& entities = graph.entities();
  const RoleSchema& schema = graph.schema();
  std::ostringstream out;
  out << "layer,source,target,weight\n";
  for (const auto& block : graph.layer_blocks()) {
    const Layer& layer = schema.layers[*schema.layer_index(block.layer_id)];
    const auto sources = entities.of_type(schema.role(layer.source_role).entity_type);
    const auto targets = entities.of_type(schema.role(layer.target_role).entity_type);
    for (const auto& t : block.edges.triplets()) {
      out << quote_field(layer.id) << ',' << quote_field(entities[sources[t.col]].id) << ','
          << quote_field(entities[targets[t.row]].id) << ',' << format_double(t.value) << '\n';
    }
  }
  write_file(path, out.str());
}

void write_graph_artifacts(const fs::path& dir, const SupraAdjacency& graph,
                           const std::map<std::string, std::string>& extra) {
  fs::create_directories(dir);
  write_file(dir / "schema.json", schema_to_json(graph.schema()));
  write_edges(dir / "edges.csv", graph);

  std::ostringstream ents;
  ents << "id\ttype\n";
  for (const auto& e : graph.entities()) ents << e.id << '\t' << e.type << '\n';
  write_file(dir / "entities.tsv", ents.str());

  // Active means the node has intralayer edges in its role.
  std::ostringstream nodes;
  nodes << "node\tentity\trole\ttype\tactive\n";
  for (std::size_t n = 0; n < graph.size(); ++n) {
    const NodeRef ref = graph.node_ref(n);
    const auto& role = graph.schema().roles[ref.role];
    const double degree = graph.couplings().degrees.at(role.id)[graph.entities().local_index(ref.entity)];
    nodes << n << '\t' << graph.entities()[ref.entity].id << '\t' << role.id << '\t' << role.entity_type << '\t'
          << (degree > 0.0 ? 1 : 0) << '\n';
  }
  write_file(dir / "nodes.tsv", nodes.str());

  const CscMatrix& a = graph.matrix();
  std::ostringstream mtx;
  mtx << "%%MatrixMarket matrix coordinate real general\n";
  mtx << "% rows are targets, columns are sources; graph " << graph.hash() << '\n';
  mtx << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (const auto& t : a.triplets()) mtx << t.row + 1 << ' ' << t.col + 1 << ' ' << format_double(t.value) << '\n';
  write_file(dir / "supra.mtx", mtx.str());

  ordered_json manifest;
  manifest["graph_hash"] = graph.hash();
  manifest["nodes"] = graph.size();
  manifest["nonzeros"] = a.nnz();
  manifest["entities"] = graph.entities().size();
  ordered_json types = ordered_json::object();
  for (const auto& [type, count] : graph.entities().type_counts()) types[type] = count;
  manifest["entity_types"] = types;
  ordered_json roles = ordered_json::array();
  for (std::size_t r = 0; r < graph.schema().roles.size(); ++r) {
    roles.push_back({{"id", graph.schema().roles[r].id},
                     {"offset", graph.role_offset(r)},
                     {"size", graph.role_size(r)}});
  }
  manifest["roles"] = roles;
  ordered_json files = ordered_json::object();
  for (const char* name : {"schema.json", "entities.tsv", "edges.csv", "nodes.tsv", "supra.mtx"}) {
    files[name] = Hasher().update(read_file(dir / name)).hex();
  }
  manifest["files"] = files;
  for (const auto& [k, v] : extra) manifest[k] = v;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::map<std::string, std::string> parse_merge_spec(std::string_view text) {
  std::map<std::string, std::string> spec;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw InputError("merge entry '" + std::string(item) + "' must look like role=merged_role");
    }
    const std::string from(item.substr(0, eq));
    if (!spec.emplace(from, std::string(item.substr(eq + 1))).second) {
      throw InputError("role '" + from + "' appears twice in merge spec");
    }
  }
  return spec;
}

}  // namespace mlrec
