#include "mlrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

std::size_t EntitySet::add(std::string id, std::string type) {
  if (id.empty()) throw InputError("entity id must not be empty");
  if (type.empty()) throw InputError("entity '" + id + "' has no type");
  if (by_id_.contains(id)) throw InputError("duplicate entity id '" + id + "'");
  const std::size_t index = entities_.size();
  auto& members = by_type_[type];
  local_.push_back(members.size());
  members.push_back(index);
  ++counts_[type];
  by_id_.emplace(id, index);
  entities_.push_back({std::move(id), std::move(type)});
  return index;
}

std::optional<std::size_t> EntitySet::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> EntitySet::of_type(std::string_view type) const {
  const auto it = by_type_.find(type);
  if (it == by_type_.end()) return {};
  return it->second;
}

std::size_t EntitySet::count(std::string_view type) const {
  const auto it = counts_.find(type);
  return it == counts_.end() ? 0 : it->second;
}

std::optional<std::size_t> RoleSchema::role_index(std::string_view id) const {
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> RoleSchema::layer_index(std::string_view id) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].id == id) return i;
  }
  return std::nullopt;
}

const Role& RoleSchema::role(std::string_view id) const {
  const auto index = role_index(id);
  if (!index) throw InputError("unknown role '" + std::string(id) + "'");
  return roles[*index];
}

void RoleSchema::validate() const {
  std::set<std::string, std::less<>> types(entity_types.begin(), entity_types.end());
  if (types.size() != entity_types.size()) throw InputError("duplicate entity type in schema");
  std::set<std::string, std::less<>> role_ids;
  for (const auto& r : roles) {
    if (r.id.empty()) throw InputError("role with empty id");
    if (!role_ids.insert(r.id).second) throw InputError("duplicate role id '" + r.id + "'");
    if (!types.empty() && !types.contains(r.entity_type)) {
      throw InputError("role '" + r.id + "' uses undeclared entity type '" + r.entity_type + "'");
    }
  }
  std::set<std::string, std::less<>> layer_ids;
  for (const auto& l : layers) {
    if (!layer_ids.insert(l.id).second) throw InputError("duplicate layer id '" + l.id + "'");
    if (!role_ids.contains(l.source_role)) {
      throw InputError("layer '" + l.id + "' references unknown role '" + l.source_role + "'");
    }
    if (!role_ids.contains(l.target_role)) {
      throw InputError("layer '" + l.id + "' references unknown role '" + l.target_role + "'");
    }
  }
}

std::vector<BlockKey> structural_blocks(const RoleSchema& schema) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;  // (target, source) role indices
  for (const auto& l : schema.layers) {
    const std::size_t s = *schema.role_index(l.source_role);
    const std::size_t t = *schema.role_index(l.target_role);
    pairs.emplace(t, s);
    if (!l.directed) pairs.emplace(s, t);
  }
  for (std::size_t t = 0; t < schema.roles.size(); ++t) {
    for (std::size_t s = 0; s < schema.roles.size(); ++s) {
      if (s != t && schema.roles[s].entity_type == schema.roles[t].entity_type) pairs.emplace(t, s);
    }
  }
  std::vector<BlockKey> out;
  out.reserve(pairs.size());
  for (const auto& [t, s] : pairs) out.push_back({schema.roles[t].id, schema.roles[s].id});
  return out;
}

namespace {

// Ties each schema layer to exactly one block and checks its shape and values.
std::vector<const IntraLayerBlock*> match_blocks(const EntitySet& entities, const RoleSchema& schema,
                                                 std::span<const IntraLayerBlock> blocks) {
  std::vector<const IntraLayerBlock*> by_layer(schema.layers.size(), nullptr);
  for (const auto& block : blocks) {
    const auto index = schema.layer_index(block.layer_id);
    if (!index) throw InputError("block for unknown layer '" + block.layer_id + "'");
    if (by_layer[*index]) throw InputError("more than one block for layer '" + block.layer_id + "'");
    by_layer[*index] = &block;
  }
  for (std::size_t l = 0; l < schema.layers.size(); ++l) {
    const Layer& layer = schema.layers[l];
    const IntraLayerBlock* block = by_layer[l];
    if (!block) throw InputError("no block provided for layer '" + layer.id + "'");
    const std::size_t rows = entities.count(schema.role(layer.target_role).entity_type);
    const std::size_t cols = entities.count(schema.role(layer.source_role).entity_type);
    if (block->edges.rows() != rows || block->edges.cols() != cols) {
      throw InputError("layer '" + layer.id + "': block is " + std::to_string(block->edges.rows()) + "x" +
                       std::to_string(block->edges.cols()) + " but roles '" + layer.target_role + "','" +
                       layer.source_role + "' need " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    for (double w : block->edges.values()) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw InputError("layer '" + layer.id + "': edge weights must be positive and finite");
      }
    }
  }
  return by_layer;
}

}  // namespace

InterlayerCouplings compute_interlayer_couplings(const EntitySet& entities, const RoleSchema& schema,
                                                 std::span<const IntraLayerBlock> blocks) {
  const auto by_layer = match_blocks(entities, schema, blocks);
  InterlayerCouplings out;
  for (const auto& role : schema.roles) {
    out.degrees[role.id].assign(entities.count(role.entity_type), 0.0);
  }
  for (std::size_t l = 0; l < schema.layers.size(); ++l) {
    const Layer& layer = schema.layers[l];
    auto& target_degree = out.degrees[layer.target_role];
    auto& source_degree = out.degrees[layer.source_role];
    const bool same_role = layer.source_role == layer.target_role;
    const CscMatrix& edges = by_layer[l]->edges;
    for (std::size_t j = 0; j < edges.cols(); ++j) {
      const auto rows = edges.column_rows(j);
      const auto vals = edges.column_values(j);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        target_degree[rows[k]] += vals[k];
        if (!same_role || rows[k] != j) source_degree[j] += vals[k];
      }
    }
  }
  for (const auto& target : schema.roles) {
    for (const auto& source : schema.roles) {
      if (target.id != source.id && target.entity_type == source.entity_type) {
        out.blocks.push_back({target.id, source.id});
      }
    }
  }
  return out;
}

SupraAdjacency build_supra_adjacency(EntitySet entities, RoleSchema schema, std::vector<IntraLayerBlock> blocks) {
  schema.validate();
  InterlayerCouplings couplings = compute_interlayer_couplings(entities, schema, blocks);

  // No isolated entities: every entity must be active in at least one role.
  std::vector<double> total_degree(entities.size(), 0.0);
  for (const auto& role : schema.roles) {
    const auto members = entities.of_type(role.entity_type);
    const auto& degree = couplings.degrees.at(role.id);
    for (std::size_t i = 0; i < members.size(); ++i) total_degree[members[i]] += degree[i];
  }
  for (std::size_t e = 0; e < entities.size(); ++e) {
    if (total_degree[e] == 0.0) {
      throw InputError("entity '" + entities[e].id + "' (" + entities[e].type + ") is isolated in every layer");
    }
  }

  std::vector<std::size_t> offset(schema.roles.size() + 1, 0);
  for (std::size_t r = 0; r < schema.roles.size(); ++r) {
    offset[r + 1] = offset[r] + entities.count(schema.roles[r].entity_type);
  }
  const std::size_t n = offset.back();

  std::vector<Triplet> triplets;
  std::map<std::string, const IntraLayerBlock*, std::less<>> by_id;
  for (const auto& b : blocks) by_id.emplace(b.layer_id, &b);
  for (const auto& layer : schema.layers) {
    const std::size_t s_off = offset[*schema.role_index(layer.source_role)];
    const std::size_t t_off = offset[*schema.role_index(layer.target_role)];
    const bool same_role = layer.source_role == layer.target_role;
    for (const auto& t : by_id.at(layer.id)->edges.triplets()) {
      triplets.push_back({t_off + t.row, s_off + t.col, t.value});
      if (!layer.directed && !(same_role && t.row == t.col)) {
        triplets.push_back({s_off + t.col, t_off + t.row, t.value});
      }
    }
  }
  for (const auto& key : couplings.blocks) {
    const std::size_t t_off = offset[*schema.role_index(key.target)];
    const std::size_t s_off = offset[*schema.role_index(key.source)];
    const auto& diag = couplings.diagonal(key);
    for (std::size_t e = 0; e < diag.size(); ++e) {
      if (diag[e] > 0.0) triplets.push_back({t_off + e, s_off + e, diag[e]});
    }
  }

  SupraAdjacency g;
  g.matrix_ = CscMatrix::from_triplets(n, n, std::move(triplets));
  g.role_offset_ = std::move(offset);

  for (const auto& key : structural_blocks(schema)) {
    const std::size_t t = *schema.role_index(key.target);
    const std::size_t s = *schema.role_index(key.source);
    BlockInfo info{g.role_offset_[t], g.role_offset_[t + 1], g.role_offset_[s], g.role_offset_[s + 1], {}, false};
    for (const auto& layer : schema.layers) {
      const bool forward = layer.target_role == key.target && layer.source_role == key.source;
      const bool mirror = !layer.directed && layer.target_role == key.source && layer.source_role == key.target;
      if (forward || mirror) info.layers.push_back(layer.id);
    }
    info.coupling = key.target != key.source && schema.roles[t].entity_type == schema.roles[s].entity_type;
    g.block_index_.emplace(key, std::move(info));
  }

  g.entities_ = std::move(entities);
  g.schema_ = std::move(schema);
  g.blocks_ = std::move(blocks);
  g.couplings_ = std::move(couplings);

  Hasher h;
  for (const auto& role : g.schema_.roles) h.update(role.id).update(role.entity_type);
  for (const auto& layer : g.schema_.layers) {
    h.update(layer.id).update(layer.source_role).update(layer.target_role);
    h.update(static_cast<std::uint64_t>(layer.directed));
  }
  for (const auto& e : g.entities_) h.update(e.id).update(e.type);
  for (std::size_t p : g.matrix_.col_ptr()) h.update(static_cast<std::uint64_t>(p));
  for (std::size_t r : g.matrix_.row_idx()) h.update(static_cast<std::uint64_t>(r));
  for (double v : g.matrix_.values()) h.update(v);
  g.hash_ = h.hex();
  return g;
}

std::optional<std::size_t> SupraAdjacency::find_node(std::string_view entity_id, std::string_view role_id) const {
  const auto entity = entities_.find(entity_id);
  const auto role = schema_.role_index(role_id);
  if (!entity || !role) return std::nullopt;
  if (schema_.roles[*role].entity_type != entities_[*entity].type) return std::nullopt;
  return role_offset_[*role] + entities_.local_index(*entity);
}

std::size_t SupraAdjacency::node(std::string_view entity_id, std::string_view role_id) const {
  if (auto n = find_node(entity_id, role_id)) return *n;
  const auto entity = entities_.find(entity_id);
  if (!entity) {
    std::vector<std::string> ids;
    ids.reserve(entities_.size());
    for (const auto& e : entities_) ids.push_back(e.id);
    throw UnknownEntityError("unknown entity '" + std::string(entity_id) + "'", near_misses(entity_id, ids));
  }
  std::vector<std::string> roles;
  for (const auto& r : schema_.roles) {
    if (r.entity_type == entities_[*entity].type) roles.push_back(r.id);
  }
  throw UnknownEntityError("entity '" + std::string(entity_id) + "' has no role '" + std::string(role_id) + "'",
                           roles);
}

std::vector<std::size_t> SupraAdjacency::entity_nodes(std::size_t entity) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < schema_.roles.size(); ++r) {
    if (schema_.roles[r].entity_type == entities_[entity].type) {
      out.push_back(role_offset_[r] + entities_.local_index(entity));
    }
  }
  return out;
}

NodeRef SupraAdjacency::node_ref(std::size_t node) const {
  const auto it = std::upper_bound(role_offset_.begin(), role_offset_.end(), node);
  const std::size_t role = static_cast<std::size_t>(it - role_offset_.begin()) - 1;
  const std::size_t local = node - role_offset_[role];
  return {entities_.of_type(schema_.roles[role].entity_type)[local], role};
}

std::string SupraAdjacency::node_label(std::size_t node) const {
  const NodeRef ref = node_ref(node);
  return entities_[ref.entity].id + "@" + schema_.roles[ref.role].id;
}

CscMatrix SupraAdjacency::extract_block(const BlockKey& key) const {
  const auto t = schema_.role_index(key.target);
  const auto s = schema_.role_index(key.source);
  if (!t || !s) throw InputError("unknown role in block (" + key.target + "," + key.source + ")");
  return matrix_.block(role_offset_[*t], role_offset_[*t + 1], role_offset_[*s], role_offset_[*s + 1]);
}

double SupraAdjacency::intralayer_total() const {
  double coupling_total = 0.0;
  for (const auto& key : couplings_.blocks) {
    for (double d : couplings_.diagonal(key)) coupling_total += d;
  }
  return matrix_.total() - coupling_total;
}

SupraAdjacency merge_roles(const SupraAdjacency& graph, const std::map<std::string, std::string>& merge_spec) {
  const RoleSchema& old = graph.schema();
  for (const auto& [from, to] : merge_spec) {
    if (!old.role_index(from)) throw InputError("merge references unknown role '" + from + "'");
    if (to.empty()) throw InputError("merged role id for '" + from + "' is empty");
  }
  auto rename = [&](const std::string& id) {
    const auto it = merge_spec.find(id);
    return it == merge_spec.end() ? id : it->second;
  };

  RoleSchema merged;
  merged.entity_types = old.entity_types;
  for (const auto& role : old.roles) {
    const std::string id = rename(role.id);
    if (const auto existing = merged.role_index(id)) {
      if (merged.roles[*existing].entity_type != role.entity_type) {
        throw InputError("cannot merge role '" + role.id + "' (" + role.entity_type + ") into '" + id + "' (" +
                         merged.roles[*existing].entity_type + "): roles of different entity types");
      }
      continue;
    }
    merged.roles.push_back({id, role.entity_type});
  }
  for (const auto& layer : old.layers) {
    merged.layers.push_back({layer.id, rename(layer.source_role), rename(layer.target_role), layer.directed});
  }
  std::vector<IntraLayerBlock> blocks(graph.layer_blocks().begin(), graph.layer_blocks().end());
  // An undirected edge between two roles of one entity appeared in both
  // mirrored blocks; as a self-loop it is placed once, so it keeps twice the
  // weight to match the summed blocks.
  for (auto& block : blocks) {
    const Layer& layer = old.layers[*old.layer_index(block.layer_id)];
    if (layer.directed || layer.source_role == layer.target_role) continue;
    if (rename(layer.source_role) != rename(layer.target_role)) continue;
    auto& edges = block.edges;
    const auto rows = edges.row_idx();
    const auto ptr = edges.col_ptr();
    auto values = edges.mutable_values();
    for (std::size_t j = 0; j < edges.cols(); ++j) {
      for (std::size_t k = ptr[j]; k < ptr[j + 1]; ++k) {
        if (rows[k] == j) values[k] *= 2.0;
      }
    }
  }
  return build_supra_adjacency(graph.entities(), std::move(merged), std::move(blocks));
}

}  // namespace mlrec
