#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mlrec/sparse.hpp"

namespace mlrec {

struct Entity {
  std::string id;
  std::string type;
};

// Typed entities of a knowledge graph. Entities keep their insertion order;
// within a type, an entity's local index is its position among entities of
// that type. Node ordering in the supra-adjacency derives from both.
class EntitySet {
 public:
  std::size_t add(std::string id, std::string type);

  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }
  const Entity& operator[](std::size_t i) const { return entities_[i]; }
  auto begin() const { return entities_.begin(); }
  auto end() const { return entities_.end(); }

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t local_index(std::size_t entity) const { return local_[entity]; }
  std::span<const std::size_t> of_type(std::string_view type) const;
  std::size_t count(std::string_view type) const;
  const std::map<std::string, std::size_t, std::less<>>& type_counts() const { return counts_; }

 private:
  std::vector<Entity> entities_;
  std::vector<std::size_t> local_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_type_;
  std::map<std::string, std::size_t, std::less<>> counts_;
};

struct Role {
  std::string id;
  std::string entity_type;
};

// One relationship type. Edges run from source-role nodes to target-role
// nodes; undirected layers are mirrored into the transposed block.
struct Layer {
  std::string id;
  std::string source_role;
  std::string target_role;
  bool directed = false;
};

struct RoleSchema {
  std::vector<std::string> entity_types;
  std::vector<Role> roles;
  std::vector<Layer> layers;

  std::optional<std::size_t> role_index(std::string_view id) const;
  std::optional<std::size_t> layer_index(std::string_view id) const;
  const Role& role(std::string_view id) const;

  // Unique ids, layers reference declared roles, roles reference declared
  // entity types (when any are declared).
  void validate() const;
};

// (target role, source role) of a block in the supra-adjacency. Rows belong
// to the target role, columns to the source role.
struct BlockKey {
  std::string target;
  std::string source;
  auto operator<=>(const BlockKey&) const = default;
};

// Blocks that may hold non-zeros given only the schema: every layer (and its
// mirror when undirected) plus couplings between distinct roles of one
// entity type. Ordered by target role then source role, in schema order.
std::vector<BlockKey> structural_blocks(const RoleSchema& schema);

// Adjacency of one layer. Rows are indexed by the local index of target-role
// entities, columns by the local index of source-role entities.
struct IntraLayerBlock {
  std::string layer_id;
  CscMatrix edges;
};

// Weighted degree of every entity in every role, and the ordered role pairs
// that receive a coupling block. The block (r1, r2) is diag(degrees[r1]).
struct InterlayerCouplings {
  std::map<std::string, std::vector<double>, std::less<>> degrees;
  std::vector<BlockKey> blocks;

  const std::vector<double>& diagonal(const BlockKey& key) const { return degrees.at(key.target); }
};

InterlayerCouplings compute_interlayer_couplings(const EntitySet& entities, const RoleSchema& schema,
                                                 std::span<const IntraLayerBlock> blocks);

struct BlockInfo {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
  std::vector<std::string> layers;  // intralayer contributions
  bool coupling = false;
};

struct NodeRef {
  std::size_t entity;
  std::size_t role;
};

// Immutable supra-adjacency A = B + Lambda of a multilayer network. Nodes are
// grouped by role in schema order; within a role, by entity local index.
class SupraAdjacency {
 public:
  const EntitySet& entities() const { return entities_; }
  const RoleSchema& schema() const { return schema_; }
  std::span<const IntraLayerBlock> layer_blocks() const { return blocks_; }
  const InterlayerCouplings& couplings() const { return couplings_; }
  const CscMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return matrix_.rows(); }

  const std::map<BlockKey, BlockInfo>& block_index() const { return block_index_; }
  std::size_t role_offset(std::size_t role) const { return role_offset_[role]; }
  std::size_t role_size(std::size_t role) const { return role_offset_[role + 1] - role_offset_[role]; }

  std::optional<std::size_t> find_node(std::string_view entity_id, std::string_view role_id) const;
  // Throws UnknownEntityError with near misses.
  std::size_t node(std::string_view entity_id, std::string_view role_id) const;
  std::vector<std::size_t> entity_nodes(std::size_t entity) const;
  NodeRef node_ref(std::size_t node) const;
  std::string node_label(std::size_t node) const;

  CscMatrix extract_block(const BlockKey& key) const;
  // Sum of all intralayer entries (couplings excluded).
  double intralayer_total() const;
  const std::string& hash() const { return hash_; }

 private:
  friend SupraAdjacency build_supra_adjacency(EntitySet, RoleSchema, std::vector<IntraLayerBlock>);

  EntitySet entities_;
  RoleSchema schema_;
  std::vector<IntraLayerBlock> blocks_;
  InterlayerCouplings couplings_;
  CscMatrix matrix_;
  std::vector<std::size_t> role_offset_;
  std::map<BlockKey, BlockInfo> block_index_;
  std::string hash_;
};

// Validates the blocks against the schema and assembles A. One block per
// layer is required; every entity needs at least one intralayer edge.
SupraAdjacency build_supra_adjacency(EntitySet entities, RoleSchema schema, std::vector<IntraLayerBlock> blocks);

// Relabels roles (role -> merged role). Layers touching merged roles share a
// block and are summed; couplings among merged roles disappear.
SupraAdjacency merge_roles(const SupraAdjacency& graph, const std::map<std::string, std::string>& merge_spec);

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct DistanceTable {
  std::vector<std::size_t> sources;
  std::vector<std::size_t> targets;
  std::vector<std::uint32_t> hops;  // sources.size() x targets.size(), row-major

  std::uint32_t at(std::size_t source_pos, std::size_t target_pos) const {
    return hops[source_pos * targets.size() + target_pos];
  }
};

// Breadth-first hop counts on the binarised, symmetrised supra-adjacency.
class GeodesicIndex {
 public:
  explicit GeodesicIndex(const SupraAdjacency& graph);

  std::size_t size() const { return offsets_.size() - 1; }
  std::span<const std::size_t> neighbours(std::size_t node) const;

  // Sources run in parallel, each with private frontier state.
  DistanceTable distances(std::span<const std::size_t> sources, std::span<const std::size_t> targets) const;
  std::vector<std::uint32_t> bfs(std::size_t source) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbours_;
};

DistanceTable shortest_path_lengths(const SupraAdjacency& graph, std::span<const std::size_t> sources,
                                    std::span<const std::size_t> targets);

}  // namespace mlrec
