#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mlrec/dynamics.hpp"
#include "mlrec/evaluation.hpp"
#include "mlrec/graph.hpp"
#include "mlrec/graph_io.hpp"

namespace mlrec::testing {

struct EdgeSpec {
  std::string layer;
  std::string source;  // entity id
  std::string target;
  double weight = 1.0;
};

// A graph as plain lists, the form the oracles below consume.
struct RawGraph {
  std::vector<Entity> entities;  // insertion order
  RoleSchema schema;
  std::vector<EdgeSpec> edges;
};

GraphInput to_input(const RawGraph& raw);
SupraAdjacency build(const RawGraph& raw);

// Roles 2..5 over 1..3 entity types, the given number of layers (mixed
// directed, undirected and unipartite), node count in [min_nodes, max_nodes],
// no isolated entities.
RawGraph random_multilayer(std::mt19937_64& rng, std::size_t min_nodes, std::size_t max_nodes, int min_layers = 2,
                           int max_layers = 4);

// Strictly positive block saliences for every structural block.
SalienceMatrix random_salience(const RoleSchema& schema, std::mt19937_64& rng);

// Three films, three people, two companies; seven roles; N = 20.
RawGraph toy_film_kg();

// --- dense oracles --------------------------------------------------------

using Dense = std::vector<std::vector<double>>;

// Node index of (entity, role): roles in schema order, entities by position
// among entities of the role's type.
std::map<std::pair<std::string, std::string>, std::size_t> oracle_node_index(const RawGraph& raw);
std::size_t oracle_size(const RawGraph& raw);
Dense oracle_supra(const RawGraph& raw);
// Column-normalised A .* alpha; empty columns become 1/N.
Dense oracle_transition(const RawGraph& raw, const SalienceMatrix& salience);
// Dense LU solve of (I - (1 - rho) T) x = rho v.
std::vector<double> oracle_pagerank(const Dense& t, const std::vector<double>& v, double rho);

Dense to_rows(const std::vector<double>& row_major, std::size_t rows, std::size_t cols);
double l1(const std::vector<double>& a, const std::vector<double>& b);

// --- planted communities --------------------------------------------------

struct PlantedKg {
  RawGraph raw;
  std::vector<std::vector<std::string>> communities;  // movie entity ids
  PopularityTable popularity;
  KeywordTable keywords;
  std::vector<UserRelevance> users;
};

// Movies, people (act, dir) and keywords in `communities` groups; edges stay
// inside a community with probability `loyalty`. Users rate movies of one
// community. With 10 communities the graph has 500 nodes.
PlantedKg planted_kg(std::uint64_t seed, std::size_t communities = 10, std::size_t users = 300,
                     double loyalty = 0.9);

// Movie ratings for the planted users, as the CLI dataset files expect.
std::vector<RatingRecord> planted_ratings(const PlantedKg& kg);

}  // namespace mlrec::testing
