#include "fixtures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace mlrec::testing {

GraphInput to_input(const RawGraph& raw) {
  GraphInput in;
  in.schema = raw.schema;
  for (const auto& e : raw.entities) in.entities.add(e.id, e.type);
  std::map<std::string, std::vector<Triplet>> triplets;
  for (const auto& e : raw.edges) {
    triplets[e.layer].push_back({in.entities.local_index(*in.entities.find(e.target)),
                                 in.entities.local_index(*in.entities.find(e.source)), e.weight});
  }
  for (const auto& layer : raw.schema.layers) {
    const auto rows = in.entities.count(raw.schema.role(layer.target_role).entity_type);
    const auto cols = in.entities.count(raw.schema.role(layer.source_role).entity_type);
    in.blocks.push_back({layer.id, CscMatrix::from_triplets(rows, cols, triplets[layer.id])});
  }
  return in;
}

SupraAdjacency build(const RawGraph& raw) {
  GraphInput in = to_input(raw);
  return build_supra_adjacency(std::move(in.entities), std::move(in.schema), std::move(in.blocks));
}

RawGraph random_multilayer(std::mt19937_64& rng, std::size_t min_nodes, std::size_t max_nodes, int min_layers,
                           int max_layers) {
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    RawGraph g;
    const std::size_t n_types = uniform_int(1, 3);
    const std::size_t n_roles = uniform_int(std::max<std::size_t>(2, n_types), 5);
    for (std::size_t t = 0; t < n_types; ++t) g.schema.entity_types.push_back("t" + std::to_string(t));
    std::vector<std::size_t> role_type(n_roles);
    for (std::size_t r = 0; r < n_roles; ++r) role_type[r] = r < n_types ? r : uniform_int(0, n_types - 1);
    std::shuffle(role_type.begin(), role_type.end(), rng);
    for (std::size_t r = 0; r < n_roles; ++r) {
      g.schema.roles.push_back({"r" + std::to_string(r), g.schema.entity_types[role_type[r]]});
    }
    std::vector<std::size_t> count(n_types);
    std::size_t nodes = 0;
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (auto& c : count) c = uniform_int(2, 40);
      nodes = 0;
      for (std::size_t r = 0; r < n_roles; ++r) nodes += count[role_type[r]];
      if (nodes >= min_nodes && nodes <= max_nodes) break;
    }
    if (nodes < min_nodes || nodes > max_nodes) continue;

    // Layers; every type must be touched by some layer.
    const int n_layers = static_cast<int>(uniform_int(min_layers, max_layers));
    std::vector<std::size_t> uncovered(n_types);
    for (std::size_t t = 0; t < n_types; ++t) uncovered[t] = t;
    std::shuffle(uncovered.begin(), uncovered.end(), rng);
    auto pick_role = [&]() {
      if (!uncovered.empty()) {
        const std::size_t t = uncovered.back();
        uncovered.pop_back();
        std::vector<std::size_t> of_type;
        for (std::size_t r = 0; r < n_roles; ++r) {
          if (role_type[r] == t) of_type.push_back(r);
        }
        return of_type[uniform_int(0, of_type.size() - 1)];
      }
      return uniform_int(0, n_roles - 1);
    };
    for (int l = 0; l < n_layers; ++l) {
      const std::size_t s = pick_role();
      const std::size_t t = unit(rng) < 0.2 ? s : pick_role();
      g.schema.layers.push_back({"l" + std::to_string(l), g.schema.roles[s].id, g.schema.roles[t].id, unit(rng) < 0.3});
    }
    if (!uncovered.empty()) continue;

    std::vector<std::vector<std::string>> ids(n_types);
    for (std::size_t t = 0; t < n_types; ++t) {
      for (std::size_t i = 0; i < count[t]; ++i) {
        ids[t].push_back("t" + std::to_string(t) + "e" + std::to_string(i));
        g.entities.push_back({ids[t].back(), g.schema.entity_types[t]});
      }
    }
    std::shuffle(g.entities.begin(), g.entities.end(), rng);
    // Local index follows insertion order, so re-derive each type's order.
    for (auto& v : ids) v.clear();
    for (const auto& e : g.entities) ids[static_cast<std::size_t>(e.type[1] - '0')].push_back(e.id);

    std::set<std::string> active;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    auto add_edge = [&](const Layer& layer, const std::string& s, const std::string& t, double w) {
      const bool unipartite_undirected = !layer.directed && layer.source_role == layer.target_role;
      const auto key = unipartite_undirected ? std::tuple(layer.id, std::min(s, t), std::max(s, t))
                                             : std::tuple(layer.id, s, t);
      if (!seen.insert(key).second) return;
      g.edges.push_back({layer.id, s, t, w});
      active.insert(s);
      active.insert(t);
    };
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    for (const auto& layer : g.schema.layers) {
      const auto& src = ids[role_type[*g.schema.role_index(layer.source_role)]];
      const auto& dst = ids[role_type[*g.schema.role_index(layer.target_role)]];
      const double density = 0.05 + 0.25 * unit(rng);
      for (const auto& s : src) {
        for (const auto& t : dst) {
          if (unit(rng) < density) add_edge(layer, s, t, weight(rng));
        }
      }
    }
    for (const auto& e : g.entities) {
      if (active.contains(e.id)) continue;
      const std::size_t t = static_cast<std::size_t>(e.type[1] - '0');
      for (const auto& layer : g.schema.layers) {
        const std::size_t st = role_type[*g.schema.role_index(layer.source_role)];
        const std::size_t tt = role_type[*g.schema.role_index(layer.target_role)];
        if (st == t) {
          add_edge(layer, e.id, ids[tt][uniform_int(0, ids[tt].size() - 1)], weight(rng));
          break;
        }
        if (tt == t) {
          add_edge(layer, ids[st][uniform_int(0, ids[st].size() - 1)], e.id, weight(rng));
          break;
        }
      }
    }
    return g;
  }
}

SalienceMatrix random_salience(const RoleSchema& schema, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(0.05, 2.0);
  SalienceMatrix s;
  for (const auto& key : structural_blocks(schema)) s.set(key.target, key.source, value(rng));
  return s;
}

RawGraph toy_film_kg() {
  RawGraph g;
  g.schema.entity_types = {"film", "person", "company"};
  g.schema.roles = {{"f-act", "film"},  {"f-dir", "film"},  {"f-prod", "film"},  {"p-act", "person"},
                    {"p-dir", "person"}, {"p-inf", "person"}, {"c-prod", "company"}};
  g.schema.layers = {{"act", "p-act", "f-act", false},
                     {"dir", "p-dir", "f-dir", false},
                     {"prod", "c-prod", "f-prod", false},
                     {"infl", "p-inf", "p-inf", true}};
  g.entities = {{"Quentin Tarantino", "person"}, {"Pulp Fiction", "film"},     {"From Dusk Till Dawn", "film"},
                {"Samuel L. Jackson", "person"}, {"Jackie Brown", "film"},     {"Robert Rodriguez", "person"},
                {"Miramax", "company"},          {"Dimension Films", "company"}};
  g.edges = {{"act", "Quentin Tarantino", "Pulp Fiction", 0.25},
             {"act", "Quentin Tarantino", "From Dusk Till Dawn", 0.5},
             {"act", "Samuel L. Jackson", "Pulp Fiction", 0.75},
             {"act", "Samuel L. Jackson", "Jackie Brown", 1.0},
             {"dir", "Quentin Tarantino", "Pulp Fiction", 1.0},
             {"dir", "Quentin Tarantino", "Jackie Brown", 1.0},
             {"dir", "Robert Rodriguez", "From Dusk Till Dawn", 1.0},
             {"prod", "Miramax", "Pulp Fiction", 1.0},
             {"prod", "Miramax", "Jackie Brown", 1.0},
             {"prod", "Dimension Films", "From Dusk Till Dawn", 1.0},
             {"infl", "Quentin Tarantino", "Robert Rodriguez", 1.0}};
  return g;
}

std::map<std::pair<std::string, std::string>, std::size_t> oracle_node_index(const RawGraph& raw) {
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::size_t next = 0;
  for (const auto& role : raw.schema.roles) {
    for (const auto& e : raw.entities) {
      if (e.type == role.entity_type) index[{e.id, role.id}] = next++;
    }
  }
  return index;
}

std::size_t oracle_size(const RawGraph& raw) { return oracle_node_index(raw).size(); }

Dense oracle_supra(const RawGraph& raw) {
  const auto index = oracle_node_index(raw);
  const std::size_t n = index.size();
  Dense a(n, std::vector<double>(n, 0.0));
  std::map<std::pair<std::string, std::string>, double> degree;  // (entity, role)
  for (const auto& e : raw.edges) {
    const Layer& layer = raw.schema.layers[*raw.schema.layer_index(e.layer)];
    const std::size_t s = index.at({e.source, layer.source_role});
    const std::size_t t = index.at({e.target, layer.target_role});
    a[t][s] += e.weight;
    if (!layer.directed && s != t) a[s][t] += e.weight;
    degree[{e.target, layer.target_role}] += e.weight;
    if (s != t) degree[{e.source, layer.source_role}] += e.weight;
  }
  for (const auto& target : raw.schema.roles) {
    for (const auto& source : raw.schema.roles) {
      if (target.id == source.id || target.entity_type != source.entity_type) continue;
      for (const auto& e : raw.entities) {
        if (e.type != target.entity_type) continue;
        const auto it = degree.find({e.id, target.id});
        if (it == degree.end()) continue;
        a[index.at({e.id, target.id})][index.at({e.id, source.id})] += it->second;
      }
    }
  }
  return a;
}

Dense oracle_transition(const RawGraph& raw, const SalienceMatrix& salience) {
  const auto index = oracle_node_index(raw);
  const std::size_t n = index.size();
  std::vector<std::string> role_of(n);
  for (const auto& [key, node] : index) role_of[node] = key.second;
  Dense t = oracle_supra(raw);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (t[i][j] == 0.0) continue;
      const auto it = salience.blocks.find({role_of[i], role_of[j]});
      t[i][j] *= it == salience.blocks.end() ? 0.0 : it->second;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += t[i][j];
    for (std::size_t i = 0; i < n; ++i) t[i][j] = s > 0.0 ? t[i][j] / s : 1.0 / static_cast<double>(n);
  }
  return t;
}

std::vector<double> oracle_pagerank(const Dense& t, const std::vector<double>& v, double rho) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i) = rho * v[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = (i == j ? 1.0 : 0.0) - (1.0 - rho) * t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  const Eigen::VectorXd x = m.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

Dense to_rows(const std::vector<double>& row_major, std::size_t rows, std::size_t cols) {
  Dense d(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) d[i][j] = row_major[i * cols + j];
  }
  return d;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

PlantedKg planted_kg(std::uint64_t seed, std::size_t communities, std::size_t users, double loyalty) {
  constexpr std::size_t kMovies = 20;
  constexpr std::size_t kPeople = 12;
  constexpr std::size_t kKeywords = 6;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  PlantedKg kg;
  RawGraph& g = kg.raw;
  g.schema.entity_types = {"movie", "person", "keyword"};
  g.schema.roles = {{"movie", "movie"}, {"act", "person"}, {"dir", "person"}, {"desc", "keyword"}};
  g.schema.layers = {{"acts_in", "act", "movie", false},
                     {"directs", "dir", "movie", false},
                     {"describes", "desc", "movie", false}};
  auto id = [](char prefix, std::size_t c, std::size_t i) {
    return std::string(1, prefix) + std::to_string(c) + "_" + std::to_string(i);
  };
  kg.communities.resize(communities);
  for (std::size_t c = 0; c < communities; ++c) {
    for (std::size_t i = 0; i < kMovies; ++i) {
      g.entities.push_back({id('m', c, i), "movie"});
      kg.communities[c].push_back(g.entities.back().id);
    }
    for (std::size_t i = 0; i < kPeople; ++i) g.entities.push_back({id('p', c, i), "person"});
    for (std::size_t i = 0; i < kKeywords; ++i) g.entities.push_back({id('k', c, i), "keyword"});
  }
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  std::set<std::string> active;
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  auto add = [&](const std::string& layer, const std::string& s, const std::string& t) {
    if (!seen.insert({layer, s, t}).second) return;
    g.edges.push_back({layer, s, t, weight(rng)});
    active.insert(s);
    active.insert(t);
  };
  auto home = [&](std::size_t c) { return unit(rng) < loyalty ? c : pick(communities); };
  std::lognormal_distribution<double> pop(0.0, 1.0);
  for (std::size_t c = 0; c < communities; ++c) {
    for (std::size_t i = 0; i < kMovies; ++i) {
      const std::string m = id('m', c, i);
      for (int a = 0; a < 3; ++a) add("acts_in", id('p', home(c), pick(kPeople)), m);
      add("directs", id('p', home(c), pick(kPeople)), m);
      for (int k = 0; k < 2; ++k) {
        const std::string kw = id('k', home(c), pick(kKeywords));
        add("describes", kw, m);
        kg.keywords[m].insert(kw);
      }
      kg.popularity[m] = pop(rng);
    }
  }
  for (std::size_t c = 0; c < communities; ++c) {
    for (std::size_t i = 0; i < kPeople; ++i) {
      if (!active.contains(id('p', c, i))) add("acts_in", id('p', c, i), id('m', c, pick(kMovies)));
    }
    for (std::size_t i = 0; i < kKeywords; ++i) {
      const std::string kw = id('k', c, i);
      if (active.contains(kw)) continue;
      const std::string m = id('m', c, pick(kMovies));
      add("describes", kw, m);
      kg.keywords[m].insert(kw);
    }
  }

  for (std::size_t u = 0; u < users; ++u) {
    UserRelevance user;
    char buf[32];
    std::snprintf(buf, sizeof buf, "u%04zu", u);
    user.user_id = buf;
    const std::size_t c = pick(communities);
    const std::size_t size = 4 + pick(7);
    while (user.items.size() < size) {
      const std::size_t cc = home(c);
      user.items[kg.communities[cc][pick(kMovies)]] = static_cast<double>(1 + pick(5));
    }
    kg.users.push_back(std::move(user));
  }
  return kg;
}

std::vector<RatingRecord> planted_ratings(const PlantedKg& kg) {
  std::vector<RatingRecord> out;
  std::int64_t ts = 0;
  for (const auto& u : kg.users) {
    for (const auto& [item, tau] : u.items) out.push_back({u.user_id, item, tau, ++ts});
  }
  return out;
}

}  // namespace mlrec::testing
