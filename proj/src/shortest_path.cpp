#include <algorithm>
#include <cstdint>

#include "mlrec/error.hpp"
#include "mlrec/graph.hpp"

namespace mlrec {

GeodesicIndex::GeodesicIndex(const SupraAdjacency& graph) {
  const CscMatrix& a = graph.matrix();
  const std::size_t n = a.rows();
  // Binarise and symmetrise: j -- i whenever A_ij or A_ji is non-zero.
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i : a.column_rows(j)) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    offsets_[v + 1] = offsets_[v] + list.size();
  }
  neighbours_.reserve(offsets_.back());
  for (const auto& list : adj) neighbours_.insert(neighbours_.end(), list.begin(), list.end());
}

std::span<const std::size_t> GeodesicIndex::neighbours(std::size_t node) const {
  return std::span<const std::size_t>(neighbours_).subspan(offsets_[node], offsets_[node + 1] - offsets_[node]);
}

std::vector<std::uint32_t> GeodesicIndex::bfs(std::size_t source) const {
  if (source >= size()) throw InputError("BFS source out of range");
  std::vector<std::uint32_t> dist(size(), kUnreachable);
  std::vector<std::size_t> frontier{source};
  std::vector<std::size_t> next;
  dist[source] = 0;
  for (std::uint32_t level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (std::size_t u : frontier) {
      for (std::size_t w : neighbours(u)) {
        if (dist[w] == kUnreachable) {
          dist[w] = level;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

DistanceTable GeodesicIndex::distances(std::span<const std::size_t> sources,
                                       std::span<const std::size_t> targets) const {
  if (sources.empty() || targets.empty()) throw InputError("shortest paths need non-empty source and target sets");
  for (std::size_t t : targets) {
    if (t >= size()) throw InputError("target node out of range");
  }
  DistanceTable table{{sources.begin(), sources.end()}, {targets.begin(), targets.end()}, {}};
  table.hops.assign(sources.size() * targets.size(), kUnreachable);
  const auto count = static_cast<std::int64_t>(sources.size());
  bool bad_source = false;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t s = 0; s < count; ++s) {
    const std::size_t pos = static_cast<std::size_t>(s);
    if (sources[pos] >= size()) {
#pragma omp atomic write
      bad_source = true;
      continue;
    }
    const auto dist = bfs(sources[pos]);
    for (std::size_t t = 0; t < targets.size(); ++t) table.hops[pos * targets.size() + t] = dist[targets[t]];
  }
  if (bad_source) throw InputError("source node out of range");
  return table;
}

DistanceTable shortest_path_lengths(const SupraAdjacency& graph, std::span<const std::size_t> sources,
                                    std::span<const std::size_t> targets) {
  return GeodesicIndex(graph).distances(sources, targets);
}

}  // namespace mlrec
