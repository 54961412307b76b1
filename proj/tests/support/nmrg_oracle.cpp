#include "support/nmrg_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mlrec::testing {

RankedList ranking(const std::string& seed, const std::vector<std::string>& ids) {
  RankedList r;
  r.seed = seed;
  double score = 1.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    r.entries.push_back({i, ids[i], score, 0.0});
    score *= 0.9;
  }
  return r;
}

double oracle_nmrg(const UserRelevance& u, const RankingMap& rankings, std::size_t k) {
  double total = 0.0;
  for (const auto& [m, tau_m] : u.items) {
    double varpi = 0.0;
    for (const auto& [other, tau] : u.items) {
      if (other != m) varpi = std::max(varpi, tau);
    }
    const auto it = rankings.find(m);
    if (it == rankings.end()) continue;
    const auto& entries = it->second.entries;
    for (std::size_t r = 0; r < entries.size() && r < k; ++r) {
      if (entries[r].id == m) continue;
      const auto hit = u.items.find(entries[r].id);
      if (hit == u.items.end()) continue;
      total += (1.0 / varpi) * hit->second / std::log2(1.0 + static_cast<double>(r + 1));
      break;
    }
  }
  return total / static_cast<double>(u.items.size());
}

NmrgCase random_nmrg_case(std::mt19937_64& rng, std::size_t users, std::size_t catalogue) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  NmrgCase c;
  std::vector<std::string> items(catalogue);
  for (std::size_t i = 0; i < catalogue; ++i) items[i] = "i" + std::to_string(i);
  for (const auto& seed : items) {
    if (pick(10) == 0) continue;
    std::vector<std::string> list = items;
    std::shuffle(list.begin(), list.end(), rng);
    list.resize(pick(catalogue));
    c.rankings[seed] = ranking(seed, list);
  }
  for (std::size_t u = 0; u < users; ++u) {
    UserRelevance r{"u" + std::to_string(u), {}};
    const std::size_t size = 2 + pick(8);
    while (r.items.size() < size) r.items[items[pick(catalogue)]] = static_cast<double>(1 + pick(5));
    c.users.push_back(std::move(r));
  }
  return c;
}

}  // namespace mlrec::testing
