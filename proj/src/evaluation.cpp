#include "mlrec/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "log.hpp"
#include "mlrec/error.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

std::optional<MaxRelevance> max_relevance_item(const RankedList& ranking, std::size_t k, const UserRelevance& user,
                                               std::string_view seed) {
  if (!user.items.contains(seed)) {
    throw InputError("seed '" + std::string(seed) + "' is not relevant to user '" + user.user_id + "'");
  }
  const std::size_t limit = std::min(k, ranking.entries.size());
  for (std::size_t r = 0; r < limit; ++r) {
    const std::string& id = ranking.entries[r].id;
    if (id != seed && user.items.contains(id)) return MaxRelevance{id, r + 1};
  }
  return std::nullopt;
}

double nmrg_user(const UserRelevance& user, const RankingMap& rankings, std::size_t k, std::size_t* missing) {
  if (user.items.size() < 2) {
    throw InputError("user '" + user.user_id + "' needs at least two relevant items");
  }
  // The two largest relevances give max over m' != m for every m.
  double first = -1.0, second = -1.0;
  for (const auto& [item, tau] : user.items) {
    if (!(tau > 0.0)) throw InputError("relevance of '" + item + "' for user '" + user.user_id + "' must be positive");
    if (tau > first) {
      second = first;
      first = tau;
    } else if (tau > second) {
      second = tau;
    }
  }
  double total = 0.0;
  for (const auto& [item, tau] : user.items) {
    const auto it = rankings.find(item);
    if (it == rankings.end()) {
      if (missing) ++*missing;
      continue;
    }
    const auto best = max_relevance_item(it->second, k, user, item);
    if (!best) continue;
    const double varpi = tau == first ? second : first;
    const double gain = user.items.find(best->item)->second;
    total += (1.0 / varpi) * gain / std::log2(1.0 + static_cast<double>(best->rank));
  }
  return total / static_cast<double>(user.items.size());
}

const CutoffSummary& EvalReport::at(std::size_t k) const {
  for (const auto& c : cutoffs) {
    if (c.k == k) return c;
  }
  throw InputError("report has no cutoff " + std::to_string(k));
}

EvalReport nmrg_corpus(std::span<const UserRelevance> users, const RankingMap& rankings,
                       std::span<const std::size_t> cutoffs) {
  if (cutoffs.empty()) throw InputError("at least one cutoff is required");
  for (std::size_t k : cutoffs) {
    if (k < 1) throw InputError("cutoffs must be at least 1");
  }
  std::vector<const UserRelevance*> eligible;
  EvalReport report;
  for (const auto& u : users) {
    if (u.items.size() < 2) {
      ++report.skipped_users;
      continue;
    }
    for (const auto& [item, tau] : u.items) {
      if (!(tau > 0.0)) throw InputError("relevance of '" + item + "' for user '" + u.user_id + "' must be positive");
    }
    eligible.push_back(&u);
  }
  if (report.skipped_users > 0) {
    detail::logger().info("{} user(s) with fewer than two relevant items skipped", report.skipped_users);
  }
  if (eligible.empty()) throw InputError("no users with at least two relevant items");
  std::sort(eligible.begin(), eligible.end(),
            [](const UserRelevance* a, const UserRelevance* b) { return a->user_id < b->user_id; });
  for (const auto* u : eligible) report.user_ids.push_back(u->user_id);

  const std::size_t n = eligible.size();
  const auto count = static_cast<std::int64_t>(n);
  std::vector<std::size_t> missing(n, 0);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    std::vector<double> scores(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      scores[k] = nmrg_user(*eligible[k], rankings, cutoffs[c], c == 0 ? &missing[k] : nullptr);
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    report.cutoffs.push_back({cutoffs[c], 100.0 * mean, 100.0 * 2.576 * sd / std::sqrt(static_cast<double>(n)), n});
    report.user_scores.push_back(std::move(scores));
  }
  for (std::size_t m : missing) report.missing_rankings += m;
  if (report.missing_rankings > 0) {
    detail::logger().warn("{} user-seed pair(s) had no ranking and scored 0", report.missing_rankings);
  }
  return report;
}

std::string format_report(const EvalReport& report, std::string_view config_hash) {
  std::ostringstream out;
  out << "# method=" << report.method << " rng_seed=" << report.rng_seed << " config_hash=" << config_hash << '\n';
  out << "# users=" << report.user_ids.size() << " skipped_users=" << report.skipped_users
      << " missing_rankings=" << report.missing_rankings << '\n';
  out << "K\tNMRG\tCI99\tusers\n";
  for (const auto& c : report.cutoffs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f\t%.2f", c.mean, c.ci_half_width);
    out << c.k << '\t' << buf << '\t' << c.users << '\n';
  }
  for (const auto& c : report.cutoffs) {
    nlohmann::ordered_json rec;
    rec["method"] = report.method;
    rec["k"] = c.k;
    rec["nmrg"] = c.mean;
    rec["ci99"] = c.ci_half_width;
    rec["users"] = c.users;
    rec["rng_seed"] = report.rng_seed;
    rec["config_hash"] = config_hash;
    out << rec.dump() << '\n';
  }
  return out.str();
}

std::vector<RatingRecord> load_rating_records(const std::filesystem::path& path) {
  std::vector<RatingRecord> out;
  std::vector<std::string> header;
  read_delimited(
      path, ',',
      [&](std::size_t line, const std::vector<std::string>& f) {
        if (f.size() != 4) {
          throw InputError(path.string() + ":" + std::to_string(line) + ": expected user_id,item_id,rating,timestamp");
        }
        try {
          out.push_back({f[0], f[1], parse_double(f[2]), parse_int(f[3])});
        } catch (const InputError& e) {
          throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
      },
      &header);
  return out;
}

void write_rating_records(const std::filesystem::path& path, std::span<const RatingRecord> records) {
  std::ostringstream out;
  out << "user_id,item_id,rating,timestamp\n";
  for (const auto& r : records) {
    out << quote_field(r.user_id) << ',' << quote_field(r.item_id) << ',' << format_double(r.rating) << ','
        << r.timestamp << '\n';
  }
  write_file(path, out.str());
}

std::vector<UserRelevance> relevance_from_ratings(std::span<const RatingRecord> records) {
  std::map<std::string, UserRelevance, std::less<>> by_user;
  for (const auto& r : records) {
    auto& u = by_user[r.user_id];
    u.user_id = r.user_id;
    if (!(r.rating > 0.0)) throw InputError("rating for user '" + r.user_id + "' must be positive to act as relevance");
    if (!u.items.emplace(r.item_id, r.rating).second) {
      throw InputError("user '" + r.user_id + "' rates '" + r.item_id + "' more than once");
    }
  }
  std::vector<UserRelevance> out;
  out.reserve(by_user.size());
  for (auto& [id, u] : by_user) out.push_back(std::move(u));
  return out;
}

PopularityTable load_popularity(const std::filesystem::path& path) {
  PopularityTable table;
  std::vector<std::string> header;
  read_delimited(
      path, ',',
      [&](std::size_t line, const std::vector<std::string>& f) {
        const std::string where = path.string() + ":" + std::to_string(line);
        if (f.size() != 2) throw InputError(where + ": expected item_id,popularity");
        const double p = parse_double(f[1]);
        if (!(p >= 0.0) || !std::isfinite(p)) throw InputError(where + ": popularity must be finite and >= 0");
        if (!table.emplace(f[0], p).second) throw InputError(where + ": duplicate item '" + f[0] + "'");
      },
      &header);
  return table;
}

void write_popularity(const std::filesystem::path& path, const PopularityTable& table) {
  std::ostringstream out;
  out << "item_id,popularity\n";
  for (const auto& [item, p] : table) out << quote_field(item) << ',' << format_double(p) << '\n';
  write_file(path, out.str());
}

KeywordTable load_keywords(const std::filesystem::path& path) {
  KeywordTable table;
  std::vector<std::string> header;
  read_delimited(
      path, ',',
      [&](std::size_t line, const std::vector<std::string>& f) {
        if (f.size() != 2) throw InputError(path.string() + ":" + std::to_string(line) + ": expected item_id,keyword");
        table[f[0]].insert(f[1]);
      },
      &header);
  return table;
}

void write_keywords(const std::filesystem::path& path, const KeywordTable& table) {
  std::ostringstream out;
  out << "item_id,keyword\n";
  for (const auto& [item, words] : table) {
    for (const auto& w : words) out << quote_field(item) << ',' << quote_field(w) << '\n';
  }
  write_file(path, out.str());
}

}  // namespace mlrec
