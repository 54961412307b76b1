#include <fstream>
#include <sstream>

#include "mlrec/error.hpp"
#include "mlrec/recommender.hpp"
#include "mlrec/text.hpp"

namespace mlrec {

namespace {

constexpr std::string_view kMagic = "# mlrec precompute v1";

}  // namespace

// Layout, tab separated:
//   # mlrec precompute v1
//   # key <key>
//   L <seed> <theta> <rho> <count>     followed by <count> rows: <index> <id> <score> <gain>
//   E <seed> <message>
void write_precompute_cache(const std::filesystem::path& path, std::string_view key, const PrecomputeResult& result) {
  std::ostringstream out;
  out << kMagic << "\n# key " << key << '\n';
  for (const auto& [seed, list] : result.rankings) {
    out << "L\t" << quote_field(seed, '\t') << '\t' << format_double(list.theta) << '\t' << format_double(list.rho)
        << '\t' << list.entries.size() << '\n';
    for (const auto& e : list.entries) {
      out << e.index << '\t' << quote_field(e.id, '\t') << '\t' << format_double(e.score) << '\t'
          << format_double(e.log10_gain) << '\n';
    }
  }
  for (const auto& [seed, message] : result.errors) {
    out << "E\t" << quote_field(seed, '\t') << '\t' << quote_field(message, '\t') << '\n';
  }
  write_file(path, out.str());
}

std::optional<PrecomputeResult> read_precompute_cache(const std::filesystem::path& path, std::string_view key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != kMagic) return std::nullopt;
  if (!std::getline(in, line) || line != "# key " + std::string(key)) return std::nullopt;

  PrecomputeResult result;
  std::size_t line_no = 2;
  auto fail = [&](const std::string& what) {
    return InputError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_record(line, '\t');
    if (f[0] == "L") {
      if (f.size() != 5) throw fail("malformed ranking header");
      RankedList list;
      list.seed = f[1];
      list.theta = parse_double(f[2]);
      list.rho = parse_double(f[3]);
      const auto count = parse_int(f[4]);
      if (count < 0) throw fail("negative entry count");
      list.entries.reserve(static_cast<std::size_t>(count));
      for (std::int64_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw fail("truncated ranking");
        ++line_no;
        const auto g = split_record(line, '\t');
        if (g.size() != 4) throw fail("malformed ranking entry");
        list.entries.push_back({static_cast<std::size_t>(parse_int(g[0])), g[1], parse_double(g[2]),
                                parse_double(g[3])});
      }
      const std::string seed = list.seed;
      result.rankings.insert_or_assign(seed, std::move(list));
    } else if (f[0] == "E") {
      if (f.size() != 3) throw fail("malformed error record");
      result.errors.insert_or_assign(f[1], f[2]);
    } else {
      throw fail("unknown record type '" + f[0] + "'");
    }
  }
  return result;
}

}  // namespace mlrec
