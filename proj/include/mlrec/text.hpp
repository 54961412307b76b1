#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mlrec {

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

// Splits one delimited record. Fields may be double-quoted; a doubled quote
// inside a quoted field is a literal quote.
std::vector<std::string> split_record(std::string_view line, char delimiter = ',');

// Quotes a field when it contains the delimiter, a quote or a newline.
std::string quote_field(std::string_view field, char delimiter = ',');

// Streams a delimited file with a mandatory header row. The callback receives
// the 1-based line number and the split fields of every non-empty data row.
void read_delimited(const std::filesystem::path& path, char delimiter,
                    const std::function<void(std::size_t, const std::vector<std::string>&)>& row,
                    std::vector<std::string>* header = nullptr);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// 64-bit FNV-1a. Used for content hashes and cache keys, not security.
class Hasher {
 public:
  Hasher& update(std::string_view bytes);
  Hasher& update(double value);
  Hasher& update(std::uint64_t value);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 14695981039346656037ull;
};

std::string to_hex(std::uint64_t value);

// Stateless seed derivation so parallel work items get independent streams.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

std::size_t edit_distance(std::string_view a, std::string_view b);

// Up to `limit` candidates closest to `query` by edit distance.
std::vector<std::string> near_misses(std::string_view query, const std::vector<std::string>& candidates,
                                     std::size_t limit = 5);

}  // namespace mlrec
