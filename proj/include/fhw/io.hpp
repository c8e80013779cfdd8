#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fhw/grid.hpp"

namespace fhw {

/// FNV-1a 64-bit hash, rendered as 16 lowercase hex digits by hash_hex.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

/// FHWG layout: "FHWG", u32 version = 1, u32 n, n x u32 sizes, f64 L,
/// then the values as f64, row-major, all little-endian.
void write_fhwg(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_fhwg(const std::filesystem::path& path);

void write_fhwg(std::ostream& os, const GridFunction& f);
GridFunction read_fhwg(std::istream& is);

/// Comma-separated table with a header row. Every row carries the config
/// hash in its first column.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::string config_hash, const std::vector<std::string>& columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::string_view v);
  void end_row();

 private:
  void separator();

  std::ostream& os_;
  std::string hash_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Shortest round-trip decimal form of v ('.' decimal point, locale-free).
std::string format_double(double v);

}  // namespace fhw
