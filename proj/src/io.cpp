#include "fhw/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>

#include "fhw/errors.hpp"

namespace fhw {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'H', 'W', 'G'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& os, T v) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ConsistencyError("read_fhwg: truncated file");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = digits[h & 0xf];
  return s;
}

void write_fhwg(std::ostream& os, const GridFunction& f) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.dim()));
  for (int s : f.grid.sizes()) put<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  put<double>(os, f.grid.half_length());
  for (Eigen::Index i = 0; i < f.values.size(); ++i) put<double>(os, f.values[i]);
}

GridFunction read_fhwg(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ConsistencyError("read_fhwg: bad magic");
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw ConsistencyError("read_fhwg: unsupported version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is);
  if (n < 1 || n > 3) throw ConsistencyError("read_fhwg: dimension " + std::to_string(n) + " out of range");
  std::vector<int> sizes(n);
  for (auto& s : sizes) s = static_cast<int>(get<std::uint32_t>(is));
  const double L = get<double>(is);
  GridFunction f(BoxGrid(sizes, L));
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = get<double>(is);
  return f;
}

void write_fhwg(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("write_fhwg: cannot open " + path.string());
  write_fhwg(os, f);
  if (!os) throw PreconditionError("write_fhwg: write failed for " + path.string());
}

GridFunction read_fhwg(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("read_fhwg: cannot open " + path.string());
  return read_fhwg(is);
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::string config_hash, const std::vector<std::string>& columns)
    : os_(os), hash_(std::move(config_hash)), columns_(columns.size()) {
  os_ << "config_hash";
  for (const auto& c : columns) os_ << ',' << c;
  os_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ == 0) os_ << hash_;
  if (filled_ >= columns_) throw PreconditionError("CsvWriter: too many cells in row");
  os_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  os_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  separator();
  if (v.find_first_of(",\"\n") == std::string_view::npos) {
    os_ << v;
  } else {
    os_ << '"';
    for (char c : v) os_ << (c == '"' ? "\"\"" : std::string(1, c));
    os_ << '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw PreconditionError("CsvWriter: row has the wrong number of cells");
  os_ << '\n';
  filled_ = 0;
}

}  // namespace fhw
