#include "spx/io.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "spx/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "SPMX serialization assumes a little-endian host");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559,
              "SPMX payload requires IEEE-754 binary64");

namespace spx {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 24;

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v;
  std::memcpy(&v, bytes.data() + offset, 4);
  return v;
}

std::uint64_t get_u64(std::string_view bytes, std::size_t offset) {
  std::uint64_t v;
  std::memcpy(&v, bytes.data() + offset, 8);
  return v;
}

}  // namespace

std::string spmx_encode(const Eigen::MatrixXd& values) {
  const auto rows = static_cast<std::uint64_t>(values.rows());
  const auto cols = static_cast<std::uint64_t>(values.cols());
  std::string out;
  out.reserve(kHeaderSize + 8 * rows * cols);
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, rows);
  put_u64(out, cols);
  const std::size_t payload = out.size();
  out.resize(kHeaderSize + 8 * rows * cols);
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor> map(reinterpret_cast<double*>(out.data() + payload),
                           static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(cols));
  map = values;
  return out;
}

Eigen::MatrixXd spmx_decode(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw InvalidArgument("not an SPMX container");
  if (get_u32(bytes, 4) != kVersion)
    throw InvalidArgument("unsupported SPMX version");
  const std::uint64_t rows = get_u64(bytes, 8);
  const std::uint64_t cols = get_u64(bytes, 16);
  if (rows > 0 && cols > (std::uint64_t{1} << 30) / rows)
    throw ResourceLimit("SPMX matrix larger than 8 GiB");
  if (bytes.size() != kHeaderSize + 8 * rows * cols)
    throw InvalidArgument("SPMX payload size mismatch");
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> map(
      reinterpret_cast<const double*>(bytes.data() + kHeaderSize),
      static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return map;
}

void spmx_write(const std::filesystem::path& path, const Eigen::MatrixXd& values) {
  write_file_bytes(path, spmx_encode(values));
}

Eigen::MatrixXd spmx_read(const std::filesystem::path& path) {
  return spmx_decode(read_file_bytes(path));
}

std::string keyvalue_encode(const KeyValueList& items) {
  std::string out;
  for (const auto& [key, value] : items) {
    if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos)
      throw InvalidArgument("key contains '=' or newline: " + key);
    if (value.find('\n') != std::string::npos)
      throw InvalidArgument("value contains newline for key: " + key);
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

KeyValueList keyvalue_decode(std::string_view text) {
  KeyValueList items;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("malformed key=value line: " + std::string(line));
    items.emplace_back(std::string(line.substr(0, eq)),
                       std::string(line.substr(eq + 1)));
  }
  return items;
}

void keyvalue_write(const std::filesystem::path& path, const KeyValueList& items) {
  write_file_bytes(path, keyvalue_encode(items));
}

KeyValueList keyvalue_read(const std::filesystem::path& path) {
  return keyvalue_decode(read_file_bytes(path));
}

std::string keyvalue_get(const KeyValueList& items, const std::string& key) {
  for (const auto& [k, v] : items)
    if (k == key) return v;
  throw InvalidArgument("missing key: " + key);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string digest_hex(std::string_view bytes) {
  const std::uint64_t hash = fnv1a64(bytes);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf, 16);
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof())
    throw Error("error reading file: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw Error("error writing file: " + path.string());
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw InvalidArgument("not a number: " + text);
  return v;
}

long long parse_int(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw InvalidArgument("not an integer: " + text);
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE)
    throw InvalidArgument("not an unsigned integer: " + text);
  return v;
}

}  // namespace spx
