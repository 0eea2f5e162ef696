#ifndef SPX_IO_HPP
#define SPX_IO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spx {

// SPMX dense matrix container, format version 1:
//   bytes  0..3   ASCII "SPMX"
//   bytes  4..7   format version, uint32 little-endian (= 1)
//   bytes  8..15  row count, uint64 little-endian
//   bytes 16..23  column count, uint64 little-endian
//   payload       rows*cols IEEE-754 binary64, little-endian, row-major
// No padding, no trailing bytes.
std::string spmx_encode(const Eigen::MatrixXd& values);
Eigen::MatrixXd spmx_decode(std::string_view bytes);
void spmx_write(const std::filesystem::path& path, const Eigen::MatrixXd& values);
Eigen::MatrixXd spmx_read(const std::filesystem::path& path);

// Plain-text key=value files: one `key=value` pair per line, '\n' terminated,
// order preserved. Keys may not contain '=' or newlines.
using KeyValueList = std::vector<std::pair<std::string, std::string>>;
std::string keyvalue_encode(const KeyValueList& items);
KeyValueList keyvalue_decode(std::string_view text);
void keyvalue_write(const std::filesystem::path& path, const KeyValueList& items);
KeyValueList keyvalue_read(const std::filesystem::path& path);
std::string keyvalue_get(const KeyValueList& items, const std::string& key);

// FNV-1a 64-bit digest over exact bytes, reported as 16 lowercase hex digits.
// Integrity check for manifests, not a cryptographic hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

// Shortest round-trip decimal form of a double ("%.17g", locale-independent).
std::string format_double(double value);
double parse_double(const std::string& text);
long long parse_int(const std::string& text);
std::uint64_t parse_u64(const std::string& text);

}  // namespace spx

#endif
