#ifndef SPX_PATTERNS_HPP
#define SPX_PATTERNS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace spx {

enum class PatternKind { speckle, hadamard };

std::string to_string(PatternKind kind);
PatternKind pattern_kind_from_string(const std::string& name);

// Bank of raw binary illumination patterns, one per row. Entries are exactly
// 0 or 1; the measurement-domain (zero-mean) form is obtained with
// effective_form / select. Regeneration with identical (kind, dims, count,
// seed) is bitwise identical; see rng.hpp for the generator contract.
struct PatternLibrary {
  PatternKind kind = PatternKind::speckle;
  int height = 0;
  int width = 0;
  long count = 0;          // number of patterns n
  std::uint64_t seed = 0;  // 0 and unused for hadamard
  std::vector<std::uint8_t> raw;  // count x (height*width), row-major

  long pixels() const { return static_cast<long>(height) * width; }
  std::uint8_t at(long row, long col) const {
    return raw[static_cast<std::size_t>(row) * pixels() + col];
  }
  Eigen::MatrixXd raw_matrix() const;
  std::string id() const;
};

// i.i.d. Bernoulli(1/2) binary masks from the seeded generator, one bit per
// entry in row-major order.
PatternLibrary gen_speckle(long n, int h, int w, std::uint64_t seed);

// First n rows of the Sylvester Hadamard matrix of order h*w, remapped
// {-1,+1} -> {0,1} so the raw library stays binary. Natural (Sylvester)
// ordering: entry (i,j) = +1 iff popcount(i & j) is even. Requires h*w to be
// a power of two and n <= h*w.
PatternLibrary gen_hadamard(long n, int h, int w);

// Entrywise 2*phi - 1; output entries are exactly -1 or +1.
Eigen::MatrixXd effective_form(const PatternLibrary& lib);

// Rebuild a library from a dense matrix (e.g. loaded from SPMX). Entries
// must be exactly 0 or 1.
PatternLibrary library_from_matrix(PatternKind kind, int h, int w,
                                   std::uint64_t seed,
                                   const Eigen::MatrixXd& values);

enum class SelectionPolicy { prefix };

// M selected rows of a library in measurement-ready form. `effective` holds
// the zero-mean (2*phi - 1) rows; entries are in {-1,+1} unless `whitened`.
// Operators built with the prefix policy nest: the operator for M' < M is
// bitwise the first M' rows of the operator for M.
struct SensingOperator {
  PatternKind source_kind = PatternKind::speckle;
  int height = 0;
  int width = 0;
  long library_count = 0;
  std::uint64_t library_seed = 0;
  long m = 0;
  std::vector<long> selection;  // distinct row indices into the library
  Eigen::MatrixXd effective;    // m x (height*width)
  bool whitened = false;
  double rho = 0.0;                // m / (height*width)
  std::string source_label;       // overrides the derived id when nonempty

  long pixels() const { return static_cast<long>(height) * width; }
  std::string id() const;
};

// rho = m / pixels as an exact IEEE-754 quotient.
double sampling_rate(long m, long pixels);

SensingOperator select(const PatternLibrary& lib, long m,
                       SelectionPolicy policy = SelectionPolicy::prefix);

// Wrap an arbitrary effective matrix as an operator (whitened operators,
// operators loaded from SPMX). When whitened is false every entry must be
// exactly -1 or +1.
SensingOperator operator_from_matrix(const Eigen::MatrixXd& effective, int h,
                                     int w, bool whitened,
                                     const std::string& source_id = "custom");

}  // namespace spx

#endif
