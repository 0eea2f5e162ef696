#include "spx/patterns.hpp"

#include <bit>

#include "spx/errors.hpp"
#include "spx/rng.hpp"

namespace spx {

std::string to_string(PatternKind kind) {
  return kind == PatternKind::speckle ? "speckle" : "hadamard";
}

PatternKind pattern_kind_from_string(const std::string& name) {
  if (name == "speckle") return PatternKind::speckle;
  if (name == "hadamard") return PatternKind::hadamard;
  throw InvalidArgument("unknown pattern kind: " + name);
}

Eigen::MatrixXd PatternLibrary::raw_matrix() const {
  Eigen::MatrixXd out(count, pixels());
  for (long i = 0; i < count; ++i)
    for (long j = 0; j < pixels(); ++j) out(i, j) = at(i, j);
  return out;
}

std::string PatternLibrary::id() const {
  return to_string(kind) + ":h=" + std::to_string(height) +
         ":w=" + std::to_string(width) + ":n=" + std::to_string(count) +
         ":seed=" + std::to_string(seed);
}

PatternLibrary gen_speckle(long n, int h, int w, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("pattern count must be >= 1");
  if (h < 1 || w < 1) throw InvalidArgument("pattern dimensions must be >= 1");
  PatternLibrary lib;
  lib.kind = PatternKind::speckle;
  lib.height = h;
  lib.width = w;
  lib.count = n;
  lib.seed = seed;
  lib.raw.resize(static_cast<std::size_t>(n) * lib.pixels());
  Xoshiro256pp gen(seed);
  for (auto& entry : lib.raw) entry = gen.bernoulli_bit() ? 1 : 0;
  return lib;
}

PatternLibrary gen_hadamard(long n, int h, int w) {
  if (h < 1 || w < 1) throw InvalidArgument("pattern dimensions must be >= 1");
  const unsigned long long order = static_cast<unsigned long long>(h) * w;
  if (!std::has_single_bit(order))
    throw UnsupportedSize("Hadamard order must be a power of two, got " +
                          std::to_string(order));
  if (n < 1 || static_cast<unsigned long long>(n) > order)
    throw InvalidArgument("need 1 <= n <= h*w for a Hadamard library");
  PatternLibrary lib;
  lib.kind = PatternKind::hadamard;
  lib.height = h;
  lib.width = w;
  lib.count = n;
  lib.seed = 0;
  lib.raw.resize(static_cast<std::size_t>(n) * lib.pixels());
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < lib.pixels(); ++j)
      lib.raw[static_cast<std::size_t>(i) * lib.pixels() + j] =
          (std::popcount(static_cast<std::uint64_t>(i) &
                         static_cast<std::uint64_t>(j)) &
           1)
              ? 0
              : 1;
  return lib;
}

Eigen::MatrixXd effective_form(const PatternLibrary& lib) {
  Eigen::MatrixXd out(lib.count, lib.pixels());
  for (long i = 0; i < lib.count; ++i)
    for (long j = 0; j < lib.pixels(); ++j) {
      const std::uint8_t v = lib.at(i, j);
      if (v > 1) throw ContractViolation("raw pattern entry not in {0,1}");
      out(i, j) = 2.0 * v - 1.0;
    }
  return out;
}

PatternLibrary library_from_matrix(PatternKind kind, int h, int w,
                                   std::uint64_t seed,
                                   const Eigen::MatrixXd& values) {
  if (h < 1 || w < 1) throw InvalidArgument("pattern dimensions must be >= 1");
  if (values.cols() != static_cast<long>(h) * w)
    throw InvalidArgument("matrix width does not match h*w");
  if (values.rows() < 1) throw InvalidArgument("library must have >= 1 row");
  PatternLibrary lib;
  lib.kind = kind;
  lib.height = h;
  lib.width = w;
  lib.count = values.rows();
  lib.seed = seed;
  lib.raw.resize(static_cast<std::size_t>(lib.count) * lib.pixels());
  for (long i = 0; i < lib.count; ++i)
    for (long j = 0; j < lib.pixels(); ++j) {
      const double v = values(i, j);
      if (v != 0.0 && v != 1.0)
        throw ContractViolation("raw pattern entry not in {0,1}");
      lib.raw[static_cast<std::size_t>(i) * lib.pixels() + j] =
          static_cast<std::uint8_t>(v);
    }
  return lib;
}

std::string SensingOperator::id() const {
  const std::string base =
      source_label.empty()
          ? to_string(source_kind) + ":h=" + std::to_string(height) +
                ":w=" + std::to_string(width) +
                ":n=" + std::to_string(library_count) +
                ":seed=" + std::to_string(library_seed)
          : source_label;
  return base + ":m=" + std::to_string(m) +
         ":whitened=" + (whitened ? "1" : "0");
}

double sampling_rate(long m, long pixels) {
  return static_cast<double>(m) / static_cast<double>(pixels);
}

SensingOperator select(const PatternLibrary& lib, long m,
                       SelectionPolicy policy) {
  if (policy != SelectionPolicy::prefix)
    throw InvalidArgument("unknown selection policy");
  if (m < 1 || m > lib.count)
    throw InvalidArgument("need 1 <= m <= library count, got m=" +
                          std::to_string(m));
  if (m > lib.pixels())
    throw InvalidArgument("m exceeds pixel count; rho must stay in (0,1]");
  SensingOperator op;
  op.source_kind = lib.kind;
  op.height = lib.height;
  op.width = lib.width;
  op.library_count = lib.count;
  op.library_seed = lib.seed;
  op.m = m;
  op.selection.resize(m);
  op.effective.resize(m, lib.pixels());
  for (long i = 0; i < m; ++i) {
    op.selection[i] = i;
    for (long j = 0; j < lib.pixels(); ++j)
      op.effective(i, j) = 2.0 * lib.at(i, j) - 1.0;
  }
  op.whitened = false;
  op.rho = sampling_rate(m, lib.pixels());
  return op;
}

SensingOperator operator_from_matrix(const Eigen::MatrixXd& effective, int h,
                                     int w, bool whitened,
                                     const std::string& source_id) {
  if (h < 1 || w < 1) throw InvalidArgument("operator dimensions must be >= 1");
  if (effective.cols() != static_cast<long>(h) * w)
    throw InvalidArgument("matrix width does not match h*w");
  if (effective.rows() < 1 || effective.rows() > static_cast<long>(h) * w)
    throw InvalidArgument("need 1 <= m <= h*w rows");
  if (!whitened && !((effective.array() == 1.0) || (effective.array() == -1.0))
                        .all())
    throw ContractViolation("effective entries must be -1 or +1");
  SensingOperator op;
  op.source_kind = PatternKind::speckle;
  op.height = h;
  op.width = w;
  op.library_count = effective.rows();
  op.library_seed = 0;
  op.m = effective.rows();
  op.selection.resize(op.m);
  for (long i = 0; i < op.m; ++i) op.selection[i] = i;
  op.effective = effective;
  op.whitened = whitened;
  op.rho = sampling_rate(op.m, op.pixels());
  op.source_label = source_id;
  return op;
}

}  // namespace spx
