#include <doctest.h>

#include <cmath>

#include "spx/errors.hpp"
#include "spx/patterns.hpp"

using namespace spx;

TEST_SUITE_BEGIN("patterns");

TEST_CASE("speckle entries are exactly 0 or 1") {
  const PatternLibrary lib = gen_speckle(32, 8, 8, 123);
  CHECK(lib.count == 32);
  CHECK(lib.pixels() == 64);
  for (const auto entry : lib.raw) CHECK((entry == 0 || entry == 1));
}

TEST_CASE("speckle degenerate 1x1 library") {
  const PatternLibrary lib = gen_speckle(1, 1, 1, 42);
  CHECK(lib.raw.size() == 1);
  CHECK((lib.raw[0] == 0 || lib.raw[0] == 1));
}

TEST_CASE("speckle rejects zero dimensions") {
  CHECK_THROWS_AS(gen_speckle(0, 4, 4, 0), InvalidArgument);
  CHECK_THROWS_AS(gen_speckle(4, 0, 4, 0), InvalidArgument);
  CHECK_THROWS_AS(gen_speckle(4, 4, 0, 0), InvalidArgument);
}

TEST_CASE("speckle mean entry is near one half") {
  // Counting oracle over n=1000 patterns of 16x16.
  const PatternLibrary lib = gen_speckle(1000, 16, 16, 7);
  long long ones = 0;
  for (const auto entry : lib.raw) ones += entry;
  const double mean = static_cast<double>(ones) / lib.raw.size();
  CHECK(std::abs(mean - 0.5) < 0.05);
}

TEST_CASE("speckle regeneration is bitwise identical") {
  const PatternLibrary a = gen_speckle(64, 8, 8, 99);
  const PatternLibrary b = gen_speckle(64, 8, 8, 99);
  CHECK(a.raw == b.raw);
  const PatternLibrary c = gen_speckle(64, 8, 8, 100);
  CHECK(a.raw != c.raw);
}

TEST_CASE("speckle at camera scale: 4000 patterns of 320x320") {
  const PatternLibrary lib = gen_speckle(4000, 320, 320, 1);
  CHECK(lib.count == 4000);
  CHECK(lib.pixels() == 102400);
  CHECK(lib.raw.size() == 4000ull * 102400ull);
  // Spot-check the first row's balance.
  long long ones = 0;
  for (long j = 0; j < lib.pixels(); ++j) ones += lib.at(0, j);
  CHECK(std::abs(static_cast<double>(ones) / lib.pixels() - 0.5) < 0.05);
}

TEST_CASE("hadamard order-2 rows") {
  const PatternLibrary lib = gen_hadamard(2, 1, 2);
  CHECK(lib.at(0, 0) == 1);
  CHECK(lib.at(0, 1) == 1);
  CHECK(lib.at(1, 0) == 1);
  CHECK(lib.at(1, 1) == 0);
}

TEST_CASE("hadamard effective rows are pairwise orthogonal") {
  const PatternLibrary lib = gen_hadamard(4, 2, 2);
  const Eigen::MatrixXd eff = effective_form(lib);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK(eff.row(i).dot(eff.row(j)) == 0.0);
    }
}

TEST_CASE("full hadamard satisfies Phi Phi^T = N I") {
  const PatternLibrary lib = gen_hadamard(16, 4, 4);
  const Eigen::MatrixXd eff = effective_form(lib);
  // Brute-force triple-loop product as the oracle.
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 16; ++k) dot += eff(i, k) * eff(j, k);
      CHECK(dot == (i == j ? 16.0 : 0.0));
    }
}

TEST_CASE("hadamard rejects unsupported sizes") {
  CHECK_THROWS_AS(gen_hadamard(4, 3, 2), UnsupportedSize);
  CHECK_THROWS_AS(gen_hadamard(5, 2, 2), InvalidArgument);
}

TEST_CASE("effective form maps 0/1 to -1/+1") {
  PatternLibrary lib = gen_speckle(1, 1, 3, 5);
  lib.raw = {1, 0, 1};
  const Eigen::MatrixXd eff = effective_form(lib);
  CHECK(eff(0, 0) == 1.0);
  CHECK(eff(0, 1) == -1.0);
  CHECK(eff(0, 2) == 1.0);

  lib.raw = {1, 1, 1};
  const Eigen::MatrixXd ones = effective_form(lib);
  CHECK((ones.array() == 1.0).all());
}

TEST_CASE("effective form of a long Bernoulli row has near-zero mean") {
  const PatternLibrary lib = gen_speckle(1, 100, 100, 21);
  const Eigen::MatrixXd eff = effective_form(lib);
  CHECK(std::abs(eff.row(0).mean()) < 0.05);
}

TEST_CASE("effective form rejects non-binary entries") {
  PatternLibrary lib = gen_speckle(1, 1, 2, 5);
  lib.raw = {2, 0};
  CHECK_THROWS_AS(effective_form(lib), ContractViolation);
  const Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(1, 2, 0.5);
  CHECK_THROWS_AS(library_from_matrix(PatternKind::speckle, 1, 2, 0, bad),
                  ContractViolation);
}

TEST_CASE("library round-trips through a dense matrix") {
  const PatternLibrary lib = gen_speckle(12, 4, 4, 3);
  const PatternLibrary back = library_from_matrix(
      lib.kind, lib.height, lib.width, lib.seed, lib.raw_matrix());
  CHECK(back.raw == lib.raw);
  CHECK(back.id() == lib.id());
}

TEST_CASE("select takes the full library at m = n") {
  const PatternLibrary lib = gen_speckle(10, 4, 4, 8);
  const SensingOperator op = select(lib, 10);
  CHECK(op.m == 10);
  CHECK(op.rho == 10.0 / 16.0);
  CHECK(op.effective == effective_form(lib));
}

TEST_CASE("camera-scale sampling rates are exact") {
  CHECK(sampling_rate(2000, 102400) == 0.01953125);
  CHECK(sampling_rate(3000, 102400) == 0.029296875);
}

TEST_CASE("selection nests: operator(100) is the prefix of operator(200)") {
  const PatternLibrary lib = gen_speckle(200, 16, 16, 17);
  const SensingOperator small = select(lib, 100);
  const SensingOperator large = select(lib, 200);
  CHECK(small.effective == large.effective.topRows(100));
}

TEST_CASE("select validates m") {
  const PatternLibrary lib = gen_speckle(8, 2, 2, 1);
  CHECK_THROWS_AS(select(lib, 0), InvalidArgument);
  CHECK_THROWS_AS(select(lib, 9), InvalidArgument);
  // rho must stay in (0,1]: a 2x2 grid admits at most 4 rows.
  CHECK_THROWS_AS(select(lib, 5), InvalidArgument);
  const SensingOperator op = select(lib, 4);
  CHECK(op.rho == 1.0);
}

TEST_CASE("selected operators expose -1/+1 entries and exact rho") {
  const PatternLibrary lib = gen_speckle(40, 8, 8, 2);
  for (const long m : {1L, 7L, 40L}) {
    const SensingOperator op = select(lib, m);
    CHECK(((op.effective.array() == 1.0) || (op.effective.array() == -1.0))
              .all());
    CHECK(op.rho == static_cast<double>(m) / 64.0);
    CHECK(std::llround(op.rho * op.pixels()) == m);
    CHECK_FALSE(op.whitened);
    CHECK(op.selection.size() == static_cast<std::size_t>(m));
  }
}

TEST_CASE("operator_from_matrix validates entries unless whitened") {
  Eigen::MatrixXd good(2, 4);
  good << 1, -1, 1, -1, -1, -1, 1, 1;
  const SensingOperator op = operator_from_matrix(good, 2, 2, false);
  CHECK(op.m == 2);
  Eigen::MatrixXd bad = good;
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(operator_from_matrix(bad, 2, 2, false), ContractViolation);
  CHECK_NOTHROW(operator_from_matrix(bad, 2, 2, true));
}

TEST_SUITE_END();
