#ifndef SPX_CLI_HPP
#define SPX_CLI_HPP

#include <string>
#include <vector>

namespace spx::cli {

// Batch front end. Subcommands: gen-patterns, synth, measure, calibrate,
// reconstruct, diagnose, sweep, safe-interval. Every command writes a
// `.manifest` next to each primary output recording resolved parameters and
// FNV-1a digests of all input and output files. With --check, outputs are
// recomputed and compared bitwise against the existing files instead of
// being overwritten.
//
// Exit codes: 0 success, 1 failure (I/O, contract, --check mismatch),
// 2 usage error, 3 numerical failure under --strict.
int run(const std::vector<std::string>& args);

int run_main(int argc, const char* const* argv);

}  // namespace spx::cli

#endif
