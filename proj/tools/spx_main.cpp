#include "spx/cli.hpp"

int main(int argc, char** argv) { return spx::cli::run_main(argc, argv); }
