#include "riemopt/bench/cli.hpp"

int main(int argc, char** argv) { return riemopt::bench::cli_main(argc, argv); }
