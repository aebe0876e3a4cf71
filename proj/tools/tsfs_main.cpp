#include "tsfs/cli.hpp"

int main(int argc, char** argv) { return tsfs::cli::run(argc, argv); }
