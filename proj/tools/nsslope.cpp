#include "nsslope/cli.hpp"

int main(int argc, char** argv) { return nsslope::cli::run(argc, argv); }
