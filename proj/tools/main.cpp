#include "edgedist/cli.hpp"

int main(int argc, char** argv) { return edgedist::cli::run(argc, argv); }
