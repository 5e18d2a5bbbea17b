#include "hpcalc/cli.hpp"

int main(int argc, char** argv) { return hpcalc::cli::run(argc, argv); }
