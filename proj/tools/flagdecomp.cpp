#include "flagdecomp/cli.hpp"

int main(int argc, char** argv) { return flagdecomp::cli::run(argc, argv); }
