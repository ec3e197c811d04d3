#include "ltlab/cli.hpp"

int main(int argc, char** argv) { return ltlab::cli::run(argc, argv); }
