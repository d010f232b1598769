#include "fpplab/cli.hpp"

int main(int argc, char** argv) { return fpplab::cli_main(argc, argv); }
