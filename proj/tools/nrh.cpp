#include "cli.hpp"

int main(int argc, char** argv) { return nrh::cli::run_command(argc, argv); }
