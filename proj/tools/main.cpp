#include "cli.hpp"

int main(int argc, char** argv) { return crowdmask::cli::run(argc, argv); }
