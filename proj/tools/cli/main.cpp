#include "cli/run.hpp"

int main(int argc, char** argv) { return gaplabel::cli::run(argc, argv); }
