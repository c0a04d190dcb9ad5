#include "minsurf/cli.hpp"

int main(int argc, char** argv) { return minsurf::run_cli(argc, argv); }
