#include "evitsim/cli.hpp"

int main(int argc, char** argv) { return evitsim::run_cli(argc, argv); }
