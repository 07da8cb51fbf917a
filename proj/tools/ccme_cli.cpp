#include "ccme/cli.hpp"

int main(int argc, char** argv) { return ccme::run_cli(argc, argv); }
