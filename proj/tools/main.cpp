#include "cac/cli.hpp"

int main(int argc, char** argv) { return cac::run_cli(argc, argv); }
