#include "cineplan/cli.hpp"

int main(int argc, char** argv) { return cineplan::run_cli(argc, argv); }
