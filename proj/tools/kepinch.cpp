#include "kepinch/cli.hpp"

int main(int argc, char **argv) { return kepinch::cli::run(argc, argv); }
