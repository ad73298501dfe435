#include "morsegap/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return morsegap::run_cli(argc, argv, std::cout, std::cerr); }
