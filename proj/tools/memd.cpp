#include <iostream>

#include "memd/cli.hpp"

int main(int argc, char** argv) { return memd::run_cli(argc, argv, std::cout, std::cerr); }
