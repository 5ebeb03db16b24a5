#include <iostream>

#include "rangevol/cli.hpp"

int main(int argc, char** argv) { return rangevol::cli_main(argc, argv, std::cout, std::cerr); }
